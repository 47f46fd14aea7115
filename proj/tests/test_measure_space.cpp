#include <doctest.h>

#include "kinf/measure_space.hpp"

using namespace kinf;

TEST_SUITE("measure_space") {

TEST_CASE("build_space covers [0,1) with equal cells")
{
    const MeasureSpace one = build_space(1);
    CHECK(one.cell_count() == 2);
    CHECK(one.cell_bounds(0) == std::pair{0.0, 0.5});
    CHECK(one.cell_bounds(1) == std::pair{0.5, 1.0});
    CHECK(one.cell_measure() == 0.5);

    const MeasureSpace three = build_space(3);
    CHECK(three.cell_count() == 8);
    CHECK(three.cell_measure() == 0.125);
    double total = 0.0;
    for (std::size_t c = 0; c < three.cell_count(); ++c) {
        const auto [lo, hi] = three.cell_bounds(c);
        CHECK(hi - lo == three.cell_measure());
        if (c > 0) CHECK(lo == three.cell_bounds(c - 1).second);
        total += hi - lo;
    }
    CHECK(total == 1.0);
    CHECK(three.center(0) == 1.0 / 16.0);
}

TEST_CASE("build_space rejects depths outside [1, 24]")
{
    CHECK_THROWS_AS(build_space(0), Error);
    CHECK_THROWS_AS(build_space(25), Error);
    CHECK_NOTHROW(build_space(24));
}

TEST_CASE("inner_product examples")
{
    const MeasureSpace s = build_space(3);
    const auto one = GridFunction::constant(s, 1.0);
    CHECK(inner_product(one, one) == Complex(1.0));
    const auto left = GridFunction::indicator(MeasurableSet::interval(s, 0, 4));
    const auto right = GridFunction::indicator(MeasurableSet::interval(s, 4, 8));
    CHECK(inner_product(left, right) == Complex(0.0));
    CHECK(inner_product(left, left) == Complex(0.5));
}

TEST_CASE("inner_product is conjugate symmetric and definite")
{
    const MeasureSpace s = build_space(4);
    const auto f = GridFunction::sample(s, [](double y) { return Complex(y, 1.0 - 2.0 * y * y); });
    const auto g = GridFunction::sample(s, [](double y) { return Complex(std::cos(3 * y), y); });
    CHECK(std::abs(inner_product(f, g) - std::conj(inner_product(g, f))) < 1e-15);
    CHECK(inner_product(f, f).real() > 0.0);
    CHECK(inner_product(f, f).imag() == 0.0);
    CHECK(norm(GridFunction::zero(s)) == 0.0);
    CHECK_THROWS_AS(inner_product(f, GridFunction::zero(build_space(3))), Error);
}

TEST_CASE("band_set examples")
{
    const MeasureSpace s = build_space(3);
    const auto h = GridFunction::sample(s, [](double y) { return Complex(y); });
    CHECK(band_set(h, 0.0, 0.25, 0.5).cells() == std::vector<std::size_t>{2, 3});
    CHECK(band_set(h, 0.0, 0.5, 1.0).cells() == std::vector<std::size_t>{4, 5, 6, 7});
    const auto flat = GridFunction::constant(s, Complex(0.3, 0.1));
    CHECK(band_set(flat, Complex(0.3, 0.1), 0.0, 10.0).empty());
    CHECK_THROWS_AS(band_set(h, 0.0, 0.5, 0.5), Error);
}

TEST_CASE("bands for a decreasing sequence are pairwise disjoint")
{
    const MeasureSpace s = build_space(8);
    const auto h = GridFunction::sample(s, [](double y) { return Complex(y * y, 0.5 * y); });
    std::vector<MeasurableSet> bands;
    double hi = 1.0;
    for (int n = 0; n < 6; ++n) {
        bands.push_back(band_set(h, 0.0, 0.6 * hi, hi));
        hi *= 0.6;
    }
    for (std::size_t a = 0; a < bands.size(); ++a) {
        for (std::size_t b = a + 1; b < bands.size(); ++b) CHECK_FALSE(bands[a].intersects(bands[b]));
    }
}

TEST_CASE("bisect examples and invariants")
{
    const MeasureSpace one = build_space(1);
    const auto [l, r] = bisect(MeasurableSet::whole(one));
    CHECK(l.cells() == std::vector<std::size_t>{0});
    CHECK(r.cells() == std::vector<std::size_t>{1});

    const MeasureSpace three = build_space(3);
    const MeasurableSet e(three, {2, 3, 4, 5});
    const auto [a, b] = bisect(e);
    CHECK(a.cells() == std::vector<std::size_t>{2, 3});
    CHECK(b.cells() == std::vector<std::size_t>{4, 5});
    CHECK(a.measure() + b.measure() == e.measure());
    CHECK(a.measure() == b.measure());
    CHECK_FALSE(a.intersects(b));

    try {
        bisect(MeasurableSet(three, {7}));
        FAIL("expected NotBisectable");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::NotBisectable);
    }
    // Non-contiguous sets split by sorted position.
    const auto [p, q] = bisect(MeasurableSet(three, {0, 3, 5, 6}));
    CHECK(p.cells() == std::vector<std::size_t>{0, 3});
    CHECK(q.cells() == std::vector<std::size_t>{5, 6});
}

TEST_CASE("measurable sets validate their cells")
{
    const MeasureSpace s = build_space(2);
    CHECK_THROWS_AS(MeasurableSet(s, {1, 1}), Error);
    CHECK_THROWS_AS(MeasurableSet(s, {2, 1}), Error);
    CHECK_THROWS_AS(MeasurableSet(s, {4}), Error);
    CHECK(MeasurableSet(s, {}).measure() == 0.0);
    CHECK(MeasurableSet(s, {1, 3}).refined().cells() == std::vector<std::size_t>{2, 3, 6, 7});
}

TEST_CASE("grid kernel apply matches the midpoint sum")
{
    const MeasureSpace s = build_space(2);
    const auto k = GridKernel::sample(s, [](double x, double y) { return Complex(x + 2 * y, x * y); });
    const auto f = GridFunction::sample(s, [](double y) { return Complex(1.0 - y, y); });
    const auto kf = k.apply(f);
    for (std::size_t i = 0; i < 4; ++i) {
        Complex sum = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            const double x = s.center(i), y = s.center(j);
            sum += Complex(x + 2 * y, x * y) * Complex(1.0 - y, y) * 0.25;
        }
        CHECK(std::abs(kf.values[static_cast<Eigen::Index>(i)] - sum) < 1e-15);
    }
    // <K f, g> = <f, K* g>
    const auto g = GridFunction::sample(s, [](double y) { return Complex(y * y, -1.0); });
    CHECK(std::abs(inner_product(k.apply(f), g) - inner_product(f, k.apply_adjoint(g))) < 1e-14);
}

TEST_CASE("sources refine by prolongation and coarsen by averaging")
{
    const MeasureSpace s = build_space(2);
    const GridFunction samples(s, Vector::LinSpaced(4, 1.0, 4.0));
    const auto src = FunctionSource::from_grid(samples);
    const auto fine = src.sample(build_space(3));
    CHECK(fine.values[0] == Complex(1.0));
    CHECK(fine.values[1] == Complex(1.0));
    CHECK(fine.values[7] == Complex(4.0));
    const auto coarse = src.sample(build_space(1));
    CHECK(coarse.values[0] == Complex(1.5));
    CHECK(coarse.values[1] == Complex(3.5));
    const auto closed = FunctionSource::from_function([](double y) { return Complex(y); });
    CHECK(closed.at(build_space(3), 5) == Complex(11.0 / 16.0));
}

}
