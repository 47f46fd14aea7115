#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kinf/smooth_basis.hpp"
#include "support.hpp"

using namespace kinf;
using kinf::testing::hermite_function_oracle;

TEST_SUITE("smooth_basis") {

TEST_CASE("closed-form values")
{
    const SmoothBasis b(4);
    const double c = std::pow(std::numbers::pi, -0.25);
    CHECK(basis_value(b, 0, 0, 0.0) == doctest::Approx(c).epsilon(1e-15));
    CHECK(basis_value(b, 0, 0, 0.0) == doctest::Approx(0.75112554).epsilon(1e-8));
    CHECK(basis_value(b, 0, 1, 1.0) == doctest::Approx(-c * std::exp(-0.5)).epsilon(1e-14));
    CHECK(basis_value(b, 0, 1, 1.0) == doctest::Approx(-0.45558).epsilon(1e-5));
    CHECK(basis_value(b, 1, 0, 0.0) == 0.0);
}

TEST_CASE("recurrence agrees with the explicit Hermite sum")
{
    // The alternating explicit sum loses about 1e-11 to cancellation near s = 5, n = 19.
    for (int n = 0; n < 20; ++n) {
        for (double s : {-3.7, -1.2, 0.0, 0.4, 2.5, 5.0}) {
            const double oracle = hermite_function_oracle(n, s);
            CHECK(std::abs(SmoothBasis::hermite_functions(20, s)[n] - oracle) < 1e-10);
        }
    }
}

TEST_CASE("orthonormality by an independent Simpson quadrature")
{
    const int n = 24;
    RealMatrix gram = RealMatrix::Zero(n, n);
    const double a = -20.0, b = 20.0;
    const int panels = 8000;
    const double h = (b - a) / panels;
    for (int k = 0; k <= panels; ++k) {
        const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        const RealVector u = SmoothBasis::hermite_functions(n, a + k * h);
        gram += (w * h / 3.0) * u * u.transpose();
    }
    CHECK((gram - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("derivatives agree with central differences")
{
    const SmoothBasis b(16);
    const double step = 1e-4;
    auto central = [&](std::size_t n, int i, double s, double h) {
        return (b.value(n, i, s + h) - b.value(n, i, s - h)) / (2 * h);
    };
    double extrapolated = 0.0;
    double excess = 0.0;
    for (std::size_t n = 0; n < 16; ++n) {
        for (int i = 0; i < 3; ++i) {
            for (double s = -4.0; s <= 4.0; s += 0.25) {
                const double exact = b.value(n, i + 1, s);
                const double plain = central(n, i, s, step);
                // The plain difference carries its own h^2/6 u^{(i+3)} truncation term (3e-6 at n = 15, i = 2).
                const double truncation = step * step / 6.0 * std::abs(b.value(n, i + 3, s));
                excess = std::max(excess, std::abs(plain - exact) - truncation);
                const double richardson = (4.0 * central(n, i, s, 0.5 * step) - plain) / 3.0;
                extrapolated = std::max(extrapolated, std::abs(richardson - exact));
            }
        }
    }
    CHECK(extrapolated < 1e-6);
    CHECK(excess < 1e-8);
}

TEST_CASE("derivative identity u_n' = -s u_n + sqrt(2n) u_{n-1}")
{
    const SmoothBasis b(30);
    for (std::size_t n = 1; n < 30; ++n) {
        for (double s : {-2.0, 0.3, 1.7}) {
            const double rhs = -s * b.value(n, 0, s) + std::sqrt(2.0 * n) * b.value(n - 1, 0, s);
            CHECK(std::abs(b.value(n, 1, s) - rhs) < 1e-12);
        }
    }
}

TEST_CASE("tails vanish at 8 + sqrt(2n)")
{
    const SmoothBasis b(32);
    for (std::size_t n = 0; n < 32; ++n) {
        const double r = 8.0 + std::sqrt(2.0 * n);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(b.value(n, i, r)) < 1e-8);
            CHECK(std::abs(b.value(n, i, -r)) < 1e-8);
        }
    }
}

TEST_CASE("large arguments neither overflow nor lose the exponent")
{
    const RealVector u = SmoothBasis::hermite_functions(200, 30.0);
    CHECK(u.allFinite());
    CHECK(std::abs(u[199]) > 0.0);
    // u_0(30) = pi^{-1/4} e^{-450} sits near 1e-196; u_1 = sqrt(2) s u_0.
    const double u0 = std::pow(std::numbers::pi, -0.25) * std::exp(-450.0);
    CHECK(u[0] == doctest::Approx(u0).epsilon(1e-13));
    CHECK(u[1] == doctest::Approx(std::sqrt(2.0) * 30.0 * u0).epsilon(1e-13));
    // Beyond the turning point sqrt(2n+1) the functions still grow with n at s = 30.
    CHECK(std::abs(u[199]) > std::abs(u[150]));
}

TEST_CASE("Gauss-Hermite rule matches known nodes and integrates exactly")
{
    const QuadratureRule two = gauss_hermite(2);
    CHECK(std::abs(std::abs(two.nodes[0]) - std::sqrt(0.5)) < 1e-15);
    // int exp(-s^2) s^4 ds = 3 sqrt(pi) / 4 needs 3 nodes.
    const QuadratureRule q = gauss_hermite(3);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < 3; ++k) sum += q.weights[k] * std::exp(-q.nodes[k] * q.nodes[k]) * std::pow(q.nodes[k], 4);
    CHECK(sum == doctest::Approx(0.75 * std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("multiplier matrix examples")
{
    const SmoothBasis b(12);
    const RealMatrix m = multiplier_matrix(Multiplier::gaussian(), b, default_quadrature_nodes(12));
    CHECK(m(0, 0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(m(0, 0) == doctest::Approx(0.81650).epsilon(1e-5));
    CHECK(std::abs(m(0, 1)) < 1e-15);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    const RealMatrix id = multiplier_matrix(Multiplier::unit(), b, default_quadrature_nodes(12));
    CHECK((id - RealMatrix::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("multiplier matrix entries agree with Simpson quadrature")
{
    const SmoothBasis b(8);
    const Multiplier g = Multiplier::gaussian(1.3);
    const RealMatrix m = multiplier_matrix(g, b, default_quadrature_nodes(8));
    for (std::size_t p = 0; p < 8; ++p) {
        for (std::size_t q = 0; q < 8; ++q) {
            const double oracle = kinf::testing::simpson(
                [&](double s) { return g.value(s) * hermite_function_oracle(int(p), s) * hermite_function_oracle(int(q), s); },
                -15.0, 15.0, 6000);
            CHECK(std::abs(m(Eigen::Index(p), Eigen::Index(q)) - oracle) < 1e-10);
        }
    }
}

TEST_CASE("too few quadrature nodes are detected")
{
    const SmoothBasis b(20);
    try {
        multiplier_matrix(Multiplier::gaussian(), b, 8);
        FAIL("expected QuadratureInsufficient");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::QuadratureInsufficient);
    }
}

TEST_CASE("multiplier is positive with closed-form derivatives and norm")
{
    const Multiplier m = Multiplier::gaussian();
    CHECK(m.l2_norm() == doctest::Approx(std::pow(std::numbers::pi, 0.25)).epsilon(1e-15));
    CHECK(m.l2_norm() * m.l2_norm() == doctest::Approx(1.77245).epsilon(1e-5));
    CHECK(std::isinf(Multiplier::unit().l2_norm()));
    for (double s : {-3.0, -0.5, 0.0, 1.1, 6.0}) {
        CHECK(m.value(s) > 0.0);
        CHECK(m.derivative(1, s) == doctest::Approx(-s * m.value(s)));
        CHECK(m.derivative(2, s) == doctest::Approx((s * s - 1.0) * m.value(s)));
        CHECK(m.derivative(3, s) == doctest::Approx((3.0 * s - s * s * s) * m.value(s)));
        CHECK(m.squared().value(s) == doctest::Approx(m.value(s) * m.value(s)));
    }
    CHECK_THROWS_AS(Multiplier::gaussian(0.0), Error);
}

}
