#include "kinf/rademacher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kinf {

int max_rademacher_level(const MeasurableSet& set)
{
    std::size_t count = set.size();
    if (count == 0) return 0;
    int level = 0;
    while (count % 2 == 0) {
        count /= 2;
        ++level;
    }
    return level;
}

RademacherFunction rademacher(const MeasurableSet& set, int level)
{
    if (level < 1) throw Error(ErrorKind::InvalidArgument, "Rademacher level must be >= 1");
    if (set.empty() || max_rademacher_level(set) < level) {
        throw Error(ErrorKind::NotBisectable, std::to_string(set.size()) + " cells cannot be bisected " +
                                                  std::to_string(level) + " times; refine the grid");
    }
    // n rounds of sorted-half bisection leave 2^n contiguous runs of the sorted cell list.
    const std::size_t piece = set.size() >> level;
    const double amplitude = 1.0 / std::sqrt(set.measure());
    auto f = GridFunction::zero(set.space());
    const auto& cells = set.cells();
    for (std::size_t p = 0; p < cells.size(); ++p) {
        const bool odd_piece = ((p / piece) % 2) == 1;
        f.values[static_cast<Eigen::Index>(cells[p])] = odd_piece ? -amplitude : amplitude;
    }
    return RademacherFunction{set, level, std::move(f)};
}

namespace {

// Dense values of R_{1..levels,E} restricted to E, one column per level.
RealMatrix rademacher_columns(const MeasurableSet& set, int levels)
{
    const auto m = static_cast<Eigen::Index>(set.size());
    RealMatrix r(m, levels);
    const double amplitude = 1.0 / std::sqrt(set.measure());
    for (int k = 1; k <= levels; ++k) {
        const std::size_t piece = set.size() >> k;
        for (Eigen::Index p = 0; p < m; ++p) {
            r(p, k - 1) = ((static_cast<std::size_t>(p) / piece) % 2 == 1) ? -amplitude : amplitude;
        }
    }
    return r;
}

// ||K R_k|| + ||K* R_k|| for every level k the grid supports. Only the
// rows and columns of K that meet E are touched, streamed in blocks.
RealVector decay_sums(const KernelSource& kernel, const MeasurableSet& set, int levels)
{
    const auto& space = set.space();
    const auto& cells = set.cells();
    const auto n = static_cast<Eigen::Index>(space.cell_count());
    const auto m = static_cast<Eigen::Index>(cells.size());
    const double h = space.cell_measure();
    const RealMatrix r = rademacher_columns(set, levels);

    RealVector forward = RealVector::Zero(levels);
    RealVector adjoint = RealVector::Zero(levels);
    constexpr Eigen::Index kBlock = 64;
    Matrix column_block(kBlock, m);
    Matrix row_block(kBlock, m);
    for (Eigen::Index start = 0; start < n; start += kBlock) {
        const Eigen::Index rows = std::min(kBlock, n - start);
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto cj = cells[static_cast<std::size_t>(j)];
            for (Eigen::Index i = 0; i < rows; ++i) {
                const auto x = static_cast<std::size_t>(start + i);
                column_block(i, j) = kernel.at(space, x, cj);
                // K*(x, y) = conj(K(y, x))
                row_block(i, j) = std::conj(kernel.at(space, cj, x));
            }
        }
        const Matrix kr = column_block.topRows(rows) * r.cast<Complex>() * h;
        const Matrix ksr = row_block.topRows(rows) * r.cast<Complex>() * h;
        forward += kr.colwise().squaredNorm().transpose();
        adjoint += ksr.colwise().squaredNorm().transpose();
    }
    return ((forward * h).cwiseSqrt() + (adjoint * h).cwiseSqrt()).eval();
}

}  // namespace

IndexSelection select_index(const KernelSource& kernel, const MeasurableSet& set, int n, int depth_max)
{
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "band index must be >= 1");
    if (set.empty()) throw Error(ErrorKind::InvalidArgument, "index selection needs a set of positive measure");
    const double tolerance = 1.0 / n;
    double best = std::numeric_limits<double>::infinity();
    MeasurableSet current = set;
    while (true) {
        const int levels = max_rademacher_level(current);
        if (levels > 0) {
            const RealVector sums = decay_sums(kernel, current, levels);
            for (int k = 1; k <= levels; ++k) {
                const double achieved = sums[k - 1];
                best = std::min(best, achieved);
                if (achieved <= tolerance) return IndexSelection{k, achieved, current};
            }
        }
        if (current.space().depth() >= depth_max || current.space().depth() >= MeasureSpace::kMaxDepth) break;
        current = current.refined();
    }
    throw Error(ErrorKind::ToleranceUnreachable,
                "no Rademacher level reaches ||K R|| + ||K* R|| <= " + std::to_string(tolerance) + " up to depth " +
                    std::to_string(depth_max) + " (best " + std::to_string(best) + ")",
                best);
}

IndexSelection select_index(const GridKernel& kernel, const MeasurableSet& set, int n, int depth_max)
{
    if (!(kernel.space == set.space())) throw Error(ErrorKind::SpaceMismatch, "select_index: kernel and set grids differ");
    return select_index(KernelSource::from_grid(kernel), set, n, depth_max);
}

namespace {

struct Attempt {
    bool complete = false;
    int refine_to = 0;
    KorotkovSequence sequence;
};

Attempt attempt_at(const FunctionSource& coefficient, const KernelSource& kernel, Complex alpha,
                   const MeasureSpace& space, const SequenceOptions& options)
{
    Attempt attempt{false, 0, KorotkovSequence{space, alpha, {}, {}, {}, {}, {}}};
    auto& seq = attempt.sequence;
    const GridFunction h = coefficient.sample(space);
    for (int n = 1; n <= options.count + 1; ++n) seq.epsilons.push_back(options.eps0 * std::pow(options.ratio, n));

    Vector shifted = h.values.array() - alpha;
    for (int n = 1; n <= options.count; ++n) {
        const double hi = seq.epsilons[static_cast<std::size_t>(n - 1)];
        const double lo = seq.epsilons[static_cast<std::size_t>(n)];
        MeasurableSet band = band_set(h, alpha, lo, hi);
        if (band.empty()) {
            throw Error(ErrorKind::EmptyBand,
                        "band " + std::to_string(n) + " (" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] of |H - alpha| holds no cell at depth " + std::to_string(space.depth()) +
                            "; refine the grid or change eps0/ratio",
                        n);
        }
        const IndexSelection sel = select_index(kernel, band, n, options.depth_max);
        if (sel.set.space().depth() > space.depth()) {
            // Band membership must be re-decided at the finer cell centers.
            attempt.refine_to = sel.set.space().depth();
            return attempt;
        }
        RademacherFunction r = rademacher(band, sel.k);
        const double s1 = GridFunction(space, shifted.cwiseProduct(r.values.values)).norm();
        const double s1_adj = GridFunction(space, shifted.conjugate().cwiseProduct(r.values.values)).norm();
        BandDiagnostics diag{hi, lo, s1, s1_adj, 0.0, 0.0};
        // Recompute the K-norms of the chosen function directly (independent of the block sweep).
        {
            const auto& cells = band.cells();
            const auto m = static_cast<Eigen::Index>(cells.size());
            const auto nc = static_cast<Eigen::Index>(space.cell_count());
            const double cell = space.cell_measure();
            Vector kr = Vector::Zero(nc);
            Vector ksr = Vector::Zero(nc);
            for (Eigen::Index j = 0; j < m; ++j) {
                const auto cj = cells[static_cast<std::size_t>(j)];
                const Complex rv = r.values.values[static_cast<Eigen::Index>(cj)];
                for (Eigen::Index i = 0; i < nc; ++i) {
                    kr[i] += kernel.at(space, static_cast<std::size_t>(i), cj) * rv;
                    ksr[i] += std::conj(kernel.at(space, cj, static_cast<std::size_t>(i))) * rv;
                }
            }
            diag.norm_s2 = std::sqrt(kr.squaredNorm() * cell) * cell;
            diag.norm_s2_adjoint = std::sqrt(ksr.squaredNorm() * cell) * cell;
        }
        seq.bands.push_back(std::move(band));
        seq.depths.push_back(sel.k);
        seq.functions.push_back(std::move(r.values));
        seq.diagnostics.push_back(diag);
    }
    attempt.complete = true;
    return attempt;
}

}  // namespace

KorotkovSequence build_sequence(const FunctionSource& coefficient, const KernelSource& kernel, Complex alpha,
                                const MeasureSpace& start, const SequenceOptions& options)
{
    if (options.count < 1) throw Error(ErrorKind::InvalidArgument, "sequence needs at least one band");
    if (!(options.eps0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps0 must be positive");
    if (!(options.ratio > 0.0 && options.ratio < 1.0)) throw Error(ErrorKind::InvalidArgument, "ratio must lie in (0, 1)");
    if (options.depth_max < start.depth()) throw Error(ErrorKind::InvalidArgument, "depth_max is below the starting depth");

    MeasureSpace space = start;
    while (true) {
        Attempt attempt = attempt_at(coefficient, kernel, alpha, space, options);
        if (attempt.complete) return std::move(attempt.sequence);
        space = MeasureSpace(attempt.refine_to);
    }
}

nlohmann::json cell_runs(const MeasurableSet& set)
{
    auto runs = nlohmann::json::array();
    const auto& cells = set.cells();
    std::size_t i = 0;
    while (i < cells.size()) {
        std::size_t j = i;
        while (j + 1 < cells.size() && cells[j + 1] == cells[j] + 1) ++j;
        runs.push_back({cells[i], cells[j]});
        i = j + 1;
    }
    return runs;
}

nlohmann::json to_json(const KorotkovSequence& sequence)
{
    nlohmann::json bands = nlohmann::json::array();
    for (std::size_t n = 0; n < sequence.size(); ++n) {
        const auto& d = sequence.diagnostics[n];
        bands.push_back({
            {"n", n + 1},
            {"epsilon", d.epsilon},
            {"epsilon_next", d.epsilon_next},
            {"band_cells", cell_runs(sequence.bands[n])},
            {"band_measure", sequence.bands[n].measure()},
            {"k", sequence.depths[n]},
            {"norm_S1", d.norm_s1},
            {"norm_S1_adjoint", d.norm_s1_adjoint},
            {"norm_S2", d.norm_s2},
            {"norm_S2_adjoint", d.norm_s2_adjoint},
            {"norm_S2_sum", d.norm_s2_sum()},
        });
    }
    return {
        {"depth", sequence.space.depth()},
        {"alpha", {sequence.alpha.real(), sequence.alpha.imag()}},
        {"bands", std::move(bands)},
    };
}

}  // namespace kinf
