#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "kinf/measure_space.hpp"

namespace kinf {

/*
 * Generalized Rademacher function R_{n,E}: split E by n rounds of
 * equal-measure bisection into 2^n pieces (in tree order), and take the
 * value +(mu E)^{-1/2} on even pieces, -(mu E)^{-1/2} on odd ones, zero off E.
 * Unit norm, zero mean, and R_{m,E} is orthogonal to R_{n,E} for m != n.
 */
struct RademacherFunction {
    MeasurableSet base_set;
    int level;
    GridFunction values;
};

/// Largest n for which R_{n,E} exists on the current grid (2-adic valuation of the cell count).
int max_rademacher_level(const MeasurableSet& set);

RademacherFunction rademacher(const MeasurableSet& set, int level);

struct IndexSelection {
    int k;                // Rademacher level reaching the tolerance
    double achieved;      // ||K R_{k,E}|| + ||K* R_{k,E}||
    MeasurableSet set;    // E on the grid where k was found (refined when the search needed it)
};

/*
 * Smallest k with ||K R_{k,E}|| + ||K* R_{k,E}|| <= 1/n. The search runs over
 * every level the current grid supports; when none reaches the tolerance the
 * grid is refined (depth + 1, E replaced by its children, K re-sampled) until
 * depth_max. Throws ToleranceUnreachable carrying the best sum seen.
 */
IndexSelection select_index(const KernelSource& kernel, const MeasurableSet& set, int n, int depth_max);
IndexSelection select_index(const GridKernel& kernel, const MeasurableSet& set, int n, int depth_max);

/// Operator norms along one band, all on the grid of the sequence.
struct BandDiagnostics {
    double epsilon;           // upper edge eps_n
    double epsilon_next;      // lower edge eps_{n+1}
    double norm_s1;           // ||(H - alpha) e_n||
    double norm_s1_adjoint;   // ||conj(H - alpha) e_n||
    double norm_s2;           // ||K e_n||
    double norm_s2_adjoint;   // ||K* e_n||
    double norm_s2_sum() const { return norm_s2 + norm_s2_adjoint; }
};

struct SequenceOptions {
    int count = 4;
    double eps0 = 1.0;
    double ratio = 0.5;
    int depth_max = 14;
};

/*
 * Orthonormal sequence e_n = R_{k_n, E_n} on the bands
 *   E_n = { eps_{n+1} < |H - alpha| <= eps_n },  eps_n = eps0 * ratio^n,
 * with ||(H - alpha) e_n|| <= eps_n and ||K e_n|| + ||K* e_n|| <= 1/n.
 * All members live on `space`, which may be finer than the starting grid.
 */
struct KorotkovSequence {
    MeasureSpace space;
    Complex alpha;
    std::vector<double> epsilons;   // eps_1 .. eps_{count+1}
    std::vector<MeasurableSet> bands;
    std::vector<int> depths;        // k_n
    std::vector<GridFunction> functions;
    std::vector<BandDiagnostics> diagnostics;

    std::size_t size() const noexcept { return functions.size(); }
};

KorotkovSequence build_sequence(const FunctionSource& coefficient, const KernelSource& kernel, Complex alpha,
                                const MeasureSpace& start, const SequenceOptions& options);

/// Maximal runs [first, last] of consecutive cells.
nlohmann::json cell_runs(const MeasurableSet& set);

/// Per-band report: epsilon, band_cells, k, norm_S1, norm_S2_sum (plus a few companions).
nlohmann::json to_json(const KorotkovSequence& sequence);

}  // namespace kinf
