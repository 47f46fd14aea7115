#pragma once

#include <optional>

#include <json.hpp>

#include "kinf/kernel.hpp"
#include "kinf/rademacher.hpp"
#include "kinf/unitary.hpp"

namespace kinf {

/// H(x) phi(x) - lambda int K(x, y) phi(y) dmu(y) = psi(x) on the grid.
struct ThirdKindProblem {
    GridFunction coefficient;
    GridKernel kernel;
    Complex lambda;
    GridFunction rhs;
};

/// psi = H phi - lambda K phi, using the problem's coefficient, kernel and lambda.
GridFunction forward_third_kind(const ThirdKindProblem& problem, const GridFunction& phi);

/*
 * Data of the reduced second-kind equation
 *     alpha f + (T0 - lambda T) f = g,
 * with A0 the matrix of H - alpha I and A the matrix of K in the paired bases.
 * Neither matrix depends on lambda.
 */
struct KernelPencil {
    Complex alpha;
    CoefficientMatrix a0;
    CoefficientMatrix a;
    SmoothBasis basis;

    Eigen::Index size() const noexcept { return a.size(); }
    /// alpha I + A0 - lambda A.
    Matrix system(Complex lambda) const;
    /// A0 - lambda A.
    Matrix pencil(Complex lambda) const { return a0.entries - lambda * a.entries; }
    BilinearKernel kernel(Complex lambda) const;
};

struct Reduction {
    KernelPencil pencil;
    Vector g;
};

Reduction reduce(const ThirdKindProblem& problem, Complex alpha, const KorotkovSequence& sequence,
                 const UnitarySurrogate& unitary);

struct SecondKindSolution {
    Vector c;
    double residual;    // ||S c - g|| / ||g|| (0 when g = 0)
    double condition;   // 1-norm condition estimate of S
};

/// Solves (alpha I + A0 - lambda A) c = g; NearSingular when the condition estimate exceeds 1e12.
SecondKindSolution solve_second_kind(const KernelPencil& pencil, Complex lambda, const Vector& g);

inline constexpr double kNearSingularCondition = 1e12;

/*
 * First-kind form of an alpha = 0 reduction: both sides multiplied by the
 * positive function m, so the kernels become Gamma0 = m T0, Gamma = m T and
 * the right side w = M g.
 */
struct FirstKindProblem {
    KernelPencil pencil;
    Multiplier multiplier;
    RealMatrix m;
    Vector w;
    BilinearKernel gamma0;
    BilinearKernel gamma;
};

FirstKindProblem make_first_kind(const KernelPencil& pencil, const Multiplier& multiplier, const Vector& g,
                                 std::optional<std::size_t> quad_nodes = std::nullopt);

struct FirstKindSolution {
    Vector c;
    double discarded_energy;   // share of ||w||^2 in the discarded singular directions
    Eigen::Index rank;         // singular values kept
};

/// Truncated-spectral solve of M (A0 - lambda A) c = w, discarding singular values below cutoff * sigma_max.
FirstKindSolution solve_first_kind(const FirstKindProblem& problem, Complex lambda, double cutoff);

inline constexpr double kDefaultCutoff = 1e-10;

/// Bound for the Hilbert-Schmidt norm of m T: sup_s ||t(s)|| ||m||, with slack for the probe-grid sup.
struct HilbertSchmidtBound {
    double hs_norm;            // Frobenius norm of M A (truncated kernel)
    double hs_norm_pointwise;  // L^2 norm of m(s) T(s, t) itself
    double carleman_sup;       // probe-grid max of ||t(s)||
    double multiplier_norm;    // ||m||
    double slack;              // (h/2) max ||t'(s)|| ||m||: covers the gap between probe max and true sup
    double bound() const { return carleman_sup * multiplier_norm + slack; }
    bool holds() const { return hs_norm_pointwise <= bound() && hs_norm <= bound(); }
};

HilbertSchmidtBound hilbert_schmidt_bound(const BilinearKernel& plain, const Multiplier& m, const ProbeGrid& probe);

struct VerifyOptions {
    double tolerance = 1e-9;
    double cutoff = kDefaultCutoff;
    ProbeGrid probe{};
    Multiplier multiplier = Multiplier::gaussian();
};

struct FirstKindReport {
    double identity_residual;   // ||M (A0 - lambda A) f - M g|| / ||M g||
    HilbertSchmidtBound hs;
    double discarded_energy;
    Eigen::Index rank;          // singular values kept by the solve
    Eigen::Index size;
    double recovery_error;      // ||c - f|| / ||f|| for the truncated-spectral solve
    double decay_first_quarter; // max ||(M A)* u_n|| over the first quarter of indices
    double decay_last_quarter;  // same over the last quarter
    double column_first_quarter;  // max ||(M A) u_n||, first quarter (reported only)
    double column_last_quarter;

    bool truncated() const { return rank < size; }
};

struct EquivalenceReport {
    double passage_residual;    // ||alpha f + (A0 - lambda A) f - U psi|| / ||U psi||
    double round_trip_error;    // ||U^{-1} U phi - phi|| / ||phi||
    std::optional<double> condition;
    double hs_norm;             // of the pencil kernel T0 - lambda T
    double carleman_sup;
    double tail_sup;
    bool projected;
    std::optional<FirstKindReport> first_kind;
    double tolerance;

    bool passed() const;
    nlohmann::json to_json() const;
};

/*
 * Manufactures psi = forward_third_kind(problem, phi), reduces, and measures
 * the second-kind identity at f = U phi together with the round trip of U.
 * For alpha = 0 the multiplied first-kind identity, the Hilbert-Schmidt
 * bound, a truncated-spectral recovery of f and the column-decay witness of
 * the compact family {M T0, M T} are reported as well.
 */
EquivalenceReport verify_equivalence(const ThirdKindProblem& problem, Complex alpha, const KorotkovSequence& sequence,
                                     const UnitarySurrogate& unitary, const GridFunction& phi,
                                     const VerifyOptions& options = {});

/// max column norm of (M A)* over the first and the last quarter of basis indices.
std::pair<double, double> adjoint_column_decay(const Matrix& multiplied);

/// max column norm of M A itself over the first and the last quarter of basis indices.
std::pair<double, double> column_decay(const Matrix& multiplied);

}  // namespace kinf
