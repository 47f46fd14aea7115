#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kinf/smooth_basis.hpp"
#include "kinf/unitary.hpp"

namespace kinf {

/*
 * Kernel on R^2 given by the bilinear series
 *
 *     T(s, t) = sum_{m,n} a_{mn} u_m(s) conj(u_n(t))
 *
 * over the Hermite basis. When a multiplier m is attached the kernel is
 * Gamma(s, t) = m(s) T(s, t); pointwise values then use m exactly, and the
 * coefficient form M A (M the multiplier matrix) is kept for the
 * Hilbert-Schmidt and operator views, which truncate m u_m to the basis.
 */
struct BilinearKernel {
    CoefficientMatrix coefficients;
    SmoothBasis basis;
    std::optional<Multiplier> multiplier;
    std::optional<CoefficientMatrix> multiplied;

    Eigen::Index size() const noexcept { return coefficients.size(); }
    /// Coefficient matrix of the operator view: A, or M A with a multiplier.
    const Matrix& operator_coefficients() const noexcept
    {
        return multiplied ? multiplied->entries : coefficients.entries;
    }
};

BilinearKernel synthesize(const CoefficientMatrix& a, const SmoothBasis& basis);

/// d^{i+j} T / ds^i dt^j at (s, t); Leibniz expansion in s when a multiplier is attached.
Complex eval_kernel(const BilinearKernel& kernel, int i, int j, double s, double t);

/// Same quantity on a tensor grid: rows follow `s`, columns follow `t`.
Matrix sample_kernel(const BilinearKernel& kernel, int i, int j, std::span<const double> s, std::span<const double> t);

enum class CarlemanSide { Row, Column };

/*
 * Coefficients in {u_n} of the Carleman functions
 *   Row:    t^{(order)}(x),   t(s)  = conj(T(s, .)),  component n = conj(sum_m a_{mn} u_m^{(order)}(x))
 *   Column: t'^{(order)}(x),  t'(t) = T(., t),        component m = sum_n a_{mn} conj(u_n^{(order)}(x))
 * With a multiplier the row side uses the Leibniz form (exact) and the column
 * side applies M to the plain column vector (truncated).
 */
Vector carleman(const BilinearKernel& kernel, CarlemanSide side, int order, double x);

/// T = W V*, W = U_pol P, V = P with P = |T|^{1/2} and U_pol the partial isometry of the polar decomposition.
struct MFactorization {
    Matrix W;
    Matrix V;

    double reconstruction_error(const Matrix& a) const { return (a - W * V.adjoint()).norm(); }
};

MFactorization m_factorize(const CoefficientMatrix& a);

struct SeriesConsistency {
    Complex direct;
    Complex via_factorization;
    std::vector<double> abs_partial_sums;
};

/// Compares eval_kernel with sum_n [W u_n]^{(i)}(s) conj([V u_n]^{(j)}(t)) (with m applied for multiplier kernels).
SeriesConsistency series_consistency(const BilinearKernel& kernel, const MFactorization& factorization, int i, int j,
                                     double s, double t);

BilinearKernel scale_by_multiplier(const BilinearKernel& kernel, const Multiplier& m, const RealMatrix& multiplier_matrix);

/// Frobenius norm of the operator coefficients (the L^2(R^2) norm of the truncated kernel).
double hs_norm(const BilinearKernel& kernel);

/// L^2(R^2) norm of the pointwise kernel m(s) T(s, t); equals hs_norm without a multiplier.
double hs_norm_pointwise(const BilinearKernel& kernel);

/// Uniform probe grid on [lo, hi] (same nodes on both axes).
struct ProbeGrid {
    double lo = -8.0;
    double hi = 8.0;
    int points = 41;

    std::vector<double> nodes() const;
    double spacing() const { return points > 1 ? (hi - lo) / (points - 1) : 0.0; }
};

/// max over the probe nodes of ||carleman(side, order, x)||.
double carleman_sup(const BilinearKernel& kernel, const ProbeGrid& probe, CarlemanSide side = CarlemanSide::Row,
                    int order = 0);

/// max over the probe grid of sum_{n >= N/2} |[W u_n](s) conj([V u_n](t))| (m(s) applied for multiplier kernels).
double tail_sup(const BilinearKernel& kernel, const MFactorization& factorization, const ProbeGrid& probe);

/*
 * Largest of |T(s, t)| with one coordinate at +-radius and the other on the
 * probe nodes (or at +-radius), and of the row and column Carleman norms at
 * +-radius. A finite witness of vanishing at infinity.
 */
double vanishing_defect(const BilinearKernel& kernel, double radius, const ProbeGrid& probe);

/// Probe radius 8 + sqrt(2N) used for the vanishing-at-infinity checks.
double vanishing_radius(std::size_t basis_size);

}  // namespace kinf
