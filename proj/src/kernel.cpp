#include "kinf/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kinf {

namespace {

double binomial(int n, int k)
{
    double c = 1.0;
    for (int r = 1; r <= k; ++r) c = c * (n - k + r) / r;
    return c;
}

void require_order(int order)
{
    if (order < 0) throw Error(ErrorKind::InvalidArgument, "derivative orders must be non-negative");
}

// d^i/ds^i of (m(s) u_n(s)) for every n, or of u_n(s) when no multiplier is attached.
RealVector left_factor(const BilinearKernel& kernel, int i, double s)
{
    const RealMatrix table = kernel.basis.derivative_table(i, s);
    if (!kernel.multiplier) return table.row(i).transpose();
    const RealVector md = kernel.multiplier->derivatives(i, s);
    RealVector out = RealVector::Zero(table.cols());
    for (int r = 0; r <= i; ++r) out += binomial(i, r) * md[i - r] * table.row(r).transpose();
    return out;
}

RealVector right_factor(const BilinearKernel& kernel, int j, double t) { return kernel.basis.values(j, t); }

RealMatrix left_factors(const BilinearKernel& kernel, int i, std::span<const double> s)
{
    RealMatrix out(static_cast<Eigen::Index>(s.size()), kernel.size());
    for (std::size_t k = 0; k < s.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = left_factor(kernel, i, s[k]).transpose();
    return out;
}

RealMatrix right_factors(const BilinearKernel& kernel, int j, std::span<const double> t)
{
    RealMatrix out(static_cast<Eigen::Index>(t.size()), kernel.size());
    for (std::size_t k = 0; k < t.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = right_factor(kernel, j, t[k]).transpose();
    return out;
}

}  // namespace

BilinearKernel synthesize(const CoefficientMatrix& a, const SmoothBasis& basis)
{
    if (a.entries.rows() != a.entries.cols() || static_cast<std::size_t>(a.entries.rows()) != basis.size()) {
        throw Error(ErrorKind::InvalidArgument, "coefficient matrix is " + std::to_string(a.entries.rows()) + "x" +
                                                    std::to_string(a.entries.cols()) + " for a basis of " +
                                                    std::to_string(basis.size()));
    }
    return BilinearKernel{a, basis, std::nullopt, std::nullopt};
}

Complex eval_kernel(const BilinearKernel& kernel, int i, int j, double s, double t)
{
    require_order(i);
    require_order(j);
    const RealVector left = left_factor(kernel, i, s);
    const RealVector right = right_factor(kernel, j, t);
    // Hermite functions are real, so conj(u_n^{(j)}(t)) = u_n^{(j)}(t).
    return left.cast<Complex>().transpose() * kernel.coefficients.entries * right.cast<Complex>();
}

Matrix sample_kernel(const BilinearKernel& kernel, int i, int j, std::span<const double> s, std::span<const double> t)
{
    require_order(i);
    require_order(j);
    const RealMatrix left = left_factors(kernel, i, s);
    const RealMatrix right = right_factors(kernel, j, t);
    return left.cast<Complex>() * kernel.coefficients.entries * right.cast<Complex>().transpose();
}

Vector carleman(const BilinearKernel& kernel, CarlemanSide side, int order, double x)
{
    require_order(order);
    if (side == CarlemanSide::Row) {
        const RealVector left = left_factor(kernel, order, x);
        return (kernel.coefficients.entries.transpose() * left.cast<Complex>()).conjugate();
    }
    // Column side of m(s) T(s, t) is M applied to the plain column: the operator coefficients M A.
    return kernel.operator_coefficients() * right_factor(kernel, order, x).cast<Complex>();
}

MFactorization m_factorize(const CoefficientMatrix& a)
{
    const Matrix& t = a.entries;
    const Eigen::Index n = t.cols();
    if (n == 0) return MFactorization{Matrix(t.rows(), 0), Matrix(0, 0)};
    // |T|^2 = T*T = Y diag(lambda) Y*. The singular value on y_k is taken as
    // ||T y_k||, which equals sqrt(max(lambda_k, 0)) in exact arithmetic and
    // keeps W V* = sum_k T y_k y_k* = T exact for any orthonormal Y.
    Eigen::SelfAdjointEigenSolver<Matrix> solver(t.adjoint() * t);
    const Matrix& y = solver.eigenvectors();
    const Matrix ty = t * y;
    RealVector sigma(n);
    Matrix x = Matrix::Zero(t.rows(), n);
    for (Eigen::Index k = 0; k < n; ++k) {
        sigma[k] = ty.col(k).norm();
        if (sigma[k] > 0.0) x.col(k) = ty.col(k) / sigma[k];
    }
    const RealVector root = sigma.cwiseSqrt();
    Matrix p = y * root.cast<Complex>().asDiagonal() * y.adjoint();
    p = (0.5 * (p + p.adjoint())).eval();
    // U_pol = sum_{sigma_k > 0} x_k y_k*, zero on the null space; W = U_pol P.
    Matrix w = x * root.cast<Complex>().asDiagonal() * y.adjoint();
    return MFactorization{std::move(w), std::move(p)};
}

SeriesConsistency series_consistency(const BilinearKernel& kernel, const MFactorization& factorization, int i, int j,
                                     double s, double t)
{
    require_order(i);
    require_order(j);
    if (factorization.W.cols() != kernel.size() || factorization.V.cols() != kernel.size()) {
        throw Error(ErrorKind::InvalidArgument, "factorization and kernel sizes differ");
    }
    const Vector left = factorization.W.transpose() * left_factor(kernel, i, s).cast<Complex>();
    const Vector right = factorization.V.transpose() * right_factor(kernel, j, t).cast<Complex>();
    SeriesConsistency out{eval_kernel(kernel, i, j, s, t), 0.0, {}};
    out.abs_partial_sums.reserve(static_cast<std::size_t>(left.size()));
    double running = 0.0;
    for (Eigen::Index n = 0; n < left.size(); ++n) {
        const Complex term = left[n] * std::conj(right[n]);
        out.via_factorization += term;
        running += std::abs(term);
        out.abs_partial_sums.push_back(running);
    }
    return out;
}

BilinearKernel scale_by_multiplier(const BilinearKernel& kernel, const Multiplier& m, const RealMatrix& multiplier_matrix)
{
    if (kernel.multiplier) throw Error(ErrorKind::InvalidArgument, "kernel already carries a multiplier");
    if (multiplier_matrix.rows() != kernel.size() || multiplier_matrix.cols() != kernel.size()) {
        throw Error(ErrorKind::InvalidArgument, "multiplier matrix and kernel sizes differ");
    }
    BilinearKernel out = kernel;
    out.multiplier = m;
    out.multiplied = CoefficientMatrix{multiplier_matrix.cast<Complex>() * kernel.coefficients.entries};
    return out;
}

double hs_norm(const BilinearKernel& kernel) { return kernel.operator_coefficients().norm(); }

double hs_norm_pointwise(const BilinearKernel& kernel)
{
    if (!kernel.multiplier) return kernel.coefficients.entries.norm();
    if (kernel.multiplier->kind() == Multiplier::Kind::Unit) return kernel.coefficients.entries.norm();
    // int int m(s)^2 |T(s,t)|^2 = trace(A* M2 A) with M2 the matrix of m^2.
    const RealMatrix m2 = multiplier_matrix(kernel.multiplier->squared(), kernel.basis,
                                            default_quadrature_nodes(kernel.basis.size()));
    const Matrix& a = kernel.coefficients.entries;
    const Complex tr = (a.adjoint() * m2.cast<Complex>() * a).trace();
    return std::sqrt(std::max(tr.real(), 0.0));
}

std::vector<double> ProbeGrid::nodes() const
{
    if (points < 1) throw Error(ErrorKind::InvalidArgument, "probe grid needs at least one point");
    if (points == 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(points));
    const double step = spacing();
    for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = lo + step * k;
    out.back() = hi;
    return out;
}

double carleman_sup(const BilinearKernel& kernel, const ProbeGrid& probe, CarlemanSide side, int order)
{
    double sup = 0.0;
    for (double x : probe.nodes()) sup = std::max(sup, carleman(kernel, side, order, x).norm());
    return sup;
}

double tail_sup(const BilinearKernel& kernel, const MFactorization& factorization, const ProbeGrid& probe)
{
    const std::vector<double> nodes = probe.nodes();
    const Eigen::Index n = kernel.size();
    const Eigen::Index first = n / 2;
    const Eigen::Index count = n - first;
    if (count == 0) return 0.0;
    const RealMatrix left = left_factors(kernel, 0, nodes);
    const RealMatrix right = right_factors(kernel, 0, nodes);
    const RealMatrix ws = (left.cast<Complex>() * factorization.W).rightCols(count).cwiseAbs();
    const RealMatrix vt = (right.cast<Complex>() * factorization.V).rightCols(count).cwiseAbs();
    return (ws * vt.transpose()).maxCoeff();
}

double vanishing_defect(const BilinearKernel& kernel, double radius, const ProbeGrid& probe)
{
    std::vector<double> others = probe.nodes();
    others.push_back(-radius);
    others.push_back(radius);
    const std::vector<double> edge{-radius, radius};
    double worst = sample_kernel(kernel, 0, 0, edge, others).cwiseAbs().maxCoeff();
    worst = std::max(worst, sample_kernel(kernel, 0, 0, others, edge).cwiseAbs().maxCoeff());
    for (double x : edge) {
        worst = std::max(worst, carleman(kernel, CarlemanSide::Row, 0, x).norm());
        worst = std::max(worst, carleman(kernel, CarlemanSide::Column, 0, x).norm());
    }
    return worst;
}

double vanishing_radius(std::size_t basis_size) { return 8.0 + std::sqrt(2.0 * static_cast<double>(basis_size)); }

}  // namespace kinf
