#include "kinf/smooth_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace kinf {

namespace {

constexpr double kRescale = 1e150;

}  // namespace

SmoothBasis::SmoothBasis(std::size_t size) : size_(size)
{
    if (size == 0) throw Error(ErrorKind::InvalidArgument, "basis size must be positive");
}

RealVector SmoothBasis::hermite_functions(std::size_t count, double s)
{
    RealVector out = RealVector::Zero(static_cast<Eigen::Index>(count));
    if (count == 0) return out;
    // Scaled recurrence: true value = v * exp(log_scale).
    double v_prev = 0.0;
    double v = std::pow(std::numbers::pi, -0.25);
    double log_scale = -0.5 * s * s;
    const auto emit = [&](std::size_t n) {
        out[static_cast<Eigen::Index>(n)] = v == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(v)) + log_scale), v);
    };
    emit(0);
    for (std::size_t n = 0; n + 1 < count; ++n) {
        const double dn = static_cast<double>(n);
        const double v_next = std::sqrt(2.0 / (dn + 1.0)) * s * v - std::sqrt(dn / (dn + 1.0)) * v_prev;
        v_prev = v;
        v = v_next;
        if (std::abs(v) > kRescale) {
            v /= kRescale;
            v_prev /= kRescale;
            log_scale += std::log(kRescale);
        }
        emit(n + 1);
    }
    return out;
}

RealMatrix SmoothBasis::derivative_table(int max_order, double s) const
{
    if (max_order < 0) throw Error(ErrorKind::InvalidArgument, "derivative order must be non-negative");
    const auto n = static_cast<Eigen::Index>(size_);
    const auto orders = static_cast<Eigen::Index>(max_order);
    // d^r u_k for k < N + max_order - r; each order consumes one index at the top.
    RealVector level = hermite_functions(size_ + static_cast<std::size_t>(max_order), s);
    RealMatrix table(orders + 1, n);
    table.row(0) = level.head(n).transpose();
    for (Eigen::Index r = 1; r <= orders; ++r) {
        const Eigen::Index len = level.size() - 1;
        RealVector next(len);
        for (Eigen::Index k = 0; k < len; ++k) {
            const double dk = static_cast<double>(k);
            const double down = k > 0 ? std::sqrt(dk / 2.0) * level[k - 1] : 0.0;
            next[k] = down - std::sqrt((dk + 1.0) / 2.0) * level[k + 1];
        }
        level = std::move(next);
        table.row(r) = level.head(n).transpose();
    }
    return table;
}

RealVector SmoothBasis::values(int order, double s) const { return derivative_table(order, s).row(order).transpose(); }

double SmoothBasis::value(std::size_t n, int order, double s) const
{
    if (n >= size_) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
    return values(order, s)[static_cast<Eigen::Index>(n)];
}

double basis_value(const SmoothBasis& basis, std::size_t n, int order, double s) { return basis.value(n, order, s); }

Multiplier Multiplier::gaussian(double width)
{
    if (!(width > 0.0) || !std::isfinite(width)) throw Error(ErrorKind::InvalidArgument, "multiplier width must be positive");
    return Multiplier(Kind::Gaussian, width);
}

Multiplier Multiplier::unit() { return Multiplier(Kind::Unit, 0.0); }

double Multiplier::value(double s) const
{
    if (kind_ == Kind::Unit) return 1.0;
    const double x = s / width_;
    return std::exp(-0.5 * x * x);
}

RealVector Multiplier::derivatives(int max_order, double s) const
{
    if (max_order < 0) throw Error(ErrorKind::InvalidArgument, "derivative order must be non-negative");
    RealVector d = RealVector::Zero(max_order + 1);
    if (kind_ == Kind::Unit) {
        d[0] = 1.0;
        return d;
    }
    // m^{(j)}(s) = (-1/w)^j He_j(s/w) m(s), He the probabilists' Hermite polynomials.
    const double x = s / width_;
    const double m = value(s);
    double he_prev = 0.0;
    double he = 1.0;
    double factor = 1.0;
    for (int j = 0; j <= max_order; ++j) {
        d[j] = factor * he * m;
        const double he_next = x * he - j * he_prev;
        he_prev = he;
        he = he_next;
        factor *= -1.0 / width_;
    }
    return d;
}

double Multiplier::derivative(int order, double s) const { return derivatives(order, s)[order]; }

double Multiplier::l2_norm() const
{
    if (kind_ == Kind::Unit) return std::numeric_limits<double>::infinity();
    return std::sqrt(width_ * std::sqrt(std::numbers::pi));
}

Multiplier Multiplier::squared() const
{
    if (kind_ == Kind::Unit) return unit();
    return gaussian(width_ / std::sqrt(2.0));
}

QuadratureRule gauss_hermite(std::size_t points)
{
    if (points == 0) throw Error(ErrorKind::InvalidArgument, "quadrature needs at least one node");
    const auto q = static_cast<Eigen::Index>(points);
    // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
    // orthonormal Hermite polynomials.
    RealVector diag = RealVector::Zero(q);
    RealVector sub(std::max<Eigen::Index>(q - 1, 0));
    for (Eigen::Index k = 0; k + 1 < q; ++k) sub[k] = std::sqrt(static_cast<double>(k + 1) / 2.0);
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    RealVector nodes = solver.eigenvalues();

    RealVector weights(q);
    const double dq = static_cast<double>(points);
    for (Eigen::Index k = 0; k < q; ++k) {
        double x = nodes[k];
        for (int it = 0; it < 3; ++it) {
            const RealVector u = SmoothBasis::hermite_functions(points + 1, x);
            const double f = u[q];
            const double df = std::sqrt(2.0 * dq) * u[q - 1] - x * u[q];
            if (df == 0.0) break;
            x -= f / df;
        }
        nodes[k] = x;
        // Christoffel numbers written for Hermite functions: omega = 1 / sum_j u_j(x)^2.
        const RealVector u = SmoothBasis::hermite_functions(points, x);
        weights[k] = 1.0 / u.squaredNorm();
    }
    return QuadratureRule{std::move(nodes), std::move(weights)};
}

std::size_t default_quadrature_nodes(std::size_t basis_size) { return 2 * basis_size + 32; }

RealMatrix multiplier_matrix(const Multiplier& m, const SmoothBasis& basis, std::size_t quad_nodes)
{
    const QuadratureRule rule = gauss_hermite(quad_nodes);
    const auto q = static_cast<Eigen::Index>(quad_nodes);
    const auto n = static_cast<Eigen::Index>(basis.size());
    RealMatrix u(q, n);
    RealVector weighted(q);
    for (Eigen::Index k = 0; k < q; ++k) {
        u.row(k) = SmoothBasis::hermite_functions(basis.size(), rule.nodes[k]).transpose();
        weighted[k] = rule.weights[k] * m.value(rule.nodes[k]);
    }
    const RealMatrix gram = u.transpose() * rule.weights.asDiagonal() * u;
    const double defect = (gram - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (!(defect <= 1e-10)) {
        throw Error(ErrorKind::QuadratureInsufficient,
                    std::to_string(quad_nodes) + " quadrature nodes reproduce the basis Gram matrix only to " +
                        std::to_string(defect),
                    defect);
    }
    RealMatrix result = u.transpose() * weighted.asDiagonal() * u;
    // Symmetric by construction; remove the rounding asymmetry of the product.
    return (0.5 * (result + result.transpose())).eval();
}

}  // namespace kinf
