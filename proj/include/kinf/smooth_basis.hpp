#pragma once

#include <cstddef>
#include <vector>

#include "kinf/types.hpp"

namespace kinf {

/*
 * Orthonormal basis {u_n} of L^2(R) made of Hermite functions
 *
 *     u_n(s) = (2^n n! sqrt(pi))^{-1/2} H_n(s) exp(-s^2 / 2).
 *
 * Values come from the three-term recurrence
 *     u_{n+1} = sqrt(2/(n+1)) s u_n - sqrt(n/(n+1)) u_{n-1},
 * run with a floating exponent so that large |s| neither underflows nor
 * overflows, and derivatives of every order from
 *     u_n' = sqrt(n/2) u_{n-1} - sqrt((n+1)/2) u_{n+1}.
 * No numerical differentiation is involved.
 */
class SmoothBasis {
public:
    explicit SmoothBasis(std::size_t size);

    std::size_t size() const noexcept { return size_; }

    /// i-th derivative of u_n at s.
    double value(std::size_t n, int order, double s) const;

    /// (u_0^{(order)}(s), ..., u_{N-1}^{(order)}(s)).
    RealVector values(int order, double s) const;

    /// Row r = derivative of order r, for r = 0 .. max_order.
    RealMatrix derivative_table(int max_order, double s) const;

    /// Hermite function values u_0 .. u_{count-1} at s (count may exceed size()).
    static RealVector hermite_functions(std::size_t count, double s);

private:
    std::size_t size_;
};

double basis_value(const SmoothBasis& basis, std::size_t n, int order, double s);

/*
 * Positive multiplier m for the first-kind reduction. The default is the
 * Gaussian m(s) = exp(-s^2 / (2 w^2)), which is smooth, square integrable,
 * and has every derivative vanishing at infinity. The unit multiplier m = 1 is
 * kept for identity checks only: it is not square integrable.
 */
class Multiplier {
public:
    enum class Kind { Gaussian, Unit };

    static Multiplier gaussian(double width = 1.0);
    static Multiplier unit();

    Kind kind() const noexcept { return kind_; }
    double width() const noexcept { return width_; }

    double value(double s) const;
    double derivative(int order, double s) const;
    /// m(s), m'(s), ..., m^{(max_order)}(s).
    RealVector derivatives(int max_order, double s) const;

    /// ||m||_{L^2}; +inf for the unit multiplier.
    double l2_norm() const;

    /// m^2 as a multiplier of the same family.
    Multiplier squared() const;

private:
    Multiplier(Kind kind, double width) : kind_(kind), width_(width) {}

    Kind kind_;
    double width_;
};

/// Gauss-Hermite rule for integrals over R of functions that decay like
/// exp(-s^2): nodes x_k and weights omega_k with
///     int F(s) ds ~= sum_k omega_k F(x_k),
/// exact when F = p(s) exp(-s^2) with deg p <= 2Q - 1. The weights already
/// include the exp(x_k^2) factor, so they can be applied to products of
/// Hermite functions directly.
struct QuadratureRule {
    RealVector nodes;
    RealVector weights;
};

QuadratureRule gauss_hermite(std::size_t points);

/// Default node count for multiplier_matrix on a basis of this size.
std::size_t default_quadrature_nodes(std::size_t basis_size);

/*
 * M_{pq} = int m(s) u_q(s) u_p(s) ds, the matrix of multiplication by m in
 * the basis. Self-check: the same rule applied to u_p u_q must reproduce the
 * identity to 1e-10, otherwise QuadratureInsufficient is thrown.
 */
RealMatrix multiplier_matrix(const Multiplier& m, const SmoothBasis& basis, std::size_t quad_nodes);

}  // namespace kinf
