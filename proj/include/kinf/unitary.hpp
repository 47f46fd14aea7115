#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "kinf/measure_space.hpp"
#include "kinf/rademacher.hpp"
#include "kinf/smooth_basis.hpp"

namespace kinf {

/// Matrix of an operator S in a pair of orthonormal bases: a_{mn} = <S b_n, b_m>.
struct CoefficientMatrix {
    Matrix entries;

    Eigen::Index size() const noexcept { return entries.rows(); }
    static CoefficientMatrix zero(Eigen::Index n) { return {Matrix::Zero(n, n)}; }
    static CoefficientMatrix identity(Eigen::Index n) { return {Matrix::Identity(n, n)}; }
};

/*
 * Bounded operators on the grid space that the reduction needs: identity,
 * multiplication by a grid function, and an integral kernel, each optionally
 * taken as its adjoint.
 */
class GridOperator {
public:
    struct Identity {};

    static GridOperator identity(const MeasureSpace& space);
    static GridOperator multiplication(GridFunction factor);
    static GridOperator integral(GridKernel kernel);

    const MeasureSpace& space() const noexcept { return space_; }
    GridOperator adjoint() const;

    /// Applies the operator to every column of `columns` (grid values, one function per column).
    Matrix apply(const Matrix& columns) const;
    GridFunction apply(const GridFunction& f) const;

private:
    GridOperator(MeasureSpace space, std::variant<Identity, GridFunction, GridKernel> op)
        : space_(space), op_(std::move(op)) {}

    MeasureSpace space_;
    std::variant<Identity, GridFunction, GridKernel> op_;
    bool adjoint_ = false;
};

/*
 * Orthonormal basis of the grid space whose first members are `leading`
 * (assumed orthonormal), completed by Gram-Schmidt over the cell indicators
 * in index order. Indicators already in the span (residual below 1e-10) are
 * skipped. Two passes of classical Gram-Schmidt keep the result orthonormal
 * to rounding.
 */
std::vector<GridFunction> complete_basis(std::span<const GridFunction> leading, const MeasureSpace& space);
std::vector<GridFunction> complete_basis(const KorotkovSequence& sequence);

/*
 * Finite surrogate of the unitary map U : L^2(Y, mu) -> L^2(R): the grid
 * basis b_n is sent to the Hermite function u_n. With N equal to the cell
 * count the map is unitary up to rounding; with fewer members it is the
 * orthogonal projection onto span{b_0..b_{N-1}} followed by the pairing, and
 * `projected()` is set.
 */
class UnitarySurrogate {
public:
    UnitarySurrogate(MeasureSpace space, std::vector<GridFunction> b_basis);

    /// Korotkov sequence first, then the completion; basis_size defaults to the full cell count.
    static UnitarySurrogate build(const KorotkovSequence& sequence, std::optional<std::size_t> basis_size = std::nullopt);

    const MeasureSpace& space() const noexcept { return space_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(b_.cols()); }
    bool projected() const noexcept { return size() < space_.cell_count(); }
    const SmoothBasis& basis() const noexcept { return basis_; }

    /// Grid values of b_0 .. b_{N-1}, one per column.
    const Matrix& b_matrix() const noexcept { return b_; }
    GridFunction b(std::size_t n) const;

    /// c_n = <phi, b_n>.
    Vector forward(const GridFunction& phi) const;
    /// sum_n c_n b_n.
    GridFunction inverse(const Vector& coefficients) const;

    /// max |G - I| for the Gram matrix of the grid basis.
    double gram_defect() const;

private:
    MeasureSpace space_;
    Matrix b_;
    SmoothBasis basis_;
};

Vector apply_forward(const UnitarySurrogate& u, const GridFunction& phi);
GridFunction apply_inverse(const UnitarySurrogate& u, const Vector& coefficients);

/// a_{mn} = <S b_n, b_m> over the grid basis held column-wise in `b_basis`.
CoefficientMatrix matrix_elements(const GridOperator& op, const Matrix& b_basis);
CoefficientMatrix matrix_elements(const GridOperator& op, const UnitarySurrogate& u);

}  // namespace kinf
