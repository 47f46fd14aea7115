#include "kinf/unitary.hpp"

#include <cmath>
#include <string>

namespace kinf {

namespace {

constexpr double kRankTolerance = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

GridOperator GridOperator::identity(const MeasureSpace& space) { return GridOperator(space, Identity{}); }

GridOperator GridOperator::multiplication(GridFunction factor)
{
    const MeasureSpace space = factor.space;
    return GridOperator(space, std::move(factor));
}

GridOperator GridOperator::integral(GridKernel kernel)
{
    const MeasureSpace space = kernel.space;
    return GridOperator(space, std::move(kernel));
}

GridOperator GridOperator::adjoint() const
{
    GridOperator copy = *this;
    copy.adjoint_ = !adjoint_;
    return copy;
}

Matrix GridOperator::apply(const Matrix& columns) const
{
    if (columns.rows() != static_cast<Eigen::Index>(space_.cell_count())) {
        throw Error(ErrorKind::SpaceMismatch, "operator applied to columns of the wrong length");
    }
    const double h = space_.cell_measure();
    return std::visit(Overloaded{
                          [&](const Identity&) -> Matrix { return columns; },
                          [&](const GridFunction& f) -> Matrix {
                              const Vector factor = adjoint_ ? Vector(f.values.conjugate()) : f.values;
                              return factor.asDiagonal() * columns;
                          },
                          [&](const GridKernel& k) -> Matrix {
                              return adjoint_ ? Matrix(k.entries.adjoint() * columns * h) : Matrix(k.entries * columns * h);
                          },
                      },
                      op_);
}

GridFunction GridOperator::apply(const GridFunction& f) const
{
    if (!(f.space == space_)) throw Error(ErrorKind::SpaceMismatch, "operator and function grids differ");
    return GridFunction(space_, apply(Matrix(f.values)).col(0));
}

std::vector<GridFunction> complete_basis(std::span<const GridFunction> leading, const MeasureSpace& space)
{
    const auto cells = static_cast<Eigen::Index>(space.cell_count());
    const double h = space.cell_measure();
    if (static_cast<Eigen::Index>(leading.size()) > cells) {
        throw Error(ErrorKind::InvalidArgument, "more leading functions than grid cells");
    }
    Matrix b(cells, cells);
    Eigen::Index count = 0;
    for (const auto& f : leading) {
        if (!(f.space == space)) throw Error(ErrorKind::SpaceMismatch, "complete_basis: leading function on another grid");
        b.col(count++) = f.values;
    }
    const double indicator_value = 1.0 / std::sqrt(h);
    for (Eigen::Index cell = 0; cell < cells && count < cells; ++cell) {
        Vector v = Vector::Zero(cells);
        v[cell] = indicator_value;
        for (int pass = 0; pass < 2 && count > 0; ++pass) {
            const Vector coeff = (b.leftCols(count).adjoint() * v) * h;
            v -= b.leftCols(count) * coeff;
        }
        const double residual = std::sqrt(v.squaredNorm() * h);
        if (residual < kRankTolerance) continue;
        b.col(count++) = v / residual;
    }
    std::vector<GridFunction> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index n = 0; n < count; ++n) out.emplace_back(space, b.col(n));
    return out;
}

std::vector<GridFunction> complete_basis(const KorotkovSequence& sequence)
{
    return complete_basis(std::span<const GridFunction>(sequence.functions), sequence.space);
}

UnitarySurrogate::UnitarySurrogate(MeasureSpace space, std::vector<GridFunction> b_basis)
    : space_(space), b_(static_cast<Eigen::Index>(space.cell_count()), static_cast<Eigen::Index>(b_basis.size())),
      basis_(b_basis.empty() ? 1 : b_basis.size())
{
    if (b_basis.empty()) throw Error(ErrorKind::InvalidArgument, "unitary surrogate needs at least one basis function");
    if (b_basis.size() > space.cell_count()) throw Error(ErrorKind::InvalidArgument, "more basis functions than cells");
    for (std::size_t n = 0; n < b_basis.size(); ++n) {
        if (!(b_basis[n].space == space)) throw Error(ErrorKind::SpaceMismatch, "basis function on another grid");
        b_.col(static_cast<Eigen::Index>(n)) = b_basis[n].values;
    }
}

UnitarySurrogate UnitarySurrogate::build(const KorotkovSequence& sequence, std::optional<std::size_t> basis_size)
{
    std::vector<GridFunction> full = complete_basis(sequence);
    if (basis_size) {
        if (*basis_size < sequence.size() || *basis_size == 0) {
            throw Error(ErrorKind::InvalidArgument, "basis size must hold at least the Korotkov sequence");
        }
        if (*basis_size < full.size()) full.erase(full.begin() + static_cast<std::ptrdiff_t>(*basis_size), full.end());
    }
    return UnitarySurrogate(sequence.space, std::move(full));
}

GridFunction UnitarySurrogate::b(std::size_t n) const
{
    if (n >= size()) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
    return GridFunction(space_, b_.col(static_cast<Eigen::Index>(n)));
}

Vector UnitarySurrogate::forward(const GridFunction& phi) const
{
    if (!(phi.space == space_)) throw Error(ErrorKind::SpaceMismatch, "apply_forward: function on another grid");
    return (b_.adjoint() * phi.values) * space_.cell_measure();
}

GridFunction UnitarySurrogate::inverse(const Vector& coefficients) const
{
    if (coefficients.size() > b_.cols()) {
        throw Error(ErrorKind::InvalidArgument, "apply_inverse: " + std::to_string(coefficients.size()) +
                                                    " coefficients for a basis of " + std::to_string(b_.cols()));
    }
    return GridFunction(space_, b_.leftCols(coefficients.size()) * coefficients);
}

double UnitarySurrogate::gram_defect() const
{
    const Matrix gram = (b_.adjoint() * b_) * space_.cell_measure();
    return (gram - Matrix::Identity(b_.cols(), b_.cols())).cwiseAbs().maxCoeff();
}

Vector apply_forward(const UnitarySurrogate& u, const GridFunction& phi) { return u.forward(phi); }

GridFunction apply_inverse(const UnitarySurrogate& u, const Vector& coefficients) { return u.inverse(coefficients); }

CoefficientMatrix matrix_elements(const GridOperator& op, const Matrix& b_basis)
{
    if (b_basis.rows() != static_cast<Eigen::Index>(op.space().cell_count())) {
        throw Error(ErrorKind::SpaceMismatch, "matrix_elements: basis and operator grids differ");
    }
    return CoefficientMatrix{(b_basis.adjoint() * op.apply(b_basis)) * op.space().cell_measure()};
}

CoefficientMatrix matrix_elements(const GridOperator& op, const UnitarySurrogate& u)
{
    if (!(op.space() == u.space())) throw Error(ErrorKind::SpaceMismatch, "matrix_elements: basis and operator grids differ");
    return matrix_elements(op, u.b_matrix());
}

}  // namespace kinf
