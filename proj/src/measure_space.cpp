#include "kinf/measure_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kinf {

namespace {

void require_same_space(const MeasureSpace& a, const MeasureSpace& b, const char* where)
{
    if (!(a == b)) {
        throw Error(ErrorKind::SpaceMismatch,
                    std::string(where) + ": depth " + std::to_string(a.depth()) + " vs " + std::to_string(b.depth()));
    }
}

}  // namespace

MeasureSpace::MeasureSpace(int depth) : depth_(depth)
{
    if (depth < 1 || depth > kMaxDepth) {
        throw Error(ErrorKind::InvalidArgument,
                    "measure space depth must lie in [1, " + std::to_string(kMaxDepth) + "], got " + std::to_string(depth));
    }
}

double MeasureSpace::cell_measure() const noexcept { return std::ldexp(1.0, -depth_); }

std::pair<double, double> MeasureSpace::cell_bounds(std::size_t cell) const noexcept
{
    const double h = cell_measure();
    return {static_cast<double>(cell) * h, static_cast<double>(cell + 1) * h};
}

MeasureSpace build_space(int depth) { return MeasureSpace(depth); }

MeasurableSet::MeasurableSet(MeasureSpace space, std::vector<std::size_t> cells)
    : space_(space), cells_(std::move(cells))
{
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i] >= space_.cell_count()) {
            throw Error(ErrorKind::InvalidArgument, "cell index " + std::to_string(cells_[i]) + " out of range");
        }
        if (i > 0 && cells_[i] <= cells_[i - 1]) {
            throw Error(ErrorKind::InvalidArgument, "cell indices must be strictly increasing");
        }
    }
}

MeasurableSet MeasurableSet::whole(const MeasureSpace& space) { return interval(space, 0, space.cell_count()); }

MeasurableSet MeasurableSet::interval(const MeasureSpace& space, std::size_t first, std::size_t last_exclusive)
{
    std::vector<std::size_t> cells;
    if (last_exclusive > first) {
        cells.resize(last_exclusive - first);
        for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = first + i;
    }
    return MeasurableSet(space, std::move(cells));
}

MeasurableSet MeasurableSet::refined() const
{
    std::vector<std::size_t> children;
    children.reserve(2 * cells_.size());
    for (auto c : cells_) {
        children.push_back(2 * c);
        children.push_back(2 * c + 1);
    }
    return MeasurableSet(space_.refined(), std::move(children));
}

bool MeasurableSet::intersects(const MeasurableSet& other) const
{
    require_same_space(space_, other.space_, "MeasurableSet::intersects");
    auto a = cells_.begin();
    auto b = other.cells_.begin();
    while (a != cells_.end() && b != other.cells_.end()) {
        if (*a == *b) return true;
        if (*a < *b) ++a; else ++b;
    }
    return false;
}

std::pair<MeasurableSet, MeasurableSet> bisect(const MeasurableSet& set)
{
    const auto& cells = set.cells();
    if (cells.empty() || cells.size() % 2 != 0) {
        throw Error(ErrorKind::NotBisectable,
                    "cannot split " + std::to_string(cells.size()) + " cells into equal halves; refine the grid");
    }
    const auto half = static_cast<std::ptrdiff_t>(cells.size() / 2);
    return {MeasurableSet(set.space(), std::vector<std::size_t>(cells.begin(), cells.begin() + half)),
            MeasurableSet(set.space(), std::vector<std::size_t>(cells.begin() + half, cells.end()))};
}

GridFunction::GridFunction(MeasureSpace s, Vector v) : space(s), values(std::move(v))
{
    if (static_cast<std::size_t>(values.size()) != space.cell_count()) {
        throw Error(ErrorKind::SpaceMismatch, "grid function has " + std::to_string(values.size()) + " values for " +
                                                  std::to_string(space.cell_count()) + " cells");
    }
    if (!values.allFinite()) throw Error(ErrorKind::InvalidArgument, "grid function values must be finite");
}

GridFunction GridFunction::zero(const MeasureSpace& space)
{
    return GridFunction(space, Vector::Zero(static_cast<Eigen::Index>(space.cell_count())));
}

GridFunction GridFunction::constant(const MeasureSpace& space, Complex value)
{
    return GridFunction(space, Vector::Constant(static_cast<Eigen::Index>(space.cell_count()), value));
}

GridFunction GridFunction::indicator(const MeasurableSet& set)
{
    auto f = zero(set.space());
    for (auto c : set.cells()) f.values[static_cast<Eigen::Index>(c)] = 1.0;
    return f;
}

GridFunction GridFunction::sample(const MeasureSpace& space, const std::function<Complex(double)>& f)
{
    Vector v(static_cast<Eigen::Index>(space.cell_count()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f(space.center(static_cast<std::size_t>(i)));
    return GridFunction(space, std::move(v));
}

double GridFunction::norm() const { return std::sqrt(values.squaredNorm() * space.cell_measure()); }

GridKernel::GridKernel(MeasureSpace s, Matrix e) : space(s), entries(std::move(e))
{
    const auto n = static_cast<Eigen::Index>(space.cell_count());
    if (entries.rows() != n || entries.cols() != n) {
        throw Error(ErrorKind::SpaceMismatch, "grid kernel shape does not match the cell count");
    }
    if (!entries.allFinite()) throw Error(ErrorKind::InvalidArgument, "grid kernel entries must be finite");
}

GridKernel GridKernel::sample(const MeasureSpace& space, const std::function<Complex(double, double)>& k)
{
    const auto n = static_cast<Eigen::Index>(space.cell_count());
    Matrix e(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double y = space.center(static_cast<std::size_t>(j));
        for (Eigen::Index i = 0; i < n; ++i) e(i, j) = k(space.center(static_cast<std::size_t>(i)), y);
    }
    return GridKernel(space, std::move(e));
}

GridFunction GridKernel::apply(const GridFunction& f) const
{
    require_same_space(space, f.space, "GridKernel::apply");
    return GridFunction(space, (entries * f.values) * space.cell_measure());
}

GridFunction GridKernel::apply_adjoint(const GridFunction& f) const
{
    require_same_space(space, f.space, "GridKernel::apply_adjoint");
    return GridFunction(space, (entries.adjoint() * f.values) * space.cell_measure());
}

GridKernel GridKernel::adjoint() const { return GridKernel(space, entries.adjoint()); }

Complex inner_product(const GridFunction& f, const GridFunction& g)
{
    require_same_space(f.space, g.space, "inner_product");
    // <f, g> = sum f conj(g) mu; Eigen's dot conjugates its left operand.
    return g.values.dot(f.values) * f.space.cell_measure();
}

double norm(const GridFunction& f) { return f.norm(); }

MeasurableSet band_set(const GridFunction& coefficient, Complex alpha, double lo, double hi)
{
    if (!(lo >= 0.0 && lo < hi)) throw Error(ErrorKind::InvalidArgument, "band bounds need 0 <= lo < hi");
    std::vector<std::size_t> cells;
    for (Eigen::Index i = 0; i < coefficient.values.size(); ++i) {
        const double d = std::abs(coefficient.values[i] - alpha);
        if (lo < d && d <= hi) cells.push_back(static_cast<std::size_t>(i));
    }
    return MeasurableSet(coefficient.space, std::move(cells));
}

FunctionSource FunctionSource::from_function(PointFunction f)
{
    FunctionSource s;
    s.function_ = std::move(f);
    return s;
}

FunctionSource FunctionSource::from_grid(GridFunction samples)
{
    FunctionSource s;
    s.grid_ = std::make_shared<const GridFunction>(std::move(samples));
    return s;
}

Complex FunctionSource::at(const MeasureSpace& space, std::size_t cell) const
{
    if (function_) return function_(space.center(cell));
    const int native = grid_->space.depth();
    if (space.depth() >= native) return grid_->values[static_cast<Eigen::Index>(cell >> (space.depth() - native))];
    // Coarser than the data: average the covered samples.
    const std::size_t span = std::size_t{1} << (native - space.depth());
    Complex sum = 0.0;
    for (std::size_t k = 0; k < span; ++k) sum += grid_->values[static_cast<Eigen::Index>(cell * span + k)];
    return sum / static_cast<double>(span);
}

GridFunction FunctionSource::sample(const MeasureSpace& space) const
{
    Vector v(static_cast<Eigen::Index>(space.cell_count()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = at(space, static_cast<std::size_t>(i));
    return GridFunction(space, std::move(v));
}

KernelSource KernelSource::from_function(PointKernel k)
{
    KernelSource s;
    s.function_ = std::move(k);
    return s;
}

KernelSource KernelSource::from_grid(GridKernel samples)
{
    KernelSource s;
    s.grid_ = std::make_shared<const GridKernel>(std::move(samples));
    return s;
}

Complex KernelSource::at(const MeasureSpace& space, std::size_t row, std::size_t col) const
{
    if (function_) return function_(space.center(row), space.center(col));
    const int native = grid_->space.depth();
    if (space.depth() >= native) {
        const int shift = space.depth() - native;
        return grid_->entries(static_cast<Eigen::Index>(row >> shift), static_cast<Eigen::Index>(col >> shift));
    }
    const std::size_t span = std::size_t{1} << (native - space.depth());
    Complex sum = 0.0;
    for (std::size_t a = 0; a < span; ++a) {
        for (std::size_t b = 0; b < span; ++b) {
            sum += grid_->entries(static_cast<Eigen::Index>(row * span + a), static_cast<Eigen::Index>(col * span + b));
        }
    }
    return sum / static_cast<double>(span * span);
}

GridKernel KernelSource::sample(const MeasureSpace& space) const
{
    const auto n = static_cast<Eigen::Index>(space.cell_count());
    Matrix e(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) e(i, j) = at(space, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    return GridKernel(space, std::move(e));
}

}  // namespace kinf
