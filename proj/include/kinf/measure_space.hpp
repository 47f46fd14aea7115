#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "kinf/types.hpp"

namespace kinf {

/*
 * Discretized measure space: Y = [0, 1) with Lebesgue measure, split into
 * 2^depth half-open dyadic cells of equal measure. Functions on Y are
 * represented by one complex value per cell (sampled at the cell center),
 * kernels by one value per pair of cells. Integrals are midpoint sums.
 */
class MeasureSpace {
public:
    static constexpr int kMaxDepth = 24;

    explicit MeasureSpace(int depth);

    int depth() const noexcept { return depth_; }
    std::size_t cell_count() const noexcept { return std::size_t{1} << depth_; }
    double cell_measure() const noexcept;
    double total_measure() const noexcept { return 1.0; }

    double center(std::size_t cell) const noexcept { return (static_cast<double>(cell) + 0.5) * cell_measure(); }
    std::pair<double, double> cell_bounds(std::size_t cell) const noexcept;

    MeasureSpace refined() const { return MeasureSpace(depth_ + 1); }

    friend bool operator==(const MeasureSpace&, const MeasureSpace&) = default;

private:
    int depth_;
};

MeasureSpace build_space(int depth);

/// Union of cells of a MeasureSpace.
class MeasurableSet {
public:
    /// `cells` must be strictly increasing and in range.
    MeasurableSet(MeasureSpace space, std::vector<std::size_t> cells);

    static MeasurableSet whole(const MeasureSpace& space);
    static MeasurableSet interval(const MeasureSpace& space, std::size_t first, std::size_t last_exclusive);

    const MeasureSpace& space() const noexcept { return space_; }
    const std::vector<std::size_t>& cells() const noexcept { return cells_; }
    std::size_t size() const noexcept { return cells_.size(); }
    bool empty() const noexcept { return cells_.empty(); }
    double measure() const noexcept { return static_cast<double>(cells_.size()) * space_.cell_measure(); }

    /// Same set on the next finer grid: every cell is replaced by its two children.
    MeasurableSet refined() const;

    bool intersects(const MeasurableSet& other) const;

    friend bool operator==(const MeasurableSet&, const MeasurableSet&) = default;

private:
    MeasureSpace space_;
    std::vector<std::size_t> cells_;
};

/// Deterministic equal-measure split: first half of the sorted cell list, second half.
/// Throws NotBisectable on an odd cell count.
std::pair<MeasurableSet, MeasurableSet> bisect(const MeasurableSet& set);

/// Element of L^2(Y, mu), piecewise constant on cells.
struct GridFunction {
    MeasureSpace space;
    Vector values;

    GridFunction(MeasureSpace s, Vector v);

    static GridFunction zero(const MeasureSpace& space);
    static GridFunction constant(const MeasureSpace& space, Complex value);
    static GridFunction indicator(const MeasurableSet& set);
    static GridFunction sample(const MeasureSpace& space, const std::function<Complex(double)>& f);

    double norm() const;
};

/// Integral kernel sampled at pairs of cell centers. The adjoint kernel is the
/// conjugate transpose, so every GridKernel is bi-integral.
struct GridKernel {
    MeasureSpace space;
    Matrix entries;

    GridKernel(MeasureSpace s, Matrix e);

    static GridKernel sample(const MeasureSpace& space, const std::function<Complex(double, double)>& k);

    /// (Kf)(x_i) = sum_j K(x_i, y_j) f(y_j) mu(cell).
    GridFunction apply(const GridFunction& f) const;
    GridFunction apply_adjoint(const GridFunction& f) const;
    GridKernel adjoint() const;
};

Complex inner_product(const GridFunction& f, const GridFunction& g);
double norm(const GridFunction& f);

/// Cells whose center value satisfies lo < |H - alpha| <= hi.
MeasurableSet band_set(const GridFunction& coefficient, Complex alpha, double lo, double hi);

/*
 * Grid-independent descriptions of the coefficient and the kernel. A source
 * can be sampled on any MeasureSpace; this is how the construction emulates a
 * nonatomic measure when it needs finer cells than the working grid offers.
 * Sources backed by samples (CSV input, test matrices) refine by piecewise
 * constant prolongation; sources backed by closed forms are re-sampled at the
 * new cell centers.
 */
class FunctionSource {
public:
    using PointFunction = std::function<Complex(double)>;

    static FunctionSource from_function(PointFunction f);
    static FunctionSource from_grid(GridFunction samples);

    Complex at(const MeasureSpace& space, std::size_t cell) const;
    GridFunction sample(const MeasureSpace& space) const;

private:
    PointFunction function_;
    std::shared_ptr<const GridFunction> grid_;
};

class KernelSource {
public:
    using PointKernel = std::function<Complex(double, double)>;

    static KernelSource from_function(PointKernel k);
    static KernelSource from_grid(GridKernel samples);

    Complex at(const MeasureSpace& space, std::size_t row, std::size_t col) const;
    GridKernel sample(const MeasureSpace& space) const;

private:
    PointKernel function_;
    std::shared_ptr<const GridKernel> grid_;
};

}  // namespace kinf
