#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "poslab/geometry.hpp"

namespace poslab {

/// Samples of a radial function on a grid.
class GridFunction {
public:
    GridFunction() = default;
    /// Throws InvalidArgument on a size mismatch or non-finite samples.
    GridFunction(GridPtr grid, std::vector<double> values);

    static GridFunction constant(const GridPtr& grid, double c);
    static GridFunction sample(const GridPtr& grid, const std::function<double(double)>& f);

    [[nodiscard]] const GridPtr& grid() const { return grid_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    /// Restriction to a window of the same root grid. The target must lie
    /// inside this function's grid; throws InvalidArgument otherwise.
    [[nodiscard]] GridFunction on(const GridPtr& target) const;

    [[nodiscard]] GridFunction positive_part() const;
    [[nodiscard]] GridFunction map(const std::function<double(double)>& f) const;

    [[nodiscard]] double max_abs() const;
    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;

    GridFunction& operator+=(double c);
    GridFunction& operator*=(double c);
    friend GridFunction operator+(GridFunction u, double c) { return u += c; }
    friend GridFunction operator*(double c, GridFunction u) { return u *= c; }
    friend GridFunction operator-(const GridFunction& u);
    friend GridFunction operator+(const GridFunction& u, const GridFunction& v);
    friend GridFunction operator-(const GridFunction& u, const GridFunction& v);

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Same root grid and node range.
bool same_grid(const RadialGrid& a, const RadialGrid& b);

}  // namespace poslab
