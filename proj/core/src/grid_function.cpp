#include "poslab/grid_function.hpp"

#include <algorithm>
#include <cmath>

#include "poslab/errors.hpp"

namespace poslab {

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InvalidArgument("grid function without a grid");
    if (values_.size() != grid_->size()) {
        throw InvalidArgument("grid function size does not match the grid");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidArgument("grid function sample is not finite");
    }
}

GridFunction GridFunction::constant(const GridPtr& grid, double c) {
    return {grid, std::vector<double>(grid->size(), c)};
}

GridFunction GridFunction::sample(const GridPtr& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
    return {grid, std::move(v)};
}

GridFunction GridFunction::on(const GridPtr& target) const {
    if (!target || target->root() != grid_->root()) {
        throw InvalidArgument("restriction target is not cut from the same grid");
    }
    const std::size_t lo = grid_->root_offset();
    const std::size_t first = target->root_offset();
    if (first < lo || first + target->size() > lo + size()) {
        throw InvalidArgument("restriction target is not contained in the function's grid");
    }
    const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(first - lo);
    return {target, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(target->size()))};
}

GridFunction GridFunction::positive_part() const {
    return map([](double x) { return x > 0.0 ? x : 0.0; });
}

GridFunction GridFunction::map(const std::function<double(double)>& f) const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), f);
    return {grid_, std::move(v)};
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

GridFunction& GridFunction::operator+=(double c) {
    for (double& v : values_) v += c;
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction operator-(const GridFunction& u) { return -1.0 * u; }

namespace {
GridFunction combine(const GridFunction& u, const GridFunction& v, double sign) {
    if (!same_grid(*u.grid(), *v.grid())) throw InvalidArgument("grid functions live on different grids");
    std::vector<double> w(u.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] + sign * v[i];
    return {u.grid(), std::move(w)};
}
}  // namespace

GridFunction operator+(const GridFunction& u, const GridFunction& v) { return combine(u, v, 1.0); }
GridFunction operator-(const GridFunction& u, const GridFunction& v) { return combine(u, v, -1.0); }

bool same_grid(const RadialGrid& a, const RadialGrid& b) {
    return &a == &b || (a.root() == b.root() && a.root_offset() == b.root_offset() && a.size() == b.size());
}

}  // namespace poslab
