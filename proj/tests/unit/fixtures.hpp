#pragma once

#include <cmath>

#include "poslab/geometry.hpp"
#include "poslab/grid_function.hpp"

namespace fixture {

inline poslab::GridPtr pole_grid(const poslab::WarpingProfile& p, int n, double r_max, std::size_t nodes) {
    return poslab::make_model(p, n, {0.0, r_max, poslab::LeftEnd::pole, poslab::RightEnd::truncation}, nodes)
        .second;
}

inline poslab::GridPtr euclid3(double r_max, std::size_t nodes) {
    return pole_grid(poslab::WarpingProfile::euclidean(), 3, r_max, nodes);
}

inline poslab::GridPtr hyper2(double r_max, std::size_t nodes) {
    return pole_grid(poslab::WarpingProfile::hyperbolic(), 2, r_max, nodes);
}

inline poslab::GridFunction sinhc(const poslab::GridPtr& g) {
    return poslab::GridFunction::sample(g, [](double r) { return r == 0.0 ? 1.0 : std::sinh(r) / r; });
}

/// max(-1, -1/r), the kink subsolution; -1 at the pole.
inline poslab::GridFunction kink(const poslab::GridPtr& g) {
    return poslab::GridFunction::sample(g, [](double r) { return r <= 1.0 ? -1.0 : -1.0 / r; });
}

}  // namespace fixture
