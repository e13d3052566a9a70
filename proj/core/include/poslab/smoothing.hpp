#pragma once

// Monotone smooth approximation of radial subsolutions.
//
// After the ground-state transform v = u / alpha, the hat pairings of v with
// Delta_alpha are the jumps of the divided differences of v in the Green
// coordinate t, t_{i+1} - t_i = h / W'_{i+1/2}. So v is a subsolution iff it
// is convex in t, and v is a linear function plus nonnegative ramps
// c_j (t - t_j)_+. Mollifying the ramps in t gives iterates that stay convex,
// dominate v and decrease with the kernel radius.

#include <cstddef>
#include <optional>
#include <vector>

#include "poslab/groundstate.hpp"
#include "poslab/operators.hpp"

namespace poslab {

/// t_i = sum_{k < i} h / W_{k+1/2} on the window Omega, t = 0 at its first
/// node. Throws InvalidArgument if Omega contains a pole (t is unbounded
/// there).
GridFunction green_coordinate(const DiscreteOperator& a, Interval omega);
/// Same for the weighted operator of a ground state.
GridFunction green_coordinate(const GroundState& gs);

/// Triweight kernel (35/32)(1 - s^2)^3 on [-1, 1].
double mollifier(double s);
/// g(y) = int (y - s)_+ rho(s) ds - y_+, the excess of a mollified ramp over
/// the ramp itself, in closed form. g >= 0, g = 0 for |y| >= 1, g(0) = 35/256.
double ramp_excess(double y);

struct SmoothingOptions {
    std::optional<double> epsilon0;           ///< kernel radius of the first iterate (t units)
    std::optional<GridFunction> node_tolerance;  ///< inherited L-certificate tolerances
    double c = 10.0;
};

struct ApproxSequence {
    GridPtr inner;                     ///< Omega'
    GridFunction base;                 ///< u on Omega'
    std::vector<GridFunction> iterates;   ///< u_k on Omega'
    std::vector<double> radii;         ///< epsilon_k
    std::optional<GroundState> ground;
    std::optional<DiscreteOperator> op;   ///< L restricted to Omega'
    std::optional<GridFunction> tolerance;  ///< inherited per-node tolerance on Omega'
    GridFunction t;                    ///< Green coordinate on Omega
    double clamped_curvature = 0.0;    ///< sum of the negative kinks kept sharp
    double floor_spacing = 0.0;        ///< largest t cell outside the pole cell
    bool floor_binds = false;          ///< epsilon_{K-1} < 2 * floor_spacing
};

/// Requires check_subsolution(u, a, omega) to pass (PreconditionError
/// otherwise) and K >= 2. Omega' is Omega shrunk by epsilon0 in t at both
/// ends (a pole end is kept); fewer than 3 nodes left raises InvalidArgument.
ApproxSequence monotone_smooth_approx(const GridFunction& u, const DiscreteOperator& a, Interval omega,
                                      std::size_t k_count, const SmoothingOptions& options = {});

struct ApproxReport {
    bool monotone = true;              ///< a)
    std::size_t monotone_witness_k = 0;
    std::size_t monotone_witness_node = 0;
    double monotone_violation = 0.0;

    bool pointwise = true;             ///< b)
    std::size_t pointwise_witness_node = 0;
    double pointwise_margin = 0.0;     ///< min over nodes of bound - e_K

    bool subsolutions = true;          ///< c)
    std::vector<IneqCertificate> certificates;

    bool l1_decay = true;              ///< d)
    std::vector<double> l1_errors;
    std::vector<double> l1_ratios;

    [[nodiscard]] bool pass() const { return monotone && pointwise && subsolutions && l1_decay; }
};

/// a) u <= u_{k+1} <= u_k nodewise within tol_rel * scale;
/// b) e_K(i) <= (eps_K / eps_0) e_0(i) + tol at every node of Omega', where
///    e_k = u_k - u (the mollified excess is convex in the radius);
/// c) check_subsolution(u_k, op) with the inherited tolerances;
/// d) ||u - u_k||_{L^1(Omega')} nonincreasing, with the ratio table.
ApproxReport verify_approx_properties(const ApproxSequence& seq, double tol_rel = 1e-12);

}  // namespace poslab
