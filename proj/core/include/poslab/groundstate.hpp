#pragma once

// Positive solutions of L alpha = 0 and the ground-state transform
// u -> u / alpha, which turns L-subsolutions into subsolutions of
// Delta_alpha = alpha^{-2} div(alpha^2 grad .).

#include "poslab/geometry.hpp"
#include "poslab/grid_function.hpp"
#include "poslab/operators.hpp"

namespace poslab {

struct GroundState {
    GridFunction alpha;          ///< alpha > 0 on the window Omega
    DiscreteOperator source;     ///< L restricted to Omega
    /// Delta_alpha with conduction alpha_i alpha_{i+1} W_{i+1/2} and masses
    /// alpha_i^2 m_i. The geometric mean makes the transport of hat pairings
    /// exact: pairing(u / alpha, Delta_alpha)_j = alpha_j pairing(u, L)_j.
    DiscreteOperator weighted;
};

/// Solves L alpha = 0 on the window Omega with alpha = c at its Dirichlet ends
/// (a pole keeps its Neumann row). lambda == 0 gives alpha == c exactly.
/// Throws InvalidArgument for c <= 0 and NumericalError when the computed
/// alpha is not strictly positive.
GroundState solve_dirichlet_ground(const DiscreteOperator& l, Interval omega, double c = 1.0);

/// Delta_alpha for a given positive alpha on the operator's grid.
DiscreteOperator weighted_laplacian(const GridFunction& alpha, const DiscreteOperator& l);

/// v = u / alpha on the ground state's window (u is restricted first).
GridFunction ground_transform(const GridFunction& u, const GroundState& gs);

/// Per-node tolerances of an L-certificate carried over to Delta_alpha:
/// tol_j alpha_j.
GridFunction transported_tolerance(const IneqCertificate& cert, const GroundState& gs);

struct PWResidual {
    /// max |alpha_i (Delta^mid_alpha (phi/alpha))_i - (L phi)_i| over hat
    /// nodes, where Delta^mid_alpha uses the arithmetic-midpoint conduction
    /// ((alpha_i + alpha_{i+1}) / 2)^2 W. Consistency error, O(h^2).
    double strong = 0.0;
    /// max_j |sum e_j (Delta_alpha(phi/alpha)) alpha^2 m - sum alpha e_j (L phi) m|
    /// over hat functions e_j, with the operator of the ground state.
    double adjoint = 0.0;
    /// Magnitude of the summed terms, for relative statements.
    double adjoint_scale = 0.0;
};

/// phi must vanish at the non-pole ends of the window.
PWResidual verify_pw_identity(const GroundState& gs, const GridFunction& phi);

}  // namespace poslab
