#pragma once

// Divergence-form radial operators
//
//     m_i (A u)_i = F_{i+1/2} - F_{i-1/2} - lambda_i u_i m_i,
//     F_{i+1/2}   = W_{i+1/2} (u_{i+1} - u_i) / h,
//
// with conduction W at half nodes and control masses m at nodes. End fluxes
// are zero, so sum_i v_i m_i (A u)_i = -sum W Du Dv h - sum lambda u v m holds
// exactly for every pair of grid functions.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "poslab/geometry.hpp"
#include "poslab/grid_function.hpp"
#include "poslab/tridiagonal.hpp"

namespace poslab {

enum class EndCondition { pole_neumann, dirichlet, natural };

class DiscreteOperator {
public:
    DiscreteOperator(GridPtr grid, std::vector<double> conduction, std::vector<double> mass,
                     std::vector<double> potential, EndCondition left, EndCondition right);

    [[nodiscard]] const GridPtr& grid() const { return grid_; }
    [[nodiscard]] std::size_t size() const { return mass_.size(); }
    [[nodiscard]] double conduction(std::size_t half) const { return w_[half]; }
    [[nodiscard]] double mass(std::size_t i) const { return mass_[i]; }
    [[nodiscard]] double potential(std::size_t i) const { return lambda_[i]; }
    [[nodiscard]] std::span<const double> conductions() const { return w_; }
    [[nodiscard]] std::span<const double> masses() const { return mass_; }
    [[nodiscard]] std::span<const double> potentials() const { return lambda_; }
    [[nodiscard]] EndCondition left() const { return left_; }
    [[nodiscard]] EndCondition right() const { return right_; }
    [[nodiscard]] bool has_potential() const;

    /// A u at every node (end nodes use the zero-flux formula).
    [[nodiscard]] GridFunction apply(const GridFunction& u) const;

    /// F_{j+1/2} - F_{j-1/2}.
    [[nodiscard]] double flux_difference(std::span<const double> u, std::size_t j) const;
    /// Distributional pairing of u with the hat at node j, i.e. m_j (A u)_j.
    [[nodiscard]] double hat_pairing(std::span<const double> u, std::size_t j) const;

    /// Same coefficients on a window of this operator's grid; the window ends
    /// become Dirichlet unless a pole is kept.
    [[nodiscard]] DiscreteOperator restricted(const GridPtr& window) const;

    /// Same conduction and mass with the zero-order term replaced.
    [[nodiscard]] DiscreteOperator with_potential(std::vector<double> potential) const;

    /// Matrix of -m (A u) on the given node range, ready for solves.
    [[nodiscard]] Tridiagonal stiffness(std::size_t first, std::size_t last) const;

private:
    GridPtr grid_;
    std::vector<double> w_;
    std::vector<double> mass_;
    std::vector<double> lambda_;
    EndCondition left_;
    EndCondition right_;
};

/// End tags implied by the manifold: pole -> pole_neumann, open -> dirichlet,
/// truncation -> natural, boundary -> dirichlet.
std::pair<EndCondition, EndCondition> end_conditions(const ModelManifold& m);

DiscreteOperator laplacian(const GridPtr& grid);
/// Delta - lambda. Throws InvalidArgument for negative or non-finite lambda.
DiscreteOperator schrodinger(const GridPtr& grid, double lambda);
DiscreteOperator schrodinger(const GridPtr& grid, std::vector<double> lambda);
DiscreteOperator schrodinger(const GridPtr& grid, const std::function<double(double)>& lambda);

/// sum_i u_i (A phi)_i m_i. phi must vanish at every end that is not a pole.
double pair_distributional(const GridFunction& u, const GridFunction& phi, const DiscreteOperator& a);
/// -sum W Du Dphi h - sum lambda u phi m; same precondition.
double weak_form_pair(const GridFunction& u, const GridFunction& phi, const DiscreteOperator& a);

struct CertificateOptions {
    double c = 10.0;
    /// Replaces the per-node tolerance by a single absolute value when set.
    std::optional<double> absolute;
    /// Per-node tolerances carried over from an upstream certificate; the
    /// roundoff allowance of the current pairing is added on top.
    std::optional<GridFunction> node_tolerance;
};

/// Outcome of testing A u >= 0 against every hat supported in a region.
///
/// Tolerance at hat j:
///     tol_j = c h^2 m_j ||u||_inf(region) + 64 eps (|F_{j+1/2}| + |F_{j-1/2}| + lambda_j |u_j| m_j terms)
/// The first term is the consistency error of an exact solution paired with
/// a hat; the second bounds the rounding of the flux difference.
struct IneqCertificate {
    double min_pairing = 0.0;   ///< pairing at the worst hat
    std::size_t worst_node = 0;
    double worst_radius = 0.0;
    double tolerance = 0.0;     ///< tolerance at the worst hat
    bool pass = true;
    std::size_t hats_tested = 0;

    std::vector<std::size_t> nodes;  ///< tested hat nodes
    std::vector<double> pairings;
    std::vector<double> tolerances;

    /// Per-node tolerances as a grid function on the operator's grid
    /// (zero at untested nodes), for passing on to derived certificates.
    GridFunction tolerance_field;
};

/// Hats tested: nodes strictly inside the region's node range, plus node 0
/// when the region contains a pole.
IneqCertificate check_subsolution(const GridFunction& u, const DiscreteOperator& a, Interval region,
                                  const CertificateOptions& options = {});
IneqCertificate check_subsolution(const GridFunction& u, const DiscreteOperator& a,
                                  const CertificateOptions& options = {});

/// Builds a certificate from precomputed pairings (one per tested node).
IneqCertificate make_certificate(const GridPtr& grid, std::vector<std::size_t> nodes,
                                 std::vector<double> pairings, std::vector<double> tolerances);

/// Hat nodes of a region in the sense of check_subsolution.
std::vector<std::size_t> hat_nodes(const RadialGrid& grid, Interval region);

/// Per-node tolerance of check_subsolution without the pairing itself.
std::vector<double> certificate_tolerances(const GridFunction& u, const DiscreteOperator& a,
                                           std::span<const std::size_t> nodes,
                                           const CertificateOptions& options);

double lp_norm(const GridFunction& u, double p, Interval region);
double lp_norm(const GridFunction& u, double p);
/// (sum W (Du)^2 h)^{1/2} over the cells inside the region; W from the grid
/// (plain Laplacian) or from an operator (weighted Laplacians).
double w12_seminorm(const GridFunction& u, Interval region);
double w12_seminorm(const GridFunction& u, const DiscreteOperator& a, Interval region);

/// Smallest eigenvalue of -A + extra_potential on the nodes of `domain`,
/// Dirichlet at its ends (a pole inside the domain keeps its Neumann row).
/// extra_potential may be negative, which is how lambda < 0 is probed.
/// Sturm bisection brackets the eigenvalue, shifted inverse iteration with a
/// Rayleigh quotient refines it. Throws NumericalError on stagnation and
/// InvalidArgument for fewer than 3 unknowns.
double spectral_bottom(const DiscreteOperator& a, Interval domain, double extra_potential = 0.0);

struct ResolventReport {
    bool pass = false;
    double min_entry = 0.0;      ///< smallest entry of (-Delta + shift)^{-1}
    double max_entry = 0.0;
    std::size_t witness_row = 0;  ///< grid index of the minimum
    std::size_t witness_col = 0;
    bool sign_pattern = false;    ///< off-diagonal entries <= 0
    bool diagonally_dominant = false;
    std::size_t unknowns = 0;
};

/// Entrywise sign of (-Delta_h + shift)^{-1} with the grid's end conditions,
/// by solving against every basis vector.
ResolventReport resolvent_positivity(const GridPtr& grid, double shift = 1.0);

/// Solves (A u)_i = f_i on every node that is not a Dirichlet end, with u fixed
/// to the given values at Dirichlet ends.
GridFunction solve_dirichlet(const DiscreteOperator& a, const GridFunction& f, double left_value,
                             double right_value);

}  // namespace poslab
