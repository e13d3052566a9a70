#pragma once

// Brezis-Kato: L u >= 0 in the distributional sense implies L u_+ >= 0.
// Two independent discrete routes: the convex regularization H_eps and the
// Dirichlet-problem route (Delta g = lambda u, smoothing of w = u - g,
// Kato/Ancona inequality on the smooth iterates).

#include <optional>
#include <vector>

#include "poslab/operators.hpp"
#include "poslab/smoothing.hpp"

namespace poslab {

/// H_eps(t) = (t + sqrt(t^2 + eps)) / 2. Throws InvalidArgument for eps <= 0.
double h_epsilon(double t, double eps);
/// H_eps'(t) = (1 + t / sqrt(t^2 + eps)) / 2, in (0, 1).
double h_epsilon_prime(double t, double eps);

enum class KatoRoute { regularization, appendix };

struct LadderRow {
    double epsilon = 0.0;
    IneqCertificate certificate;   ///< pairings F(H_eps(u)) - lambda u H_eps'(u) m against hats
    double nodal_deviation = 0.0;  ///< max_i |H_eps(u_i) - (u_i)_+|
    double range_deviation = 0.0;  ///< sup of |H_eps(s) - s_+| over s in [min u, max u]
    double envelope = 0.0;         ///< sqrt(eps) / 2
    double max_prime = 0.0;        ///< max_i H_eps'(u_i)
};

struct AnconaRow {
    double radius = 0.0;           ///< smoothing radius of u_k
    IneqCertificate certificate;   ///< F((u_k)_+) - 1{u_k > 0} lambda u m against hats
};

struct KatoOptions {
    double c = 10.0;
    std::vector<double> ladder{1.0, 0.25, 1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0};  ///< times ||u||_inf^2
    std::size_t k_count = 4;               ///< iterates of the appendix route
    std::optional<double> epsilon0;        ///< smoothing radius for the appendix route
};

struct KatoReport {
    KatoRoute route = KatoRoute::regularization;
    IneqCertificate input;                 ///< L u >= 0 on Omega
    IneqCertificate output;                ///< L u_+ >= 0 (Omega, or Omega' for the appendix)
    std::vector<LadderRow> ladder;         ///< regularization route
    std::vector<AnconaRow> ancona;         ///< appendix route
    std::optional<GridFunction> dirichlet_g;
    double dirichlet_residual = 0.0;       ///< max |F(g) - lambda u m| over hats
    bool agreement = true;                 ///< appendix: same verdict as the regularization route
    double agreement_gap = 0.0;            ///< |difference of output minima on common hats|
    double agreement_budget = 0.0;         ///< summed tolerances at the compared hats

    [[nodiscard]] bool pass() const;
};

/// Regularization route on Omega. Input certificate failure raises
/// PreconditionError.
KatoReport brezis_kato_check(const GridFunction& u, const DiscreteOperator& l, Interval omega,
                             const KatoOptions& options = {});

/// Appendix route: g solves Delta g = lambda u with g = 0 at the window ends,
/// w = u - g is smoothed with the plain Laplacian, u_k = w_k + g on Omega'.
/// The limit certificate for u_+ lives on Omega'. Also runs the
/// regularization route and records agreement.
KatoReport kato_via_appendix(const GridFunction& u, const DiscreteOperator& l, Interval omega,
                             const KatoOptions& options = {});

}  // namespace poslab
