#pragma once

// Rotationally symmetric model manifolds dr^2 + sigma(r)^2 g_{S^{n-1}}, their
// uniform radial grids and a few geometric indicators.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace poslab {

enum class ProfileKind { euclidean, hyperbolic, superexp, linear_cap, flat, custom };

/// Warping function sigma of a model manifold together with its derivative.
///
/// Presets:
///  - euclidean   sigma = r
///  - hyperbolic  sigma = sinh r
///  - superexp(a) sigma = r on [0, 1/2], exp(a r^3) on [1, inf), quintic
///                smoothstep blend in between (C^2)
///  - linear-cap  sigma = r / (1 + r^2); finite volume for n >= 3
///  - flat        sigma = 1; with n = 1 this is an interval with unit density
class WarpingProfile {
public:
    using Fn = std::function<double(double)>;

    static WarpingProfile euclidean();
    static WarpingProfile hyperbolic();
    static WarpingProfile superexp(double growth);
    static WarpingProfile linear_cap();
    static WarpingProfile flat();
    static WarpingProfile custom(std::string name, Fn sigma, Fn dsigma);

    /// Preset lookup by name ("euclidean", "hyperbolic", "superexp",
    /// "linear-cap", "flat"). Throws InvalidArgument for anything else.
    static WarpingProfile from_name(const std::string& name, double growth = 1.0);

    [[nodiscard]] double sigma(double r) const;
    [[nodiscard]] double dsigma(double r) const;
    /// log sigma, finite even where sigma itself overflows (superexp).
    [[nodiscard]] double log_sigma(double r) const;
    /// sigma'/sigma, finite where sigma overflows.
    [[nodiscard]] double log_derivative(double r) const;

    [[nodiscard]] ProfileKind kind() const { return kind_; }
    [[nodiscard]] double growth() const { return growth_; }
    [[nodiscard]] const std::string& name() const { return name_; }

private:
    WarpingProfile(ProfileKind kind, std::string name, double growth);

    ProfileKind kind_;
    std::string name_;
    double growth_ = 0.0;
    Fn custom_sigma_;
    Fn custom_dsigma_;
};

enum class LeftEnd { pole, open };
enum class RightEnd { truncation, boundary };

struct Domain {
    double r_min = 0.0;
    double r_max = 1.0;
    LeftEnd left = LeftEnd::pole;
    RightEnd right = RightEnd::truncation;
};

/// Closed radial interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Surface area of the unit (n-1)-sphere; the n = 1 convention is 1 (an
/// interval carrying unit density).
double sphere_area(int n);

class ModelManifold {
public:
    /// Validates the combination; throws InvalidArgument on violations.
    ModelManifold(WarpingProfile profile, int n, Domain domain);

    [[nodiscard]] const WarpingProfile& profile() const { return profile_; }
    [[nodiscard]] int dimension() const { return n_; }
    [[nodiscard]] double r_min() const { return domain_.r_min; }
    [[nodiscard]] double r_max() const { return domain_.r_max; }
    [[nodiscard]] LeftEnd left() const { return domain_.left; }
    [[nodiscard]] RightEnd right() const { return domain_.right; }
    [[nodiscard]] const Domain& domain() const { return domain_; }
    [[nodiscard]] bool has_pole() const { return domain_.left == LeftEnd::pole; }

    /// S(r) = omega_{n-1} sigma(r)^{n-1}.
    [[nodiscard]] double area_density(double r) const;
    [[nodiscard]] double log_area_density(double r) const;
    /// (log S)' = (n-1) sigma'/sigma.
    [[nodiscard]] double log_area_derivative(double r) const;

    /// Same profile and dimension on a different domain.
    [[nodiscard]] ModelManifold with_domain(Domain domain) const;

private:
    WarpingProfile profile_;
    int n_;
    Domain domain_;
};

class RadialGrid;
using GridPtr = std::shared_ptr<const RadialGrid>;

/// Uniform radial grid with warped measure weights.
///
/// Besides the trapezoid weights mu_i the grid carries the two quantities the
/// divergence-form operators need, half-node densities W_{i+1/2} and control
/// masses m_i:
///  - pole grids: W = S(r_{i+1/2}) and m_i = int S over [r_i - h/2, r_i + h/2]
///    (clipped to the domain). Delta(r^2) = 2n is reproduced exactly on
///    euclidean models and the pole row is the reflection u'(0) = 0.
///  - other grids: W = h / int_{r_i}^{r_{i+1}} d rho / S, the flux-exact
///    average that keeps constants and int d rho / S discretely harmonic,
///    and m_i = mu_i. This is what resolves 1/r-type solutions near a
///    puncture.
class RadialGrid {
public:
    [[nodiscard]] const ModelManifold& manifold() const { return manifold_; }
    [[nodiscard]] std::size_t size() const { return r_.size(); }
    [[nodiscard]] double spacing() const { return h_; }

    [[nodiscard]] double node(std::size_t i) const { return r_[i]; }
    [[nodiscard]] double density(std::size_t i) const { return s_[i]; }
    [[nodiscard]] double half_density(std::size_t i) const { return s_half_[i]; }
    [[nodiscard]] double weight(std::size_t i) const { return mu_[i]; }
    [[nodiscard]] double control_mass(std::size_t i) const { return mass_[i]; }

    [[nodiscard]] std::span<const double> nodes() const { return r_; }
    [[nodiscard]] std::span<const double> densities() const { return s_; }
    [[nodiscard]] std::span<const double> half_densities() const { return s_half_; }
    [[nodiscard]] std::span<const double> weights() const { return mu_; }
    [[nodiscard]] std::span<const double> control_masses() const { return mass_; }

    /// Indices [first, last] of the nodes inside [lo, hi] (with a relative
    /// slack of 1e-9 h). Throws InvalidArgument if fewer than two nodes qualify.
    [[nodiscard]] std::pair<std::size_t, std::size_t> node_range(Interval region) const;

    /// Sub-grid on nodes [first, last]. Node data is copied bit for bit, the end
    /// weights become half weights, and the new ends are artificial boundaries
    /// (left stays a pole only when node 0 of a pole grid is kept).
    [[nodiscard]] static GridPtr window(const GridPtr& grid, std::size_t first, std::size_t last);
    [[nodiscard]] static GridPtr window(const GridPtr& grid, Interval region);

    /// Identity of the grid this one was (transitively) cut from.
    [[nodiscard]] const RadialGrid* root() const;
    /// Node offset relative to root().
    [[nodiscard]] std::size_t root_offset() const { return offset_; }

    /// Trapezoid quadrature of f(r) S(r) over [a, b], exact trapezoid on whole
    /// cells and linear interpolation of the integrand on partial end cells.
    /// Equals sum f_i mu_i when [a, b] is the whole grid.
    [[nodiscard]] double integrate(std::span<const double> f, Interval region) const;
    [[nodiscard]] double integrate(std::span<const double> f) const;

    friend std::pair<ModelManifold, GridPtr> make_model(const WarpingProfile&, int, Domain, std::size_t);

private:
    explicit RadialGrid(ModelManifold manifold) : manifold_(std::move(manifold)) {}

    ModelManifold manifold_;
    double h_ = 0.0;
    std::vector<double> r_;
    std::vector<double> s_;
    std::vector<double> s_half_;
    std::vector<double> mu_;
    std::vector<double> mass_;
    GridPtr parent_;
    std::size_t offset_ = 0;
};

/// Builds the manifold and its uniform grid with N nodes.
/// Throws InvalidArgument for N < 8, for sigma <= 0 (or S overflowing) inside
/// the domain and for a pole flag where sigma(0) != 0 or sigma'(0) != 1.
std::pair<ModelManifold, GridPtr> make_model(const WarpingProfile& profile, int n, Domain domain,
                                             std::size_t nodes);

class GridFunction;

/// (sum over k <= r_i <= 2k of |u|^p dmu)^{1/p}, computed with the region
/// quadrature of RadialGrid::integrate. Requires 1 <= p < inf and 2k <= r_max.
double annulus_norm(const GridFunction& u, double p, double k);

enum class CompletenessVerdict { complete_like, incomplete_like, inconclusive };

struct CompletenessIndicator {
    double integral = 0.0;    ///< int_1^R V(r)/S(r) dr
    double tail_slope = 0.0;  ///< d log(V/S) / d log r fitted on [R/2, R]
    CompletenessVerdict verdict = CompletenessVerdict::inconclusive;
};

/// Classical model test for stochastic completeness: divergence of
/// int^inf V/S dr. Evaluated in log space, so profiles whose density
/// overflows (superexp) are fine. The verdict is a tail-slope extrapolation
/// (slope > -0.9 divergent, < -1.1 convergent) and is advisory only.
CompletenessIndicator stochastic_completeness_indicator(const ModelManifold& m, double R);

std::string to_string(CompletenessVerdict v);

}  // namespace poslab
