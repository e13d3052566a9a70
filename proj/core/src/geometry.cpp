#include "poslab/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "poslab/errors.hpp"
#include "poslab/grid_function.hpp"

namespace poslab {
namespace {

constexpr std::array<double, 5> kGaussNodes{0.0, -0.5384693101056831, 0.5384693101056831,
                                            -0.9061798459386640, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights{0.5688888888888889, 0.4786286704993665,
                                              0.4786286704993665, 0.2369268850561891,
                                              0.2369268850561891};

template <class F>
double gauss5(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
        sum += kGaussWeights[q] * f(mid + half * kGaussNodes[q]);
    }
    return half * sum;
}

// Quintic smoothstep; first and second derivatives vanish at 0 and 1.
double smoothstep(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }
double smoothstep_prime(double s) { return 30.0 * s * s * (1.0 - s) * (1.0 - s); }

}  // namespace

WarpingProfile::WarpingProfile(ProfileKind kind, std::string name, double growth)
    : kind_(kind), name_(std::move(name)), growth_(growth) {}

WarpingProfile WarpingProfile::euclidean() { return {ProfileKind::euclidean, "euclidean", 0.0}; }
WarpingProfile WarpingProfile::hyperbolic() { return {ProfileKind::hyperbolic, "hyperbolic", 0.0}; }
WarpingProfile WarpingProfile::linear_cap() { return {ProfileKind::linear_cap, "linear-cap", 0.0}; }
WarpingProfile WarpingProfile::flat() { return {ProfileKind::flat, "flat", 0.0}; }

WarpingProfile WarpingProfile::superexp(double growth) {
    if (!(growth > 0.0) || !std::isfinite(growth)) {
        throw InvalidArgument("superexp growth coefficient must be positive");
    }
    return {ProfileKind::superexp, "superexp", growth};
}

WarpingProfile WarpingProfile::custom(std::string name, Fn sigma, Fn dsigma) {
    if (!sigma || !dsigma) throw InvalidArgument("custom profile needs sigma and sigma'");
    WarpingProfile p{ProfileKind::custom, std::move(name), 0.0};
    p.custom_sigma_ = std::move(sigma);
    p.custom_dsigma_ = std::move(dsigma);
    return p;
}

WarpingProfile WarpingProfile::from_name(const std::string& name, double growth) {
    if (name == "euclidean") return euclidean();
    if (name == "hyperbolic") return hyperbolic();
    if (name == "superexp") return superexp(growth);
    if (name == "linear-cap") return linear_cap();
    if (name == "flat") return flat();
    throw InvalidArgument("unknown warping profile '" + name + "'");
}

double WarpingProfile::sigma(double r) const {
    switch (kind_) {
        case ProfileKind::euclidean: return r;
        case ProfileKind::hyperbolic: return std::sinh(r);
        case ProfileKind::linear_cap: return r / (1.0 + r * r);
        case ProfileKind::flat: return 1.0;
        case ProfileKind::custom: return custom_sigma_(r);
        case ProfileKind::superexp: {
            if (r <= 0.5) return r;
            const double e = std::exp(growth_ * r * r * r);
            if (r >= 1.0) return e;
            const double b = smoothstep(2.0 * r - 1.0);
            return (1.0 - b) * r + b * e;
        }
    }
    return 0.0;
}

double WarpingProfile::dsigma(double r) const {
    switch (kind_) {
        case ProfileKind::euclidean: return 1.0;
        case ProfileKind::hyperbolic: return std::cosh(r);
        case ProfileKind::linear_cap: {
            const double d = 1.0 + r * r;
            return (1.0 - r * r) / (d * d);
        }
        case ProfileKind::flat: return 0.0;
        case ProfileKind::custom: return custom_dsigma_(r);
        case ProfileKind::superexp: {
            if (r <= 0.5) return 1.0;
            const double e = std::exp(growth_ * r * r * r);
            const double de = 3.0 * growth_ * r * r * e;
            if (r >= 1.0) return de;
            const double s = 2.0 * r - 1.0;
            const double b = smoothstep(s);
            const double db = 2.0 * smoothstep_prime(s);
            return -db * r + (1.0 - b) + db * e + b * de;
        }
    }
    return 0.0;
}

double WarpingProfile::log_sigma(double r) const {
    if (kind_ == ProfileKind::superexp && r >= 1.0) return growth_ * r * r * r;
    return std::log(sigma(r));
}

double WarpingProfile::log_derivative(double r) const {
    if (kind_ == ProfileKind::superexp && r >= 1.0) return 3.0 * growth_ * r * r;
    return dsigma(r) / sigma(r);
}

double sphere_area(int n) {
    if (n < 1) throw InvalidArgument("dimension must be positive");
    if (n == 1) return 1.0;
    const double half = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

ModelManifold::ModelManifold(WarpingProfile profile, int n, Domain domain)
    : profile_(std::move(profile)), n_(n), domain_(domain) {
    const bool flat = profile_.kind() == ProfileKind::flat;
    if (n_ < 1 || (n_ < 2 && !flat)) {
        throw InvalidArgument("dimension must be >= 2 (n = 1 only for the flat profile)");
    }
    if (!std::isfinite(domain_.r_min) || !std::isfinite(domain_.r_max) ||
        !(domain_.r_max > domain_.r_min)) {
        throw InvalidArgument("domain needs finite r_min < r_max");
    }
    if (domain_.r_min < 0.0 && !flat) {
        throw InvalidArgument("negative radii are only meaningful for the flat profile");
    }
    if (domain_.left == LeftEnd::pole) {
        if (domain_.r_min != 0.0) throw InvalidArgument("a pole requires r_min = 0");
        if (std::abs(profile_.sigma(0.0)) > 1e-14) {
            throw InvalidArgument("pole flag with sigma(0) != 0");
        }
        if (std::abs(profile_.dsigma(0.0) - 1.0) > 1e-10) {
            throw InvalidArgument("pole flag with sigma'(0) != 1 (metric not smooth at the pole)");
        }
    } else if (!(profile_.sigma(domain_.r_min) > 0.0)) {
        throw InvalidArgument("sigma must be positive at an open left end");
    }
}

double ModelManifold::area_density(double r) const {
    if (n_ == 1) return 1.0;
    return sphere_area(n_) * std::pow(profile_.sigma(r), n_ - 1);
}

double ModelManifold::log_area_density(double r) const {
    return std::log(sphere_area(n_)) + (n_ - 1) * profile_.log_sigma(r);
}

double ModelManifold::log_area_derivative(double r) const {
    if (n_ == 1) return 0.0;
    return (n_ - 1) * profile_.log_derivative(r);
}

ModelManifold ModelManifold::with_domain(Domain domain) const {
    return ModelManifold(profile_, n_, domain);
}

std::pair<ModelManifold, GridPtr> make_model(const WarpingProfile& profile, int n, Domain domain,
                                             std::size_t nodes) {
    if (nodes < 8) throw InvalidArgument("a grid needs at least 8 nodes");
    ModelManifold manifold(profile, n, domain);

    auto grid = std::shared_ptr<RadialGrid>(new RadialGrid(manifold));
    const double a = domain.r_min;
    const double b = domain.r_max;
    const double h = (b - a) / static_cast<double>(nodes - 1);
    grid->h_ = h;
    grid->r_.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) grid->r_[i] = a + static_cast<double>(i) * h;
    grid->r_.back() = b;

    const bool pole = manifold.has_pole();
    grid->s_.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double s = (pole && i == 0) ? 0.0 : manifold.area_density(grid->r_[i]);
        if (!std::isfinite(s) || (!(s > 0.0) && !(pole && i == 0))) {
            throw InvalidArgument("area density not positive and finite at r = " +
                                  std::to_string(grid->r_[i]));
        }
        grid->s_[i] = s;
    }

    auto inverse_density = [&](double r) { return 1.0 / manifold.area_density(r); };
    grid->s_half_.resize(nodes - 1);
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
        const double lo = grid->r_[i];
        const double hi = grid->r_[i + 1];
        double w = 0.0;
        if (pole) {
            w = manifold.area_density(0.5 * (lo + hi));
        } else {
            w = (hi - lo) / gauss5(inverse_density, lo, hi);
        }
        if (!std::isfinite(w) || !(w > 0.0)) {
            throw InvalidArgument("half-node density degenerate near r = " + std::to_string(lo));
        }
        grid->s_half_[i] = w;
    }

    grid->mu_.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) grid->mu_[i] = h * grid->s_[i];
    grid->mu_.front() *= 0.5;
    grid->mu_.back() *= 0.5;

    grid->mass_ = grid->mu_;
    if (pole) {
        auto density = [&](double r) { return manifold.area_density(r); };
        for (std::size_t i = 0; i < nodes; ++i) {
            const double lo = std::max(grid->r_[i] - 0.5 * h, grid->r_.front());
            const double hi = std::min(grid->r_[i] + 0.5 * h, grid->r_.back());
            grid->mass_[i] = gauss5(density, lo, hi);
        }
    }
    return {std::move(manifold), std::move(grid)};
}

std::pair<std::size_t, std::size_t> RadialGrid::node_range(Interval region) const {
    const double slack = 1e-9 * h_;
    std::size_t first = r_.size();
    std::size_t last = 0;
    for (std::size_t i = 0; i < r_.size(); ++i) {
        if (r_[i] >= region.lo - slack && r_[i] <= region.hi + slack) {
            first = std::min(first, i);
            last = std::max(last, i);
        }
    }
    if (first >= r_.size() || last <= first) {
        throw InvalidArgument("region [" + std::to_string(region.lo) + ", " +
                              std::to_string(region.hi) + "] holds fewer than two grid nodes");
    }
    return {first, last};
}

GridPtr RadialGrid::window(const GridPtr& grid, std::size_t first, std::size_t last) {
    if (!grid || last <= first || last >= grid->size()) {
        throw InvalidArgument("invalid window node range");
    }
    const bool keeps_pole = first == 0 && grid->manifold_.has_pole();
    Domain d{grid->r_[first], grid->r_[last], keeps_pole ? LeftEnd::pole : LeftEnd::open,
             RightEnd::boundary};
    auto sub = std::shared_ptr<RadialGrid>(new RadialGrid(grid->manifold_.with_domain(d)));
    sub->h_ = grid->h_;
    sub->r_.assign(grid->r_.begin() + first, grid->r_.begin() + last + 1);
    sub->s_.assign(grid->s_.begin() + first, grid->s_.begin() + last + 1);
    sub->s_half_.assign(grid->s_half_.begin() + first, grid->s_half_.begin() + last);
    sub->mu_.resize(sub->r_.size());
    for (std::size_t i = 0; i < sub->r_.size(); ++i) sub->mu_[i] = sub->h_ * sub->s_[i];
    sub->mu_.front() *= 0.5;
    sub->mu_.back() *= 0.5;
    sub->mass_.assign(grid->mass_.begin() + first, grid->mass_.begin() + last + 1);
    if (!keeps_pole) sub->mass_.front() = sub->mu_.front();
    sub->mass_.back() = sub->mu_.back();
    sub->parent_ = grid;
    sub->offset_ = grid->offset_ + first;
    return sub;
}

GridPtr RadialGrid::window(const GridPtr& grid, Interval region) {
    const auto [first, last] = grid->node_range(region);
    return window(grid, first, last);
}

const RadialGrid* RadialGrid::root() const { return parent_ ? parent_->root() : this; }

double RadialGrid::integrate(std::span<const double> f, Interval region) const {
    if (f.size() != r_.size()) throw InvalidArgument("integrand size does not match the grid");
    const double a = std::max(region.lo, r_.front());
    const double b = std::min(region.hi, r_.back());
    if (!(b > a)) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < r_.size(); ++i) {
        const double x0 = r_[i];
        const double x1 = r_[i + 1];
        if (x1 <= a || x0 >= b) continue;
        const double g0 = f[i] * s_[i];
        const double g1 = f[i + 1] * s_[i + 1];
        if (x0 >= a && x1 <= b) {
            total += 0.5 * (x1 - x0) * (g0 + g1);
            continue;
        }
        const double lo = std::max(a, x0);
        const double hi = std::min(b, x1);
        auto interp = [&](double x) { return g0 + (g1 - g0) * (x - x0) / (x1 - x0); };
        total += 0.5 * (hi - lo) * (interp(lo) + interp(hi));
    }
    return total;
}

double RadialGrid::integrate(std::span<const double> f) const {
    if (f.size() != r_.size()) throw InvalidArgument("integrand size does not match the grid");
    double total = 0.0;
    for (std::size_t i = 0; i < r_.size(); ++i) total += f[i] * mu_[i];
    return total;
}

double annulus_norm(const GridFunction& u, double p, double k) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("annulus_norm needs 1 <= p < inf");
    const RadialGrid& g = *u.grid();
    if (!(k > 0.0)) throw InvalidArgument("annulus radius must be positive");
    if (2.0 * k > g.manifold().r_max() * (1.0 + 1e-12)) {
        throw InvalidArgument("annulus B_2k \\ B_k leaves the truncated domain");
    }
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(std::abs(u[i]), p);
    return std::pow(g.integrate(f, {k, 2.0 * k}), 1.0 / p);
}

CompletenessIndicator stochastic_completeness_indicator(const ModelManifold& m, double R) {
    if (!m.has_pole()) {
        throw InvalidArgument("stochastic completeness indicator needs a pole (punctured models rejected)");
    }
    if (!(R > 1.0) || R > m.r_max() * (1.0 + 1e-12)) {
        throw InvalidArgument("probe radius must satisfy 1 < R <= r_max");
    }
    const std::size_t steps = std::max<std::size_t>(20000, static_cast<std::size_t>(std::ceil(R * 2000.0)));
    const double h = R / static_cast<double>(steps);
    const int n = m.dimension();

    // q = V/S, advanced with an exponential-exact cell update: log S is taken
    // linear on each cell, so V_{j+1} = V_j + S_j (e^{ch} - 1)/c.
    std::vector<double> q(steps + 1, 0.0);
    q[1] = h / n;
    double log_s = m.log_area_density(h);
    for (std::size_t j = 1; j < steps; ++j) {
        const double r_next = static_cast<double>(j + 1) * h;
        const double log_s_next = m.log_area_density(r_next);
        const double x = log_s_next - log_s;
        const double decay = std::exp(-x);
        const double gain = std::abs(x) < 1e-12 ? h : h * (-std::expm1(-x)) / x;
        q[j + 1] = q[j] * decay + gain;
        log_s = log_s_next;
    }

    CompletenessIndicator out;
    for (std::size_t j = 0; j < steps; ++j) {
        const double x0 = static_cast<double>(j) * h;
        const double x1 = x0 + h;
        if (x1 <= 1.0) continue;
        const double lo = std::max(1.0, x0);
        const double q_lo = q[j] + (q[j + 1] - q[j]) * (lo - x0) / h;
        out.integral += 0.5 * (x1 - lo) * (q_lo + q[j + 1]);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    const std::size_t stride = std::max<std::size_t>(1, steps / 4000);
    for (std::size_t j = steps / 2; j <= steps; j += stride) {
        if (!(q[j] > 0.0)) continue;
        const double x = std::log(static_cast<double>(j) * h);
        const double y = std::log(q[j]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    const double c = static_cast<double>(count);
    out.tail_slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
    if (out.tail_slope > -0.9) {
        out.verdict = CompletenessVerdict::complete_like;
    } else if (out.tail_slope < -1.1) {
        out.verdict = CompletenessVerdict::incomplete_like;
    }
    return out;
}

std::string to_string(CompletenessVerdict v) {
    switch (v) {
        case CompletenessVerdict::complete_like: return "complete-like";
        case CompletenessVerdict::incomplete_like: return "incomplete-like";
        case CompletenessVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

}  // namespace poslab
