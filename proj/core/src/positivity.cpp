#include "poslab/positivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "poslab/errors.hpp"

namespace poslab {
namespace {

std::string short_number(double x) {
    std::ostringstream out;
    out << x;
    return out.str();
}

Interval whole(const RadialGrid& g) { return {g.node(0), g.node(g.size() - 1)}; }

CatalogCheck relative_check(std::string name, double value, double reference, double tol) {
    const double err = std::abs(value - reference) / std::abs(reference);
    return {std::move(name), value, reference, tol, err <= tol};
}

CatalogCheck absolute_check(std::string name, double value, double reference, double tol) {
    return {std::move(name), value, reference, tol, std::abs(value - reference) <= tol};
}

CatalogCheck flag(std::string name, bool ok, double value = 0.0) {
    return {std::move(name), value, 0.0, 0.0, ok};
}

CatalogEntry punctured_ball(const CatalogOptions& o) {
    CatalogEntry e;
    e.name = "punctured-ball";
    e.manifold = "euclidean n=3 on (r_min, 1), open left end";
    e.failing_property = "P_2 (completeness removed at the puncture)";
    auto u_of = [](double r) { return -std::exp(-r) / r; };

    const auto model = make_model(WarpingProfile::euclidean(), 3,
                                  {o.r_min, 1.0, LeftEnd::open, RightEnd::boundary}, o.nodes);
    const GridPtr grid = model.second;
    const GridFunction u = GridFunction::sample(grid, u_of);
    e.u = u;

    const double l2sq = std::pow(lp_norm(u, 2.0), 2.0);
    e.checks.push_back(relative_check("l2-norm-squared", l2sq, 2.0 * std::numbers::pi * (1.0 - std::exp(-2.0)), 0.01));
    const IneqCertificate hyp = check_subsolution(-u, schrodinger(grid, 1.0));
    e.checks.push_back(flag("hypothesis-certificate", hyp.pass, hyp.min_pairing));
    e.checks.push_back(flag("u-negative", u.max() < 0.0, u.max()));
    e.checks.push_back(relative_check("min-u", u.min(), u_of(o.r_min), 1e-12));

    // L^p scan: increments of ||u||_p^p over decades of r_min. Near 0 the
    // integrand is 4 pi r^{2-p}, so the increment ratio is 10^{p-3}.
    std::vector<std::vector<double>> masses(o.scan_p.size());
    for (double r0 : o.scan_r_min) {
        const auto m = make_model(WarpingProfile::euclidean(), 3, {r0, 1.0, LeftEnd::open, RightEnd::boundary},
                                  o.scan_nodes);
        const GridFunction us = GridFunction::sample(m.second, u_of);
        for (std::size_t q = 0; q < o.scan_p.size(); ++q) {
            masses[q].push_back(std::pow(lp_norm(us, o.scan_p[q]), o.scan_p[q]));
        }
    }
    double estimate = 0.0;
    double below = -std::numeric_limits<double>::infinity();
    double above = std::numeric_limits<double>::infinity();
    const std::size_t levels = o.scan_r_min.size();
    if (levels < 3) throw InvalidArgument("p scan needs at least three r_min levels");
    for (std::size_t q = 0; q < o.scan_p.size(); ++q) {
        const auto& mq = masses[q];
        const double ratio = (mq[levels - 1] - mq[levels - 2]) / (mq[levels - 2] - mq[levels - 3]);
        const double decade = std::log10(o.scan_r_min[levels - 3] / o.scan_r_min[levels - 2]);
        estimate += o.scan_p[q] - std::log10(ratio) / decade;
        e.checks.push_back(flag("increment-ratio p=" + short_number(o.scan_p[q]), std::isfinite(ratio), ratio));
        if (ratio < 1.0) below = std::max(below, o.scan_p[q]);
        else above = std::min(above, o.scan_p[q]);
    }
    estimate /= static_cast<double>(o.scan_p.size());
    e.checks.push_back(absolute_check("lp-threshold", estimate, 3.0, 0.1));
    e.checks.push_back(flag("threshold-bracket", below < 3.0 && above > 3.0 && above - below <= 0.2 + 1e-12,
                            0.5 * (below + above)));

    const auto it = std::find(o.scan_p.begin(), o.scan_p.end(), 2.0);
    if (it != o.scan_p.end()) {
        const auto& m2 = masses[static_cast<std::size_t>(it - o.scan_p.begin())];
        const double change = std::abs(std::sqrt(m2[levels - 1]) - std::sqrt(m2[levels - 2])) / std::sqrt(m2[levels - 1]);
        e.checks.push_back({"violation-stable", change, 0.0, 0.01, change <= 0.01});
    }
    return e;
}

CatalogEntry stochastically_incomplete(const CatalogOptions& o) {
    CatalogEntry e;
    e.name = "stochastically-incomplete-Linfty";
    e.manifold = "superexp(" + std::to_string(o.growth) + ") n=" + std::to_string(o.dimension);
    e.failing_property = "L^infinity positivity preservation (bounded u = -h < 0 with (-Delta+1)u = 0)";
    const double a = o.growth;
    const int n = o.dimension;
    if (o.probes.size() < 2) throw InvalidArgument("need two probe radii");
    const double r_far = o.probes.back();
    const ModelManifold m(WarpingProfile::superexp(a), n, {0.0, r_far, LeftEnd::pole, RightEnd::truncation});

    const auto hs = radial_resolvent_ode(m, o.probes, o.ode_rtol);
    // h'/h = 1/(b r^2) + ... with b = 3 a (n-1); the tail of its integral
    // bounds sup h from the last computed value.
    const double b = 3.0 * a * (n - 1);
    auto tail = [&](double r) {
        return 1.0 / (b * r) + 1.0 / (2.0 * b * b * std::pow(r, 4)) - 1.0 / (5.0 * b * b * b * std::pow(r, 5));
    };
    std::vector<double> sup;
    for (std::size_t i = 0; i < hs.size(); ++i) sup.push_back(hs[i] * std::exp(tail(o.probes[i])));
    const double r1 = o.probes[o.probes.size() - 2];
    const double agreement = std::abs(sup.back() - sup[sup.size() - 2]) / sup.back();
    e.checks.push_back({"sup-agreement", agreement, 0.0, 1e-6, agreement <= 1e-6});
    e.checks.push_back(flag("h-finite", std::isfinite(sup.back()) && sup.back() > 1.0, sup.back()));
    const double raw = hs.back() / hs[hs.size() - 2] - 1.0;
    const double predicted = 1.0 / (b * r1) - 1.0 / (b * r_far);
    e.checks.push_back(relative_check("raw-increment", raw, predicted, 0.05));

    const ModelManifold flat3(WarpingProfile::euclidean(), 3,
                              {0.0, o.contrast_radius, LeftEnd::pole, RightEnd::truncation});
    const double h20 = radial_resolvent_ode(flat3, {o.contrast_radius}, o.ode_rtol).front();
    e.checks.push_back(relative_check("contrast-euclidean", h20,
                                      std::sinh(o.contrast_radius) / o.contrast_radius, 1e-3));

    // Grid-level confirmation on the part of the model where S stays finite.
    const auto model = make_model(WarpingProfile::superexp(a), n,
                                  {0.0, 2.5, LeftEnd::pole, RightEnd::truncation}, 2501);
    const GridPtr grid = model.second;
    std::vector<double> radii(grid->nodes().begin() + 1, grid->nodes().end());
    auto hv = radial_resolvent_ode(model.first, radii, o.ode_rtol);
    hv.insert(hv.begin(), 1.0);
    const GridFunction h(grid, hv);
    e.u = -h;
    const IneqCertificate cert = check_subsolution(h, schrodinger(grid, 1.0), Interval{0.0, 2.4});
    e.checks.push_back(flag("hypothesis-certificate", cert.pass, cert.min_pairing));
    e.checks.push_back(flag("u-negative", (-h).max() < 0.0, (-h).max()));

    const auto ind = stochastic_completeness_indicator(m, r_far);
    e.checks.push_back(flag("completeness-indicator", ind.verdict == CompletenessVerdict::incomplete_like,
                            ind.integral));
    return e;
}

CatalogEntry bounded_harmonic(const CatalogOptions& o) {
    CatalogEntry e;
    e.name = "hyperbolic-bounded-harmonic";
    e.manifold = "hyperbolic n=2 on [1, " + std::to_string(o.harmonic_r_max) + "]";
    e.failing_property = "L^infinity Liouville (bounded nonconstant harmonic function)";
    const auto model = make_model(WarpingProfile::hyperbolic(), 2,
                                  {1.0, o.harmonic_r_max, LeftEnd::open, RightEnd::truncation},
                                  o.harmonic_nodes);
    const GridPtr grid = model.second;
    const DiscreteOperator lap = laplacian(grid);
    const double omega = sphere_area(2);
    // u = omega * t with t the Green coordinate: u(r) = int_1^r d rho / sinh rho.
    const GridFunction t = green_coordinate(lap, whole(*grid));
    const GridFunction u = omega * t;
    e.u = u;
    e.checks.push_back(absolute_check("sup-u", u.max(), -std::log(std::tanh(0.5)), 1e-4));
    const IneqCertificate sub = check_subsolution(u, lap);
    const IneqCertificate super = check_subsolution(-u, lap);
    e.checks.push_back(flag("harmonic-certificate", sub.pass && super.pass,
                            std::min(sub.min_pairing, super.min_pairing)));
    e.checks.push_back(flag("nonconstant", u.max() - u.min() > 0.5, u.max() - u.min()));
    const double closed = std::log(std::tanh(0.5 * o.harmonic_r_max)) - std::log(std::tanh(0.5));
    e.checks.push_back(absolute_check("closed-form-at-r_max", u[u.size() - 1], closed, 1e-8));
    return e;
}

}  // namespace

std::string to_string(PPConclusion c) {
    switch (c) {
        case PPConclusion::nonnegative: return "nonnegative";
        case PPConclusion::violated: return "violated";
        case PPConclusion::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

PPVerdict pp_experiment(const GridFunction& u, double p, const PPOptions& options) {
    const GridPtr& grid = u.grid();
    const ModelManifold& m = grid->manifold();
    if (!m.has_pole() || m.right() != RightEnd::truncation) {
        throw InvalidArgument("pp_experiment needs a complete model (pole + truncation)");
    }
    PPVerdict v;
    const DiscreteOperator l1 = schrodinger(grid, 1.0);
    const GridFunction minus_u = -u;
    v.hypothesis = check_subsolution(minus_u, l1, CertificateOptions{options.kato.c, {}, {}});
    if (!v.hypothesis.pass) {
        throw PreconditionError("(-Delta + 1) u >= 0 is not certified (worst pairing " +
                                std::to_string(v.hypothesis.min_pairing) + " at r = " +
                                std::to_string(v.hypothesis.worst_radius) + ")");
    }
    v.kato = brezis_kato_check(minus_u, l1, whole(*grid), options.kato);

    const GridFunction z = minus_u.positive_part();
    CertificateOptions inherit;
    inherit.node_tolerance = v.hypothesis.tolerance_field;
    v.subharmonic = check_subsolution(z, laplacian(grid), inherit);

    std::vector<double> ks = options.ks;
    if (ks.empty()) {
        const double r = m.r_max();
        ks = {r / 16.0, r / 8.0, r / 4.0, r / 2.0};
    }
    EnergyOptions eopt = options.energy;
    eopt.node_tolerance = v.hypothesis.tolerance_field;
    v.liouville = liouville_verdict(z, p, ks, eopt);
    v.negative_part_norm = lp_norm(z, p);
    v.negative_part_max = z.max();
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] == v.negative_part_max) {
            v.witness_node = i;
            v.witness_radius = grid->node(i);
            break;
        }
    }

    const GridFunction one = GridFunction::constant(grid, 1.0);
    const double vol = lp_norm(one, 1.0);
    const double vol_half = lp_norm(one, 1.0, {0.0, 0.5 * m.r_max()});
    const bool finite_volume = (vol - vol_half) / vol <= eopt.lp_change;
    v.zero_route = finite_volume ? "direct norm (finite volume: constants are in L^p)"
                                 : "L^p membership (nonzero constants are not in L^p)";

    const double zero_tol = 1e-12 * (1.0 + u.max_abs());
    const bool vanishes = v.negative_part_max <= zero_tol;
    if (v.subharmonic.pass && v.liouville.kind == VerdictKind::constant && vanishes) {
        v.conclusion = PPConclusion::nonnegative;
    } else if (!vanishes && (v.liouville.kind == VerdictKind::nonconstant_witness ||
                             v.liouville.kind == VerdictKind::constant)) {
        v.conclusion = PPConclusion::violated;
    }
    return v;
}

bool CatalogEntry::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CatalogCheck& c) { return c.pass; });
}

const CatalogCheck& CatalogEntry::check(const std::string& key) const {
    for (const auto& c : checks) {
        if (c.name == key) return c;
    }
    throw InvalidArgument("catalog entry has no check named '" + key + "'");
}

CatalogEntry counterexample_catalog(const std::string& name, const CatalogOptions& options) {
    if (name == "punctured-ball") return punctured_ball(options);
    if (name == "stochastically-incomplete-Linfty") return stochastically_incomplete(options);
    if (name == "hyperbolic-bounded-harmonic") return bounded_harmonic(options);
    throw InvalidArgument("unknown catalog entry '" + name + "'");
}

std::vector<double> radial_resolvent_ode(const ModelManifold& m, const std::vector<double>& radii,
                                         double rtol) {
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 2>;
    if (!m.has_pole()) throw InvalidArgument("radial ODE starts at a pole");
    if (radii.empty()) return {};
    const double r0 = std::min(1e-4, 0.5 * radii.front());
    if (!std::is_sorted(radii.begin(), radii.end()) || !(radii.front() > 0.0)) {
        throw InvalidArgument("ODE output radii must be positive and increasing");
    }
    const double n = m.dimension();
    // Even series h = 1 + r^2 / (2n) + O(r^4).
    State y{1.0 + r0 * r0 / (2.0 * n), r0 / n};
    auto rhs = [&m](const State& s, State& ds, double r) {
        ds[0] = s[1];
        ds[1] = s[0] - m.log_area_derivative(r) * s[1];
    };

    std::vector<double> times;
    times.push_back(r0);
    times.insert(times.end(), radii.begin(), radii.end());
    std::vector<double> out;
    out.reserve(radii.size());
    bool first = true;
    auto observe = [&](const State& s, double) {
        if (first) {
            first = false;
            return;
        }
        out.push_back(s[0]);
    };
    auto stepper = ode::make_dense_output(1e-14, rtol, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-6, observe);
    for (double h : out) {
        if (!std::isfinite(h)) throw NumericalError("radial ODE produced a non-finite value");
    }
    return out;
}

ResolventView resolvent_view(const GridPtr& grid, const std::vector<std::pair<std::string, GridFunction>>& fs) {
    ResolventView view;
    const DiscreteOperator l1 = schrodinger(grid, 1.0);
    view.pass = true;
    for (const auto& [label, f] : fs) {
        if (f.min() < 0.0) throw InvalidArgument("resolvent_view needs f >= 0");
        const GridFunction u = solve_dirichlet(l1, -f, 0.0, 0.0);
        ResolventRow row;
        row.label = label;
        row.min_u = u.min();
        row.max_u = u.max();
        row.pass = row.min_u >= -1e-14 * u.max_abs();
        view.pass = view.pass && row.pass;
        view.rows.push_back(std::move(row));
    }
    view.matrix = resolvent_positivity(grid, 1.0);
    view.pass = view.pass && view.matrix.pass;
    return view;
}

}  // namespace poslab
