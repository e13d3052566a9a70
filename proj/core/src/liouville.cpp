#include "poslab/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poslab/errors.hpp"

namespace poslab {
namespace {

void require_exponent(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("exponent must satisfy 1 < p < inf");
}

IneqCertificate subharmonic_certificate(const GridFunction& u, double c,
                                        const std::optional<GridFunction>& tolerance = std::nullopt) {
    CertificateOptions opt;
    opt.c = c;
    opt.node_tolerance = tolerance;
    IneqCertificate cert = check_subsolution(u, laplacian(u.grid()), opt);
    if (!cert.pass) {
        throw PreconditionError("u is not certified subharmonic (worst pairing " +
                                std::to_string(cert.min_pairing) + " at r = " +
                                std::to_string(cert.worst_radius) + ")");
    }
    return cert;
}

double power_integral(const GridFunction& u, double p, Interval region) {
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(std::abs(u[i]), p);
    return u.grid()->integrate(f, region);
}

}  // namespace

GridFunction cutoff(const GridPtr& grid, double k) {
    if (!(k > 0.0)) throw InvalidArgument("cutoff radius must be positive");
    if (2.0 * k > grid->manifold().r_max() * (1.0 + 1e-12)) {
        throw InvalidArgument("cutoff support B_2k leaves the truncated domain");
    }
    return GridFunction::sample(grid, [k](double r) {
        if (r <= k) return 1.0;
        if (r >= 2.0 * k) return 0.0;
        return (2.0 * k - r) / k;
    });
}

CutoffFamily cutoff_family(const GridPtr& grid, const std::vector<double>& ks) {
    CutoffFamily fam;
    for (double k : ks) {
        GridFunction phi = cutoff(grid, k);
        double slope = 0.0;
        for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
            slope = std::max(slope, std::abs(phi[i + 1] - phi[i]) / grid->spacing());
        }
        if (slope > 2.0 / k) throw NumericalError("cutoff gradient exceeds 2/k");
        fam.radii.push_back(k);
        fam.phi.push_back(std::move(phi));
        fam.max_slope.push_back(slope);
    }
    return fam;
}

double caccioppoli_constant(double p, double eps) {
    require_exponent(p);
    if (!(eps > 0.0) || !(eps < p - 1.0)) throw InvalidArgument("Caccioppoli needs 0 < eps < p - 1");
    return 4.0 * eps * (p - 1.0 - eps) / (p * p);
}

CaccioppoliResult caccioppoli_check(const GridFunction& u, double p, double eps, const GridFunction& phi) {
    CaccioppoliResult out;
    out.constant = caccioppoli_constant(p, eps);
    if (!same_grid(*u.grid(), *phi.grid())) throw InvalidArgument("u and phi live on different grids");
    if (!(u.min() > 0.0)) throw InvalidArgument("Caccioppoli needs u > 0 (apply a positive shift first)");
    out.certificate = subharmonic_certificate(u, 10.0);

    const RadialGrid& g = *u.grid();
    const double h = g.spacing();
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double w = g.half_density(i);
        const double dv = (std::pow(u[i + 1], 0.5 * p) - std::pow(u[i], 0.5 * p)) / h;
        const double phi_bar = 0.5 * (phi[i] + phi[i + 1]);
        const double dphi = (phi[i + 1] - phi[i]) / h;
        const double up_bar = 0.5 * (std::pow(u[i], p) + std::pow(u[i + 1], p));
        out.lhs += phi_bar * phi_bar * w * dv * dv * h;
        out.rhs += up_bar * w * dphi * dphi * h;
    }
    out.lhs *= out.constant;
    out.tolerance = 1e-9 * out.rhs + std::numeric_limits<double>::min();
    out.pass = out.lhs <= out.rhs + out.tolerance;
    return out;
}

EnergyTable energy_decay_test(const GridFunction& u, double p, const std::vector<double>& ks,
                              const EnergyOptions& options) {
    require_exponent(p);
    if (u.min() < 0.0) throw InvalidArgument("energy test needs u >= 0");
    EnergyTable table;
    table.delta = options.delta;
    table.certificate = subharmonic_certificate(u, options.c, options.node_tolerance);

    const RadialGrid& g = *u.grid();
    const double h = g.spacing();
    const double r_max = g.manifold().r_max();
    for (double k : ks) {
        if (!(k > 0.0) || 2.0 * k > r_max * (1.0 + 1e-12)) {
            throw InvalidArgument("energy radius k = " + std::to_string(k) + " escapes the domain");
        }
    }

    const double full = power_integral(u, p, {g.node(0), r_max});
    const double half = power_integral(u, p, {g.node(0), 0.5 * r_max});
    table.lp_relative_change = full > 0.0 ? (full - half) / full : 0.0;
    table.lp_member = table.lp_relative_change <= options.lp_change;

    const double cp = (p / (p - 1.0)) * (p / (p - 1.0));
    table.dominated = true;
    std::vector<double> lk, lr;
    for (double k : ks) {
        EnergyRow row;
        row.k = k;
        for (std::size_t i = 0; i + 1 < u.size() && g.node(i + 1) <= k * (1.0 + 1e-12); ++i) {
            const double dv = (std::pow(u[i + 1], 0.5 * p) - std::pow(u[i], 0.5 * p)) / h;
            row.lhs += g.half_density(i) * dv * dv * h;
        }
        row.annulus_mass = power_integral(u, p, {k, 2.0 * k});
        row.rhs = 4.0 / (k * k) * row.annulus_mass;
        row.bound = cp * row.annulus_mass / (k * k);
        row.budget_bound = 4.0 * row.bound;
        row.dominated = row.lhs <= row.bound * (1.0 + 1e-9) + 1e-300;
        table.dominated = table.dominated && row.dominated;
        if (row.rhs > 0.0) {
            lk.push_back(k);
            lr.push_back(row.rhs);
        }
        table.rows.push_back(row);
    }
    if (lk.size() >= 2) {
        table.slope = loglog_slope(lk, lr);
    } else {
        table.slope = -std::numeric_limits<double>::infinity();
    }
    table.decays = table.slope <= -options.delta;
    return table;
}

std::string to_string(VerdictKind v) {
    switch (v) {
        case VerdictKind::constant: return "constant";
        case VerdictKind::nonconstant_witness: return "nonconstant-witness";
        case VerdictKind::not_applicable: return "not-applicable";
    }
    return "not-applicable";
}

LiouvilleVerdict liouville_verdict(const GridFunction& u, double p, const std::vector<double>& ks,
                                   const EnergyOptions& options) {
    const ModelManifold& m = u.grid()->manifold();
    if (!m.has_pole() || m.right() != RightEnd::truncation) {
        throw InvalidArgument("Liouville verdict needs a complete model (pole + truncation); "
                              "see the counterexample catalog for incomplete ones");
    }
    LiouvilleVerdict v;
    if (!(p > 1.0) || !std::isfinite(p)) {
        v.reason = "finite p > 1 required";
        return v;
    }
    if (u.min() < 0.0) {
        v.reason = "u takes negative values";
        return v;
    }
    try {
        v.table = energy_decay_test(u, p, ks, options);
    } catch (const PreconditionError& e) {
        v.reason = e.what();
        return v;
    }
    if (!v.table->lp_member) {
        v.reason = "u not in L^p: relative mass change " + std::to_string(v.table->lp_relative_change) +
                   " between B_{R/2} and B_R";
        return v;
    }
    if (!v.table->decays) {
        v.reason = "energy rhs does not decay (slope " + std::to_string(v.table->slope) + ")";
        return v;
    }

    const RadialGrid& g = *u.grid();
    const double kmax = *std::max_element(ks.begin(), ks.end());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double t_length = 0.0;
    for (std::size_t i = 0; i < u.size() && g.node(i) <= kmax * (1.0 + 1e-12); ++i) {
        lo = std::min(lo, u[i]);
        hi = std::max(hi, u[i]);
        if (i + 1 < u.size() && g.node(i + 1) <= kmax * (1.0 + 1e-12)) {
            t_length += g.spacing() / g.half_density(i);
        }
    }
    double lhs = 0.0;
    for (const auto& row : v.table->rows) {
        if (row.k == kmax) lhs = row.lhs;
    }
    v.oscillation = hi - lo;
    v.oscillation_tol = 1e-8 * (1.0 + u.max_abs());
    v.poincare_bound = std::sqrt(lhs * t_length);
    if (v.oscillation <= v.oscillation_tol) {
        v.kind = VerdictKind::constant;
        v.reason = "energy decays and u is constant on B_k";
    } else {
        v.kind = VerdictKind::nonconstant_witness;
        v.reason = "oscillation " + std::to_string(v.oscillation) + " on B_k despite decaying energy";
    }
    return v;
}

DoublingResult liouville_doubling(const WarpingProfile& profile, int n, double r_max, std::size_t nodes,
                                  const FunctionGenerator& make_u, double p, const std::vector<double>& ks,
                                  const EnergyOptions& options) {
    DoublingResult out;
    const auto base = make_model(profile, n, {0.0, r_max, LeftEnd::pole, RightEnd::truncation}, nodes);
    const auto big = make_model(profile, n, {0.0, 2.0 * r_max, LeftEnd::pole, RightEnd::truncation},
                                2 * nodes - 1);
    out.base = liouville_verdict(make_u(base.second), p, ks, options);
    out.doubled = liouville_verdict(make_u(big.second), p, ks, options);
    out.stable = out.base.kind == out.doubled.kind;
    return out;
}

GrowthClass subquadratic_class_check(const GridFunction& u, double p, const std::vector<double>& ks,
                                     double delta_fit) {
    if (ks.size() < 4) throw InvalidArgument("growth fit needs at least 4 radii");
    if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("growth fit needs 1 <= p < inf");
    GrowthClass out;
    out.delta_fit = delta_fit;
    std::vector<double> x, y;
    for (double k : ks) {
        const double a = annulus_norm(u, p, k);
        const double mass = std::pow(a, p);
        out.masses.push_back(mass);
        if (mass > 0.0) {
            x.push_back(k);
            y.push_back(mass);
        }
    }
    out.exponent = x.size() >= 2 ? loglog_slope(x, y) : -std::numeric_limits<double>::infinity();
    out.member = out.exponent < 2.0 - delta_fit;
    return out;
}

RegularityReport regularity_certificate(const GridFunction& u, double p, Interval omega, Interval omega1,
                                        std::size_t k_count, const SmoothingOptions& options) {
    require_exponent(p);
    RegularityReport rep;
    rep.p = p;
    rep.eps = 0.5 * (p - 1.0);
    const auto [first, last] = u.grid()->node_range(omega);
    for (std::size_t i = first; i <= last; ++i) {
        if (u[i] < 0.0) throw InvalidArgument("regularity certificate needs u >= 0 on Omega");
    }
    rep.sequence = monotone_smooth_approx(u, laplacian(u.grid()), omega, k_count, options);
    const ApproxSequence& seq = rep.sequence;
    const RadialGrid& inner = *seq.inner;
    const double a = inner.node(0);
    const double b = inner.node(inner.size() - 1);
    const bool pole = inner.manifold().has_pole();
    if (!(omega1.hi < b) || (!pole && !(omega1.lo > a)) || (pole && omega1.lo > 0.0 && !(omega1.lo > a))) {
        throw InvalidArgument("Omega_1 must lie strictly inside Omega' = [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    }
    const bool left_ramp = !(pole && omega1.lo <= 0.0);
    rep.grad_cutoff = 1.0 / (b - omega1.hi);
    if (left_ramp) rep.grad_cutoff = std::max(rep.grad_cutoff, 1.0 / (omega1.lo - a));

    auto shifted = [&](std::size_t k) { return seq.iterates[k] + 1.0 / static_cast<double>(k + 1); };
    const GridFunction first_it = shifted(0);
    const double integral = power_integral(first_it, p, {a, b});
    rep.bound = p * p * rep.grad_cutoff * rep.grad_cutoff / (4.0 * rep.eps * (p - 1.0 - rep.eps)) * integral;

    const auto [f1, l1] = inner.node_range(omega1);
    for (std::size_t i = f1; i <= l1; ++i) rep.sup_first = std::max(rep.sup_first, first_it[i]);
    for (std::size_t k = 0; k < seq.iterates.size(); ++k) {
        const GridFunction v = shifted(k).map([p](double s) { return std::pow(s, 0.5 * p); });
        const double s = w12_seminorm(v, omega1);
        rep.seminorms_sq.push_back(s * s);
        if (s * s > rep.bound) ++rep.violations;
    }
    rep.pass = rep.violations == 0 && std::isfinite(rep.bound);
    return rep;
}

double chain_rule_consistency(const GridFunction& u, double q) {
    if (!(q > 0.0) || !std::isfinite(q)) throw InvalidArgument("chain rule needs q > 0");
    if (!(u.min() > 0.0)) throw InvalidArgument("chain rule needs u bounded away from 0");
    const double h = u.grid()->spacing();
    double dev = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double lhs = (std::pow(u[i + 1], q) - std::pow(u[i], q)) / h;
        const double mid = 0.5 * (u[i] + u[i + 1]);
        const double rhs = q * std::pow(mid, q - 1.0) * (u[i + 1] - u[i]) / h;
        dev = std::max(dev, std::abs(lhs - rhs));
    }
    return dev;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope fit needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double observed_order(const std::vector<double>& errors) {
    std::vector<double> x(errors.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::ldexp(1.0, static_cast<int>(i));
    return -loglog_slope(x, errors);
}

}  // namespace poslab
