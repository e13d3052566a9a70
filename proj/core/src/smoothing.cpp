#include "poslab/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poslab/errors.hpp"

namespace poslab {
namespace {

std::vector<double> t_coordinate(const DiscreteOperator& a) {
    const double h = a.grid()->spacing();
    std::vector<double> t(a.size(), 0.0);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) t[i + 1] = t[i] + h / a.conduction(i);
    return t;
}

}  // namespace

GridFunction green_coordinate(const DiscreteOperator& a, Interval omega) {
    const GridPtr window = RadialGrid::window(a.grid(), omega);
    if (window->manifold().has_pole()) {
        throw InvalidArgument("Green coordinate is unbounded at a pole; choose Omega away from r = 0");
    }
    const DiscreteOperator aw = a.restricted(window);
    return {window, t_coordinate(aw)};
}

GridFunction green_coordinate(const GroundState& gs) {
    if (gs.weighted.left() == EndCondition::pole_neumann) {
        throw InvalidArgument("Green coordinate is unbounded at a pole; choose Omega away from r = 0");
    }
    return {gs.weighted.grid(), t_coordinate(gs.weighted)};
}

double mollifier(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return 35.0 / 32.0 * q * q * q;
}

double ramp_excess(double y) {
    if (std::abs(y) >= 1.0) return 0.0;
    const double y2 = y * y;
    // P0(y) = int_{-1}^y rho,  P1(y) = int_{-1}^y s rho(s) ds
    const double p0 = 0.5 + 35.0 / 32.0 * y * (1.0 + y2 * (-1.0 + y2 * (0.6 - y2 / 7.0)));
    const double p1 = 35.0 / 32.0 * y2 * (0.5 + y2 * (-0.75 + y2 * (0.5 - y2 / 8.0))) - 35.0 / 256.0;
    return y * p0 - p1 - std::max(y, 0.0);
}

ApproxSequence monotone_smooth_approx(const GridFunction& u, const DiscreteOperator& a, Interval omega,
                                      std::size_t k_count, const SmoothingOptions& options) {
    if (k_count < 2) throw InvalidArgument("approximation sequence needs K >= 2");
    CertificateOptions copt;
    copt.c = options.c;
    copt.node_tolerance = options.node_tolerance;
    const IneqCertificate cert = check_subsolution(u, a, omega, copt);
    if (!cert.pass) {
        throw PreconditionError("input is not a certified subsolution on Omega (worst pairing " +
                                std::to_string(cert.min_pairing) + " at r = " +
                                std::to_string(cert.worst_radius) + ")");
    }

    GroundState gs = solve_dirichlet_ground(a, omega, 1.0);
    const GridPtr window = gs.alpha.grid();
    const std::size_t n = window->size();
    const GridFunction v = ground_transform(u, gs);
    const std::vector<double> t = t_coordinate(gs.weighted);
    const bool pole = gs.weighted.left() == EndCondition::pole_neumann;

    // Kinks of v in t. A pole behaves as a constant extension to the left.
    std::vector<double> kink(n, 0.0);
    for (std::size_t j = pole ? 0 : 1; j + 1 < n; ++j) {
        const double right = (v[j + 1] - v[j]) / (t[j + 1] - t[j]);
        const double left = j > 0 ? (v[j] - v[j - 1]) / (t[j] - t[j - 1]) : 0.0;
        kink[j] = right - left;
    }

    double eps0 = 0.0;
    if (options.epsilon0) {
        eps0 = *options.epsilon0;
        if (!(eps0 > 0.0)) throw InvalidArgument("epsilon0 must be positive");
    } else if (pole) {
        const double r_q = window->node(0) + 0.75 * (window->node(n - 1) - window->node(0));
        const auto [q, last] = window->node_range({r_q, window->node(n - 1)});
        // t is dominated by the pole cell; measure the last quarter in r instead.
        eps0 = t[last] - t[q];
    } else {
        eps0 = 0.1 * (t[n - 1] - t[0]);
    }

    std::size_t first = pole ? 0 : n;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = pole || t[i] >= t[0] + eps0;
        if (left_ok && t[i] <= t[n - 1] - eps0) {
            first = std::min(first, i);
            last = std::max(last, i);
        }
    }
    if (first >= n || last < first + 2) {
        throw InvalidArgument("Omega too small for epsilon0 = " + std::to_string(eps0) +
                              "; pass a smaller epsilon0");
    }
    const GridPtr inner = RadialGrid::window(window, first, last);

    ApproxSequence seq;
    seq.inner = inner;
    seq.base = u.on(inner);
    seq.ground = gs;
    seq.op = a.restricted(inner);
    seq.tolerance = cert.tolerance_field.on(inner);
    seq.t = GridFunction(window, t);
    for (std::size_t j = 0; j < n; ++j) seq.clamped_curvature += std::min(kink[j], 0.0);
    for (std::size_t i = pole ? 1 : 0; i + 1 < n; ++i) {
        seq.floor_spacing = std::max(seq.floor_spacing, t[i + 1] - t[i]);
    }

    std::vector<std::size_t> positive;
    for (std::size_t j = 0; j < n; ++j) {
        if (kink[j] > 0.0) positive.push_back(j);
    }
    for (std::size_t k = 0; k < k_count; ++k) {
        const double eps = std::ldexp(eps0, -static_cast<int>(k));
        seq.radii.push_back(eps);
        std::vector<double> uk(last - first + 1);
        std::size_t lo = 0;
        for (std::size_t i = first; i <= last; ++i) {
            while (lo < positive.size() && t[positive[lo]] <= t[i] - eps) ++lo;
            double excess = 0.0;
            for (std::size_t q = lo; q < positive.size() && t[positive[q]] < t[i] + eps; ++q) {
                const std::size_t j = positive[q];
                excess += kink[j] * eps * ramp_excess((t[i] - t[j]) / eps);
            }
            uk[i - first] = gs.alpha[i] * (v[i] + excess);
        }
        seq.iterates.emplace_back(inner, std::move(uk));
    }
    seq.floor_binds = seq.radii.back() < 2.0 * seq.floor_spacing;
    return seq;
}

ApproxReport verify_approx_properties(const ApproxSequence& seq, double tol_rel) {
    ApproxReport rep;
    const GridFunction& u = seq.base;
    const std::size_t kc = seq.iterates.size();
    double scale = u.max_abs();
    for (const auto& uk : seq.iterates) scale = std::max(scale, uk.max_abs());
    const double tol = tol_rel * std::max(scale, std::numeric_limits<double>::min());

    auto note = [&](std::size_t k, std::size_t i, double violation) {
        if (violation > rep.monotone_violation) {
            rep.monotone_violation = violation;
            rep.monotone_witness_k = k;
            rep.monotone_witness_node = i;
        }
    };
    for (std::size_t k = 0; k < kc; ++k) {
        const GridFunction& uk = seq.iterates[k];
        for (std::size_t i = 0; i < u.size(); ++i) {
            note(k, i, u[i] - uk[i]);
            if (k + 1 < kc) note(k + 1, i, seq.iterates[k + 1][i] - uk[i]);
        }
    }
    rep.monotone = rep.monotone_violation <= tol;

    if (kc >= 2 && seq.radii.size() == kc) {
        const GridFunction& first = seq.iterates.front();
        const GridFunction& last = seq.iterates.back();
        const double ratio = seq.radii.back() / seq.radii.front();
        rep.pointwise_margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double margin = ratio * (first[i] - u[i]) + tol - (last[i] - u[i]);
            if (margin < rep.pointwise_margin) {
                rep.pointwise_margin = margin;
                rep.pointwise_witness_node = i;
            }
        }
        rep.pointwise = rep.pointwise_margin >= 0.0;
    } else {
        rep.pointwise = false;
    }

    if (seq.op) {
        CertificateOptions copt;
        if (seq.tolerance) copt.node_tolerance = seq.tolerance;
        for (const auto& uk : seq.iterates) {
            rep.certificates.push_back(check_subsolution(uk, *seq.op, copt));
            rep.subsolutions = rep.subsolutions && rep.certificates.back().pass;
        }
    } else {
        rep.subsolutions = false;
    }

    const RadialGrid& g = *seq.inner;
    const Interval all{g.node(0), g.node(g.size() - 1)};
    for (const auto& uk : seq.iterates) {
        std::vector<double> d(u.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(uk[i] - u[i]);
        rep.l1_errors.push_back(g.integrate(d, all));
    }
    for (std::size_t k = 0; k + 1 < kc; ++k) {
        const double prev = rep.l1_errors[k];
        const double next = rep.l1_errors[k + 1];
        rep.l1_ratios.push_back(prev > 0.0 ? next / prev : 0.0);
        if (next > prev * (1.0 + 1e-12) + tol) rep.l1_decay = false;
    }
    return rep;
}

}  // namespace poslab
