#include "poslab/kato.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poslab/errors.hpp"

namespace poslab {
namespace {

void require_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("H_eps needs eps > 0");
}

IneqCertificate input_certificate(const GridFunction& u, const DiscreteOperator& l, Interval omega,
                                  double c) {
    CertificateOptions opt;
    opt.c = c;
    IneqCertificate cert = check_subsolution(u, l, omega, opt);
    if (!cert.pass) {
        throw PreconditionError("L u >= 0 is not certified on Omega (worst pairing " +
                                std::to_string(cert.min_pairing) + " at r = " +
                                std::to_string(cert.worst_radius) + ")");
    }
    return cert;
}

IneqCertificate positive_part_certificate(const GridFunction& u, const DiscreteOperator& l,
                                          Interval region, const GridFunction& tolerance) {
    CertificateOptions opt;
    opt.node_tolerance = tolerance;
    return check_subsolution(u.positive_part(), l, region, opt);
}

}  // namespace

double h_epsilon(double t, double eps) {
    require_eps(eps);
    const double root = std::sqrt(t * t + eps);
    return t >= 0.0 ? 0.5 * (t + root) : 0.5 * eps / (root - t);
}

double h_epsilon_prime(double t, double eps) {
    require_eps(eps);
    const double root = std::sqrt(t * t + eps);
    return t >= 0.0 ? 0.5 * (1.0 + t / root) : 0.5 * eps / ((root - t) * root);
}

bool KatoReport::pass() const {
    bool ok = input.pass && output.pass && agreement;
    for (const auto& row : ladder) ok = ok && row.certificate.pass;
    for (const auto& row : ancona) ok = ok && row.certificate.pass;
    return ok;
}

KatoReport brezis_kato_check(const GridFunction& u, const DiscreteOperator& l, Interval omega,
                             const KatoOptions& options) {
    KatoReport rep;
    rep.route = KatoRoute::regularization;
    rep.input = input_certificate(u, l, omega, options.c);

    const auto [first, last] = l.grid()->node_range(omega);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = first; i <= last; ++i) {
        lo = std::min(lo, u[i]);
        hi = std::max(hi, u[i]);
    }
    const double scale = std::max(std::abs(lo), std::abs(hi));
    const double unit = scale > 0.0 ? scale * scale : 1.0;

    for (double mult : options.ladder) {
        LadderRow row;
        row.epsilon = mult * unit;
        row.envelope = 0.5 * std::sqrt(row.epsilon);
        const GridFunction hu = u.map([&](double s) { return h_epsilon(s, row.epsilon); });

        std::vector<double> pair(rep.input.nodes.size());
        for (std::size_t q = 0; q < pair.size(); ++q) {
            const std::size_t j = rep.input.nodes[q];
            pair[q] = l.flux_difference(hu.values(), j) -
                      l.potential(j) * u[j] * h_epsilon_prime(u[j], row.epsilon) * l.mass(j);
        }
        CertificateOptions opt;
        opt.node_tolerance = rep.input.tolerance_field;
        auto tol = certificate_tolerances(hu, l, rep.input.nodes, opt);
        row.certificate = make_certificate(l.grid(), rep.input.nodes, std::move(pair), std::move(tol));

        for (std::size_t i = first; i <= last; ++i) {
            row.nodal_deviation = std::max(row.nodal_deviation, std::abs(hu[i] - std::max(u[i], 0.0)));
            row.max_prime = std::max(row.max_prime, h_epsilon_prime(u[i], row.epsilon));
        }
        constexpr int samples = 10000;
        for (int s = 0; s <= samples; ++s) {
            const double x = lo + (hi - lo) * s / samples;
            row.range_deviation =
                std::max(row.range_deviation, std::abs(h_epsilon(x, row.epsilon) - std::max(x, 0.0)));
        }
        if (lo < 0.0 && hi > 0.0) {
            row.range_deviation = std::max(row.range_deviation, h_epsilon(0.0, row.epsilon));
        }
        rep.ladder.push_back(std::move(row));
    }

    rep.output = positive_part_certificate(u, l, omega, rep.input.tolerance_field);
    return rep;
}

KatoReport kato_via_appendix(const GridFunction& u, const DiscreteOperator& l, Interval omega,
                             const KatoOptions& options) {
    const KatoReport regular = brezis_kato_check(u, l, omega, options);

    KatoReport rep;
    rep.route = KatoRoute::appendix;
    rep.input = regular.input;

    const GridPtr window = RadialGrid::window(l.grid(), omega);
    const DiscreteOperator lw = l.restricted(window);
    const DiscreteOperator delta = lw.with_potential(std::vector<double>(lw.size(), 0.0));
    const GridFunction uw = u.on(window);

    std::vector<double> rhs(uw.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = lw.potential(i) * uw[i];
    const GridFunction g = solve_dirichlet(delta, GridFunction(window, rhs), 0.0, 0.0);
    const GridFunction w = uw - g;

    // w inherits the input tolerances plus the measured residual of the g solve.
    const GridFunction inherited = rep.input.tolerance_field.on(window);
    std::vector<double> tol(window->size(), 0.0);
    const auto nodes = hat_nodes(*window, {window->node(0), window->node(window->size() - 1)});
    CertificateOptions round_only;
    round_only.node_tolerance = GridFunction::constant(window, 0.0);
    const auto g_round = certificate_tolerances(g, delta, nodes, round_only);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        const std::size_t j = nodes[q];
        const double res = std::abs(delta.flux_difference(g.values(), j) - rhs[j] * delta.mass(j));
        rep.dirichlet_residual = std::max(rep.dirichlet_residual, res);
        tol[j] = inherited[j] + res + g_round[q];
    }
    rep.dirichlet_g = g;

    SmoothingOptions sopt;
    sopt.epsilon0 = options.epsilon0;
    sopt.node_tolerance = GridFunction(window, tol);
    const ApproxSequence seq =
        monotone_smooth_approx(w, delta, {window->node(0), window->node(window->size() - 1)},
                               options.k_count, sopt);

    const GridPtr inner = seq.inner;
    const DiscreteOperator delta_in = delta.restricted(inner);
    const DiscreteOperator l_in = lw.restricted(inner);
    const GridFunction g_in = g.on(inner);
    const GridFunction u_in = uw.on(inner);
    const GridFunction w_tol = seq.tolerance ? *seq.tolerance : GridFunction::constant(inner, 0.0);
    const auto in_nodes = hat_nodes(*inner, {inner->node(0), inner->node(inner->size() - 1)});

    for (std::size_t k = 0; k < seq.iterates.size(); ++k) {
        const GridFunction uk = seq.iterates[k] + g_in;
        const GridFunction ukp = uk.positive_part();
        std::vector<double> pair(in_nodes.size());
        for (std::size_t q = 0; q < in_nodes.size(); ++q) {
            const std::size_t j = in_nodes[q];
            const double indicator = uk[j] > 0.0 ? 1.0 : 0.0;
            pair[q] = delta_in.flux_difference(ukp.values(), j) -
                      indicator * l_in.potential(j) * u_in[j] * l_in.mass(j);
        }
        CertificateOptions opt;
        opt.node_tolerance = w_tol;
        auto t = certificate_tolerances(ukp, delta_in, in_nodes, opt);
        AnconaRow row;
        row.radius = seq.radii[k];
        row.certificate = make_certificate(inner, in_nodes, std::move(pair), std::move(t));
        rep.ancona.push_back(std::move(row));
    }

    rep.output = positive_part_certificate(u_in, l_in, {inner->node(0), inner->node(inner->size() - 1)},
                                           rep.input.tolerance_field);

    // Compare with the regularization route on the hats both certificates test.
    const std::size_t offset = inner->root_offset() - l.grid()->root_offset();
    double reg_min = std::numeric_limits<double>::infinity();
    double reg_tol = 0.0;
    for (std::size_t q = 0; q < regular.output.nodes.size(); ++q) {
        const std::size_t j = regular.output.nodes[q];
        if (j < offset || j >= offset + inner->size()) continue;
        const std::size_t local = j - offset;
        if (std::find(in_nodes.begin(), in_nodes.end(), local) == in_nodes.end()) continue;
        if (regular.output.pairings[q] < reg_min) {
            reg_min = regular.output.pairings[q];
            reg_tol = regular.output.tolerances[q];
        }
    }
    if (std::isfinite(reg_min) && !rep.output.pairings.empty()) {
        const auto it = std::min_element(rep.output.pairings.begin(), rep.output.pairings.end());
        const auto q = static_cast<std::size_t>(it - rep.output.pairings.begin());
        rep.agreement_gap = std::abs(reg_min - *it);
        rep.agreement_budget = reg_tol + rep.output.tolerances[q];
    }
    rep.agreement = regular.pass() == (rep.output.pass && rep.input.pass) &&
                    rep.agreement_gap <= rep.agreement_budget;
    rep.ladder = regular.ladder;
    return rep;
}

}  // namespace poslab
