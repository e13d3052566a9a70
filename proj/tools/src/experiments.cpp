#include "poslab/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "poslab/errors.hpp"
#include "poslab/groundstate.hpp"
#include "poslab/kato.hpp"
#include "poslab/liouville.hpp"
#include "poslab/operators.hpp"
#include "poslab/positivity.hpp"
#include "poslab/smoothing.hpp"

namespace poslab::harness {
namespace {

using nlohmann::json;
using Row = std::vector<Table::Cell>;

long long as_int(std::size_t v) { return static_cast<long long>(v); }

json certificate_json(const IneqCertificate& c) {
    return {{"min_pairing", c.min_pairing},
            {"worst_radius", c.worst_radius},
            {"tolerance", c.tolerance},
            {"hats_tested", c.hats_tested}};
}

GridFunction bump(const GridPtr& g, Interval where) {
    const double lo = where.lo, hi = where.hi;
    return GridFunction::sample(g, [=](double r) {
        if (r <= lo || r >= hi) return 0.0;
        const double s = 4.0 * (r - lo) * (hi - r) / ((hi - lo) * (hi - lo));
        return s * s * s;
    });
}

Interval shrink(Interval i, double fraction) {
    const double w = i.hi - i.lo;
    return {i.lo + fraction * w, i.hi - fraction * w};
}

DiscreteOperator op_for(const GridPtr& g, double lambda) {
    return lambda > 0.0 ? schrodinger(g, lambda) : laplacian(g);
}

void pw_identity(const ExperimentConfig& cfg, const GridPtr& g, ExperimentReport& rep) {
    const auto& a = cfg.analysis;
    const DiscreteOperator l = schrodinger(g, a.lambda);
    const GroundState gs = solve_dirichlet_ground(l, *a.omega, 1.0);
    const double amin = gs.alpha.min();
    rep.stage("ground-state", amin > 0.0, {{"alpha_min", amin}, {"alpha_max", gs.alpha.max()}});

    const PWResidual res = verify_pw_identity(gs, bump(g, shrink(*a.omega, 0.1)));
    const bool adjoint_ok = res.adjoint <= cfg.tolerances.adjoint * res.adjoint_scale;
    rep.stage("pw-identity", adjoint_ok,
              {{"strong", res.strong}, {"adjoint", res.adjoint}, {"adjoint_scale", res.adjoint_scale}});
    rep.errors["strong_residual"] = res.strong;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ua(0.5, 2.0), uc(-0.5, 0.5), ub(-0.05, 0.05);
    Table t{{"trial", "a", "c", "b", "forward", "backward", "pulled_back", "agree"}, {}};
    const GridFunction f = make_input(a, g);
    const GridFunction phi = bump(g, shrink(*a.omega, 0.2));
    std::size_t agree = 0;
    for (std::size_t trial = 0; trial < a.trials; ++trial) {
        const double ca = ua(rng), cc = uc(rng), cb = ub(rng);
        const GridFunction u = ca * f + cc + cb * phi;
        CertificateOptions base;
        base.c = cfg.tolerances.c;
        const IneqCertificate forward = check_subsolution(u, l, *a.omega, base);
        CertificateOptions moved;
        moved.node_tolerance = transported_tolerance(forward, gs);
        const GridFunction v = ground_transform(u, gs);
        const IneqCertificate back = check_subsolution(v, gs.weighted, moved);

        const auto window = gs.alpha.grid();
        std::vector<double> tol(window->size()), uv(window->size());
        for (std::size_t i = 0; i < tol.size(); ++i) {
            tol[i] = back.tolerance_field[i] / gs.alpha[i];
            uv[i] = gs.alpha[i] * v[i];
        }
        CertificateOptions pulled;
        pulled.node_tolerance = GridFunction(window, tol);
        const IneqCertificate again = check_subsolution(GridFunction(window, uv), gs.source, pulled);
        const bool ok = forward.pass == back.pass && again.pass == back.pass;
        agree += ok ? 1 : 0;
        t.add({as_int(trial), ca, cc, cb, forward.pass, back.pass, again.pass, ok});
    }
    rep.tables["transport"] = t;
    rep.stage("transport", agree == a.trials, {{"agree", agree}, {"trials", a.trials}});
}

void smoothing_abc(const ExperimentConfig& cfg, const GridPtr& g, ExperimentReport& rep) {
    const auto& a = cfg.analysis;
    const GridFunction u = make_input(a, g);
    const ApproxSequence seq = monotone_smooth_approx(u, op_for(g, a.lambda), *a.omega, a.k_count);
    const ApproxReport r = verify_approx_properties(seq, cfg.tolerances.tol_rel);
    rep.stage("a-monotone", r.monotone,
              {{"witness_k", r.monotone_witness_k}, {"witness_node", r.monotone_witness_node},
               {"violation", r.monotone_violation}});
    rep.stage("b-nodewise", r.pointwise, {{"margin", r.pointwise_margin}});
    rep.stage("c-subsolutions", r.subsolutions);

    const double scale = u.max_abs() * static_cast<double>(g->size());
    const bool trivial = std::all_of(r.l1_errors.begin(), r.l1_errors.end(),
                                     [&](double e) { return e <= 1e-14 * (1.0 + scale); });
    bool ratios = true;
    Table t{{"k", "radius", "l1_error", "ratio", "min_pairing", "tolerance", "certificate"}, {}};
    for (std::size_t k = 0; k < seq.iterates.size(); ++k) {
        const double ratio = k > 0 && k - 1 < r.l1_ratios.size() ? r.l1_ratios[k - 1] : NAN;
        if (k > 0 && !trivial) ratios = ratios && std::abs(ratio - 0.25) <= cfg.tolerances.ratio * 0.25;
        const IneqCertificate c = k < r.certificates.size() ? r.certificates[k] : IneqCertificate{};
        t.add({as_int(k), seq.radii[k], r.l1_errors[k], ratio, c.min_pairing, c.tolerance, c.pass});
    }
    rep.tables["decay"] = t;
    rep.stage("d-l1-decay", r.l1_decay && ratios,
              {{"ratios", r.l1_ratios}, {"target", 0.25}, {"band", cfg.tolerances.ratio}, {"exact", trivial}});
    rep.summary["floor_binds"] = seq.floor_binds;
}

void brezis_kato(const ExperimentConfig& cfg, const GridPtr& g, ExperimentReport& rep) {
    const auto& a = cfg.analysis;
    const GridFunction u = make_input(a, g);
    const DiscreteOperator l = op_for(g, a.lambda);
    KatoOptions opt;
    opt.c = cfg.tolerances.c;
    opt.ladder = a.ladder;
    opt.k_count = a.k_count;
    const KatoReport reg = brezis_kato_check(u, l, *a.omega, opt);
    const KatoReport app = kato_via_appendix(u, l, *a.omega, opt);
    rep.stage("input", reg.input.pass, certificate_json(reg.input));
    rep.stage("regularization", reg.pass(), certificate_json(reg.output));
    rep.stage("appendix", app.pass(),
              {{"output", certificate_json(app.output)}, {"dirichlet_residual", app.dirichlet_residual}});
    rep.stage("agreement", app.agreement, {{"gap", app.agreement_gap}, {"budget", app.agreement_budget}});

    Table ladder{{"epsilon", "envelope", "range_deviation", "nodal_deviation", "max_prime", "min_pairing",
                  "certificate"},
                 {}};
    bool envelope = true, prime = true;
    for (const auto& row : reg.ladder) {
        envelope = envelope &&
                   std::abs(row.range_deviation - row.envelope) <= cfg.tolerances.envelope * row.envelope;
        prime = prime && row.max_prime <= 1.0;
        ladder.add({row.epsilon, row.envelope, row.range_deviation, row.nodal_deviation, row.max_prime,
                    row.certificate.min_pairing, row.certificate.pass});
    }
    Table ancona{{"radius", "min_pairing", "tolerance", "certificate"}, {}};
    for (const auto& row : app.ancona) {
        ancona.add({row.radius, row.certificate.min_pairing, row.certificate.tolerance, row.certificate.pass});
    }
    rep.tables["ladder"] = ladder;
    rep.tables["ancona"] = ancona;
    rep.stage("envelope", envelope, {{"band", cfg.tolerances.envelope}});
    rep.stage("derivative-bound", prime);
}

void caccioppoli(const ExperimentConfig& cfg, const GridPtr& g, ExperimentReport& rep) {
    const auto& a = cfg.analysis;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ua(0.5, 2.0), ub(0.0, 1.0), uc(0.0, 0.01), ud(0.0, 1e-6);
    const CutoffFamily fam = cutoff_family(g, a.ks);
    Table t{{"trial", "p", "eps", "k", "lhs", "rhs", "budget_rhs", "slack", "pass"}, {}};
    std::size_t failures = 0, runs = 0, budget_violations = 0;
    for (std::size_t trial = 0; trial < a.trials; ++trial) {
        // convex nondecreasing radial profiles are subharmonic whenever w' >= 0
        const double ca = ua(rng), cb = ub(rng), cc = uc(rng), cd = ud(rng);
        const GridFunction u = GridFunction::sample(g, [=](double r) {
            const double s = r == 0.0 ? 1.0 : std::sinh(r) / r;
            return ca + cb * r * r + cc * r * r * r * r + cd * s;
        });
        for (double p : a.p_list) {
            const double eps = a.eps.value_or(0.5 * (p - 1.0));
            for (std::size_t q = 0; q < fam.phi.size(); ++q) {
                const CaccioppoliResult r = caccioppoli_check(u, p, eps, fam.phi[q]);
                ++runs;
                failures += r.pass ? 0 : 1;
                // the literal 2/k gradient budget quadruples the right side
                const double budget = 4.0 * r.rhs;
                if (!(r.lhs <= budget + r.tolerance)) ++budget_violations;
                t.add({as_int(trial), p, eps, fam.radii[q], r.lhs, r.rhs, budget, r.rhs - r.lhs, r.pass});
            }
        }
    }
    rep.tables["caccioppoli"] = t;
    std::vector<double> slopes(fam.max_slope.begin(), fam.max_slope.end());
    rep.stage("cutoffs", true, {{"k", fam.radii}, {"max_slope", slopes}});
    rep.stage("caccioppoli", failures == 0, {{"failures", failures}, {"runs", runs}});
    rep.stage("gradient-budget", budget_violations == 0, {{"violations", budget_violations}});
}

void regularity(const ExperimentConfig& cfg, const GridPtr& g, ExperimentReport& rep) {
    const auto& a = cfg.analysis;
    const GridFunction u = make_input(a, g);
    Table t{{"p", "k", "seminorm_sq", "bound", "within"}, {}};
    bool all = true;
    for (double p : a.p_list) {
        const RegularityReport r = regularity_certificate(u, p, *a.omega, *a.omega1, a.k_count + 1);
        for (std::size_t k = 0; k < r.seminorms_sq.size(); ++k) {
            t.add({p, as_int(k + 1), r.seminorms_sq[k], r.bound, r.seminorms_sq[k] <= r.bound});
        }
        all = all && r.pass;
        rep.stage("p=" + json(p).dump(), r.pass,
                  {{"bound", r.bound},
                   {"grad_cutoff", r.grad_cutoff},
                   {"eps", r.eps},
                   {"violations", r.violations},
                   {"sup_first", r.sup_first}});
    }
    rep.tables["regularity"] = t;
    rep.summary["all_pass"] = all;
}

void energy_rows(Table& t, double r_max, const EnergyTable& e) {
    for (const auto& row : e.rows) {
        t.add({r_max, row.k, row.lhs, row.annulus_mass, row.rhs, row.bound, row.budget_bound, row.dominated});
    }
}

json verdict_json(const LiouvilleVerdict& v) {
    json out = {{"kind", to_string(v.kind)},
                {"reason", v.reason},
                {"oscillation", v.oscillation},
                {"oscillation_tol", v.oscillation_tol},
                {"poincare_bound", v.poincare_bound}};
    if (v.table) {
        out["slope"] = v.table->slope;
        out["decays"] = v.table->decays;
        out["lp_member"] = v.table->lp_member;
        out["lp_relative_change"] = v.table->lp_relative_change;
    }
    return out;
}

EnergyOptions energy_options(const ExperimentConfig& cfg) {
    EnergyOptions e;
    e.delta = cfg.analysis.delta;
    e.lp_change = cfg.tolerances.lp_change;
    e.c = cfg.tolerances.c;
    return e;
}

void liouville(const ExperimentConfig& cfg, const GridPtr& g, ExperimentReport& rep) {
    const auto& a = cfg.analysis;
    const auto& m = cfg.manifold;
    const WarpingProfile profile = WarpingProfile::from_name(m.profile, m.growth);
    const DoublingResult d = liouville_doubling(
        profile, m.n, m.r_max, g->size(), [&](const GridPtr& gg) { return make_input(a, gg); }, a.p, a.ks,
        energy_options(cfg));
    rep.stage("verdict-r_max", true, verdict_json(d.base));
    rep.stage("verdict-2r_max", true, verdict_json(d.doubled));
    rep.stage("doubling-stable", d.stable, {{"base", to_string(d.base.kind)}, {"doubled", to_string(d.doubled.kind)}});

    Table energy{{"r_max", "k", "lhs", "annulus_mass", "rhs", "bound", "budget_bound", "dominated"}, {}};
    Table stab{{"k", "rhs_r_max", "rhs_2r_max", "relative_difference", "agree"}, {}};
    bool dominated = true, columns = true;
    if (d.base.table && d.doubled.table) {
        energy_rows(energy, m.r_max, *d.base.table);
        energy_rows(energy, 2.0 * m.r_max, *d.doubled.table);
        dominated = d.base.table->dominated && d.doubled.table->dominated;
        for (std::size_t q = 0; q < d.base.table->rows.size(); ++q) {
            const double x = d.base.table->rows[q].rhs, y = d.doubled.table->rows[q].rhs;
            const double rel = std::abs(x - y) / std::max(std::abs(x), std::numeric_limits<double>::min());
            const bool ok = x == y || rel <= cfg.tolerances.stabilization;
            columns = columns && ok;
            stab.add({d.base.table->rows[q].k, x, y, x == y ? 0.0 : rel, ok});
        }
    } else if (d.base.table.has_value() != d.doubled.table.has_value()) {
        columns = false;
    }
    rep.tables["energy"] = energy;
    rep.tables["stabilization"] = stab;
    rep.stage("stabilization", columns,
              {{"tolerance", cfg.tolerances.stabilization}, {"compared", stab.rows.size()}});
    rep.stage("dominated", dominated);
    rep.summary["verdict"] = to_string(d.base.kind);
}

void subquadratic(const ExperimentConfig& cfg, const GridPtr& g, ExperimentReport& rep) {
    const auto& a = cfg.analysis;
    const GrowthClass gc = subquadratic_class_check(make_input(a, g), a.p, a.ks, a.delta_fit);
    Table t{{"k", "annulus_mass"}, {}};
    for (std::size_t q = 0; q < a.ks.size(); ++q) t.add({a.ks[q], gc.masses[q]});
    rep.tables["growth"] = t;
    const bool ok = !a.expect_member || *a.expect_member == gc.member;
    const json exponent = std::isfinite(gc.exponent) ? json(gc.exponent) : json("-inf");
    rep.stage("growth-class", ok,
              {{"exponent", exponent},
               {"delta_fit", gc.delta_fit},
               {"member", gc.member},
               {"expected", a.expect_member ? json(*a.expect_member) : json(nullptr)}});
    rep.summary["member"] = gc.member;
}

void pp(const ExperimentConfig& cfg, const GridPtr& g, ExperimentReport& rep) {
    const auto& a = cfg.analysis;
    PPOptions opt;
    opt.ks = a.ks;
    opt.energy = energy_options(cfg);
    opt.kato.c = cfg.tolerances.c;
    const PPVerdict v = pp_experiment(make_input(a, g), a.p, opt);
    rep.stage("hypothesis", v.hypothesis.pass, certificate_json(v.hypothesis));
    rep.stage("brezis-kato", v.kato.pass(), certificate_json(v.kato.output));
    rep.stage("subharmonic", v.subharmonic.pass, certificate_json(v.subharmonic));
    rep.stage("liouville", v.liouville.kind == VerdictKind::constant, verdict_json(v.liouville));
    rep.stage("conclusion", v.conclusion == PPConclusion::nonnegative,
              {{"conclusion", to_string(v.conclusion)},
               {"zero_route", v.zero_route},
               {"negative_part_norm", v.negative_part_norm},
               {"negative_part_max", v.negative_part_max},
               {"witness_radius", v.witness_radius}});
    Table energy{{"r_max", "k", "lhs", "annulus_mass", "rhs", "bound", "budget_bound", "dominated"}, {}};
    if (v.liouville.table) energy_rows(energy, cfg.manifold.r_max, *v.liouville.table);
    rep.tables["energy"] = energy;
    rep.summary["conclusion"] = to_string(v.conclusion);
}

void counterexample(const ExperimentConfig& cfg, const GridPtr&, ExperimentReport& rep) {
    const auto& a = cfg.analysis;
    CatalogOptions opt;
    opt.r_min = a.catalog_r_min;
    opt.nodes = a.catalog_nodes;
    const CatalogEntry e = counterexample_catalog(a.catalog, opt);
    Table t{{"check", "value", "reference", "tolerance", "pass"}, {}};
    for (const auto& c : e.checks) {
        t.add({c.name, c.value, c.reference, c.tolerance, c.pass});
        rep.stage(c.name, c.pass, {{"value", c.value}, {"reference", c.reference}, {"tolerance", c.tolerance}});
    }
    rep.tables["checks"] = t;
    rep.summary["entry"] = e.name;
    rep.summary["manifold"] = e.manifold;
    rep.summary["failing_property"] = e.failing_property;
}

void resolvent(const ExperimentConfig& cfg, const GridPtr& g, ExperimentReport& rep) {
    std::vector<double> hat(g->size(), 0.0);
    hat[g->size() / 2] = 1.0;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::vector<double> noise(g->size());
    for (auto& x : noise) x = d(rng);
    const ResolventView view = resolvent_view(g, {{"hat", GridFunction(g, hat)},
                                                  {"zero", GridFunction::constant(g, 0.0)},
                                                  {"one", GridFunction::constant(g, 1.0)},
                                                  {"random", GridFunction(g, noise)}});
    Table t{{"f", "min_u", "max_u", "pass"}, {}};
    for (const auto& row : view.rows) {
        t.add({row.label, row.min_u, row.max_u, row.pass});
        rep.stage("solve-" + row.label, row.pass, {{"min_u", row.min_u}, {"max_u", row.max_u}});
    }
    rep.tables["resolvent"] = t;
    rep.stage("inverse-entries", view.matrix.pass,
              {{"min_entry", view.matrix.min_entry},
               {"max_entry", view.matrix.max_entry},
               {"sign_pattern", view.matrix.sign_pattern},
               {"diagonally_dominant", view.matrix.diagonally_dominant},
               {"unknowns", view.matrix.unknowns}});
}

using Runner = std::function<void(const ExperimentConfig&, const GridPtr&, ExperimentReport&)>;

const std::map<std::string, Runner>& registry() {
    static const std::map<std::string, Runner> r{
        {"pw-identity", pw_identity}, {"smoothing-abc", smoothing_abc}, {"brezis-kato", brezis_kato},
        {"caccioppoli", caccioppoli}, {"regularity", regularity},       {"liouville", liouville},
        {"subquadratic", subquadratic}, {"pp", pp},                     {"counterexample", counterexample},
        {"resolvent", resolvent}};
    return r;
}

}  // namespace

GridFunction make_input(const AnalysisSpec& a, const GridPtr& grid) {
    std::function<double(double)> f;
    if (a.input == "constant") f = [](double) { return 1.0; };
    else if (a.input == "sinhc") f = [](double r) { return r == 0.0 ? 1.0 : std::sinh(r) / r; };
    else if (a.input == "kink") f = [](double r) { return r <= 1.0 ? -1.0 : -1.0 / r; };
    else if (a.input == "exp-decay") f = [](double r) { return std::exp(-r); };
    else if (a.input == "quadratic") f = [](double r) { return r * r; };
    else throw InvalidArgument("unknown input '" + a.input + "'");
    const double scale = a.scale, shift = a.shift;
    return GridFunction::sample(grid, [&](double r) { return scale * f(r) + shift; });
}

ExperimentReport run(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport rep;
    rep.config = to_json(cfg);
    const auto it = registry().find(cfg.experiment);
    if (it == registry().end()) throw InvalidArgument("unknown experiment '" + cfg.experiment + "'");
    GridPtr grid;
    if (cfg.experiment != "counterexample") grid = build_model(cfg.manifold).second;
    try {
        it->second(cfg, grid, rep);
        rep.pass = std::all_of(rep.stages.begin(), rep.stages.end(),
                               [](const json& s) { return s.at("pass").get<bool>(); });
    } catch (const PreconditionError& e) {
        rep.stage("precondition", false, {{"message", e.what()}});
        rep.pass = false;
    } catch (const NumericalError& e) {
        rep.stage("numerical", false, {{"message", e.what()}});
        rep.pass = false;
    }
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

ExperimentReport sweep(const ExperimentConfig& cfg, std::size_t levels) {
    if (levels < 2) throw InvalidArgument("refinement needs at least 2 levels");
    const auto start = std::chrono::steady_clock::now();
    std::vector<ExperimentReport> runs;
    std::vector<std::size_t> nodes;
    for (std::size_t l = 0; l < levels; ++l) {
        ExperimentConfig c = cfg;
        const std::size_t factor = std::size_t{1} << l;
        c.manifold.nodes = (cfg.manifold.nodes - 1) * factor + 1;
        c.analysis.catalog_nodes = cfg.analysis.catalog_nodes * factor;
        nodes.push_back(c.experiment == "counterexample" ? c.analysis.catalog_nodes : c.manifold.nodes);
        runs.push_back(run(c));
    }

    ExperimentReport rep = runs.back();
    rep.config = to_json(cfg);
    rep.config["refine"] = levels;
    std::vector<std::string> keys;
    for (const auto& [k, v] : runs.front().errors) keys.push_back(k);

    std::vector<std::string> columns{"level", "nodes", "h", "pass"};
    for (const auto& k : keys) columns.push_back(k);
    Table t{columns, {}};
    bool all = true;
    for (std::size_t l = 0; l < levels; ++l) {
        const double h = cfg.experiment == "counterexample"
                             ? NAN
                             : (cfg.manifold.r_max - cfg.manifold.r_min) / static_cast<double>(nodes[l] - 1);
        Row row{as_int(l), as_int(nodes[l]), h, runs[l].pass};
        for (const auto& k : keys) row.push_back(runs[l].errors.at(k));
        t.add(row);
        all = all && runs[l].pass;
    }
    rep.tables["refinement"] = t;

    json slopes = json::object();
    bool slopes_ok = true;
    for (const auto& k : keys) {
        std::vector<double> e;
        for (const auto& r : runs) e.push_back(r.errors.at(k));
        const bool exact = std::all_of(e.begin(), e.end(), [](double x) { return x == 0.0; });
        if (exact) {
            slopes[k] = "exact";
            continue;
        }
        if (std::any_of(e.begin(), e.end(), [](double x) { return !(x > 0.0); })) {
            slopes[k] = nullptr;
            slopes_ok = false;
            continue;
        }
        const double s = observed_order(e);
        slopes[k] = s;
        slopes_ok = slopes_ok && s >= cfg.tolerances.slope_min;
    }
    rep.stage("refinement", all && slopes_ok,
              {{"levels", levels}, {"slopes", slopes}, {"slope_min", cfg.tolerances.slope_min}});
    rep.summary["slopes"] = slopes;
    rep.pass = all && slopes_ok;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

}  // namespace poslab::harness
