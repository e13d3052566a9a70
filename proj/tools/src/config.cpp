#include "poslab/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "poslab/errors.hpp"

namespace poslab::harness {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

double to_double(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(out)) {
        throw InvalidArgument("'" + key + "': expected a finite number, got '" + v + "'");
    }
    return out;
}

std::size_t to_count(const std::string& key, const std::string& raw) {
    const double d = to_double(key, raw);
    if (d < 0.0 || d != std::floor(d)) throw InvalidArgument("'" + key + "': expected a nonnegative integer");
    return static_cast<std::size_t>(d);
}

bool to_bool(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw InvalidArgument("'" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
    std::string v = trim(raw);
    if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_double(key, item));
    }
    return out;
}

Interval to_interval(const std::string& key, const std::string& raw) {
    const auto v = to_list(key, raw);
    if (v.size() != 2 || !(v[0] < v[1])) throw InvalidArgument("'" + key + "': expected 'lo, hi' with lo < hi");
    return {v[0], v[1]};
}

void reject(const std::string& what) { throw InvalidArgument(what); }

void read_manifold(const pt::ptree& t, ManifoldSpec& m) {
    for (const auto& [key, node] : t) {
        const std::string v = node.data();
        const std::string k = "manifold." + key;
        if (key == "profile") m.profile = trim(v);
        else if (key == "growth") m.growth = to_double(k, v);
        else if (key == "n") m.n = static_cast<int>(to_count(k, v));
        else if (key == "r_min") m.r_min = to_double(k, v);
        else if (key == "r_max") m.r_max = to_double(k, v);
        else if (key == "nodes") m.nodes = to_count(k, v);
        else if (key == "h") m.h = to_double(k, v);
        else if (key == "left") m.left = trim(v);
        else if (key == "right") m.right = trim(v);
        else reject("unknown key '" + k + "'");
    }
}

void read_analysis(const pt::ptree& t, AnalysisSpec& a) {
    for (const auto& [key, node] : t) {
        const std::string v = node.data();
        const std::string k = "analysis." + key;
        if (key == "input") a.input = trim(v);
        else if (key == "scale") a.scale = to_double(k, v);
        else if (key == "shift") a.shift = to_double(k, v);
        else if (key == "lambda") a.lambda = to_double(k, v);
        else if (key == "p") a.p = to_double(k, v);
        else if (key == "p_list") a.p_list = to_list(k, v);
        else if (key == "eps") a.eps = to_double(k, v);
        else if (key == "delta") a.delta = to_double(k, v);
        else if (key == "delta_fit") a.delta_fit = to_double(k, v);
        else if (key == "ks") a.ks = to_list(k, v);
        else if (key == "ladder") a.ladder = to_list(k, v);
        else if (key == "omega") a.omega = to_interval(k, v);
        else if (key == "omega1") a.omega1 = to_interval(k, v);
        else if (key == "k_count") a.k_count = to_count(k, v);
        else if (key == "trials") a.trials = to_count(k, v);
        else if (key == "catalog") a.catalog = trim(v);
        else if (key == "catalog_r_min") a.catalog_r_min = to_double(k, v);
        else if (key == "catalog_nodes") a.catalog_nodes = to_count(k, v);
        else if (key == "expect_member") a.expect_member = to_bool(k, v);
        else reject("unknown key '" + k + "'");
    }
}

void read_tolerances(const pt::ptree& t, ToleranceSpec& s) {
    for (const auto& [key, node] : t) {
        const double v = to_double("tolerances." + key, node.data());
        if (!(v > 0.0)) reject("tolerances." + key + " must be positive");
        if (key == "c") s.c = v;
        else if (key == "tol_rel") s.tol_rel = v;
        else if (key == "adjoint") s.adjoint = v;
        else if (key == "lp_change") s.lp_change = v;
        else if (key == "slope_min") s.slope_min = v;
        else if (key == "ratio") s.ratio = v;
        else if (key == "envelope") s.envelope = v;
        else if (key == "stabilization") s.stabilization = v;
        else reject("unknown key 'tolerances." + key + "'");
    }
}

void read_output(const pt::ptree& t, OutputSpec& o) {
    for (const auto& [key, node] : t) {
        if (key == "dir") o.dir = trim(node.data());
        else if (key == "tables") o.tables = to_bool("output.tables", node.data());
        else reject("unknown key 'output." + key + "'");
    }
}

bool pole_model(const ManifoldSpec& m) { return m.left == "pole"; }

void require_pole_truncation(const ExperimentConfig& cfg) {
    if (!pole_model(cfg.manifold) || cfg.manifold.right != "truncation") {
        reject("experiment '" + cfg.experiment + "' needs left = pole and right = truncation");
    }
}

std::vector<double> dyadic_ks(double r_max) { return {r_max / 16.0, r_max / 8.0, r_max / 4.0, r_max / 2.0}; }

void check_ks(const ExperimentConfig& cfg, std::size_t min_count) {
    const auto& ks = cfg.analysis.ks;
    if (ks.size() < min_count) reject("analysis.k needs at least " + std::to_string(min_count) + " radii");
    for (double k : ks) {
        if (!(k > 0.0) || 2.0 * k > cfg.manifold.r_max * (1.0 + 1e-12)) {
            reject("analysis.k entry " + std::to_string(k) + " has B_2k outside [0, r_max]");
        }
    }
    if (!std::is_sorted(ks.begin(), ks.end())) reject("analysis.k must be increasing");
}

void check_p(double p, const std::string& key) {
    if (!(p > 1.0)) reject(key + " must satisfy 1 < p < inf");
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"pw-identity", "smoothing-abc", "brezis-kato", "caccioppoli",
                                                "regularity",  "liouville",     "subquadratic", "pp",
                                                "counterexample", "resolvent"};
    return names;
}

const std::vector<std::string>& input_names() {
    static const std::vector<std::string> names{"constant", "sinhc", "kink", "exp-decay", "quadratic"};
    return names;
}

ExperimentConfig parse_config(const std::string& text, const std::string& experiment) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        reject(std::string("config syntax: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) reject("key '" + section + "' outside any section");
        if (section == "manifold") read_manifold(body, cfg.manifold);
        else if (section == "analysis") read_analysis(body, cfg.analysis);
        else if (section == "tolerances") read_tolerances(body, cfg.tolerances);
        else if (section == "output") read_output(body, cfg.output);
        else reject("unknown section [" + section + "]");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& experiment) {
    std::ifstream f(path);
    if (!f) reject("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), experiment);
}

std::pair<ModelManifold, GridPtr> build_model(const ManifoldSpec& m) {
    const WarpingProfile profile = WarpingProfile::from_name(m.profile, m.growth);
    Domain d;
    d.r_min = m.r_min;
    d.r_max = m.r_max;
    if (m.left == "pole") d.left = LeftEnd::pole;
    else if (m.left == "open") d.left = LeftEnd::open;
    else reject("manifold.left must be pole or open, got '" + m.left + "'");
    if (m.right == "truncation") d.right = RightEnd::truncation;
    else if (m.right == "boundary") d.right = RightEnd::boundary;
    else reject("manifold.right must be truncation or boundary, got '" + m.right + "'");
    return make_model(profile, m.n, d, m.nodes);
}

void resolve(ExperimentConfig& cfg) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
        reject("unknown experiment '" + cfg.experiment + "'");
    }
    auto& m = cfg.manifold;
    auto& a = cfg.analysis;
    if (m.h) {
        if (!(*m.h > 0.0)) reject("manifold.h must be positive");
        const double cells = (m.r_max - m.r_min) / *m.h;
        if (std::abs(cells - std::round(cells)) > 1e-9 * cells) reject("manifold.h must divide r_max - r_min");
        m.nodes = static_cast<std::size_t>(std::lround(cells)) + 1;
        m.h.reset();
    }
    // validates the profile name, dimension, domain and node count
    if (cfg.experiment != "counterexample") build_model(m);

    const std::string& e = cfg.experiment;
    const Interval whole{m.r_min, m.r_max};
    if (a.input.empty()) {
        if (e == "smoothing-abc") a.input = "kink";
        else if (e == "regularity") a.input = "kink";
        else if (e == "brezis-kato") a.input = "sinhc";
        else if (e == "liouville" || e == "subquadratic") a.input = "constant";
        else if (e == "pp") a.input = "sinhc";
        else a.input = "constant";
        if (e == "regularity" && a.shift == 0.0) a.shift = 1.0;
        if (e == "brezis-kato" && a.shift == 0.0) a.shift = -1.1;
    }
    const auto& inputs = input_names();
    if (std::find(inputs.begin(), inputs.end(), a.input) == inputs.end()) {
        reject("unknown analysis.input '" + a.input + "'");
    }
    if (!(a.lambda >= 0.0)) reject("analysis.lambda must be >= 0 (negative lambda is probed via spectral_bottom)");
    if (!(a.delta > 0.0)) reject("analysis.delta must be positive");
    if (!(a.delta_fit > 0.0)) reject("analysis.delta_fit must be positive");
    if (!(a.scale > 0.0)) reject("analysis.scale must be positive");

    if (e == "pw-identity") {
        if (!(a.lambda > 0.0)) reject("pw-identity needs lambda > 0");
        if (!a.omega) a.omega = whole;
    } else if (e == "smoothing-abc") {
        if (!a.omega) a.omega = Interval{m.r_min + 0.25 * (m.r_max - m.r_min), m.r_max - 0.25 * (m.r_max - m.r_min)};
        if (a.k_count < 2) reject("smoothing-abc needs k_count >= 2");
    } else if (e == "brezis-kato") {
        if (!a.omega) a.omega = whole;
        if (a.ladder.empty()) a.ladder = {1.0, 0.25, 1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0};
        for (double x : a.ladder) {
            if (!(x > 0.0)) reject("analysis.ladder entries must be positive");
        }
        if (a.k_count < 2) reject("brezis-kato needs k_count >= 2");
    } else if (e == "caccioppoli") {
        require_pole_truncation(cfg);
        if (a.p_list.empty()) a.p_list = {1.5, 2.0, 3.0};
        for (double p : a.p_list) check_p(p, "analysis.p_list entry");
        if (a.ks.empty()) a.ks = {m.r_max / 8.0, m.r_max / 4.0, m.r_max / 2.0};
        check_ks(cfg, 1);
        if (a.eps) {
            for (double p : a.p_list) {
                if (!(*a.eps > 0.0 && *a.eps < p - 1.0)) reject("analysis.eps must lie in (0, p - 1) for every p");
            }
        }
        if (a.trials == 0) reject("analysis.trials must be positive");
    } else if (e == "regularity") {
        if (a.p_list.empty()) a.p_list = {1.1, 1.5, 2.0, 3.0};
        for (double p : a.p_list) check_p(p, "analysis.p_list entry");
        if (!a.omega) a.omega = Interval{m.r_min + 0.25 * (m.r_max - m.r_min), m.r_min + 0.75 * (m.r_max - m.r_min)};
        if (!a.omega1) {
            const double w = a.omega->hi - a.omega->lo;
            a.omega1 = Interval{a.omega->lo + 0.25 * w, a.omega->lo + 0.625 * w};
        }
        if (!(a.omega1->lo >= a.omega->lo && a.omega1->hi < a.omega->hi)) {
            reject("analysis.omega1 must lie inside analysis.omega");
        }
        if (a.k_count < 2) reject("regularity needs k_count >= 2");
    } else if (e == "liouville" || e == "pp") {
        require_pole_truncation(cfg);
        check_p(a.p, "analysis.p");
        if (a.ks.empty()) a.ks = dyadic_ks(m.r_max);
        check_ks(cfg, 2);
    } else if (e == "subquadratic") {
        if (!(a.p >= 1.0)) reject("analysis.p must be >= 1");
        if (a.ks.empty()) a.ks = dyadic_ks(m.r_max);
        check_ks(cfg, 4);
    } else if (e == "counterexample") {
        const std::vector<std::string> known{"punctured-ball", "stochastically-incomplete-Linfty",
                                             "hyperbolic-bounded-harmonic"};
        if (std::find(known.begin(), known.end(), a.catalog) == known.end()) {
            reject("unknown analysis.catalog '" + a.catalog + "'");
        }
        if (!(a.catalog_r_min > 0.0 && a.catalog_r_min < 0.1)) reject("analysis.catalog_r_min must lie in (0, 0.1)");
        if (a.catalog_nodes < 100) reject("analysis.catalog_nodes must be at least 100");
    }
    if (a.omega) {
        if (a.omega->lo < m.r_min - 1e-12 || a.omega->hi > m.r_max + 1e-12) {
            reject("analysis.omega must lie inside [r_min, r_max]");
        }
    }
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    using nlohmann::json;
    const auto& m = cfg.manifold;
    const auto& a = cfg.analysis;
    const auto& t = cfg.tolerances;
    auto interval = [](const std::optional<Interval>& i) -> json {
        if (!i) return nullptr;
        return json::array({i->lo, i->hi});
    };
    json out;
    out["experiment"] = cfg.experiment;
    out["seed"] = cfg.seed;
    out["manifold"] = {{"profile", m.profile}, {"growth", m.growth}, {"n", m.n},           {"r_min", m.r_min},
                       {"r_max", m.r_max},     {"nodes", m.nodes},   {"left", m.left},     {"right", m.right}};
    out["analysis"] = {{"input", a.input},
                       {"scale", a.scale},
                       {"shift", a.shift},
                       {"lambda", a.lambda},
                       {"p", a.p},
                       {"p_list", a.p_list},
                       {"eps", a.eps ? json(*a.eps) : json(nullptr)},
                       {"delta", a.delta},
                       {"delta_fit", a.delta_fit},
                       {"ks", a.ks},
                       {"ladder", a.ladder},
                       {"omega", interval(a.omega)},
                       {"omega1", interval(a.omega1)},
                       {"k_count", a.k_count},
                       {"trials", a.trials},
                       {"catalog", a.catalog},
                       {"catalog_r_min", a.catalog_r_min},
                       {"catalog_nodes", a.catalog_nodes},
                       {"expect_member", a.expect_member ? json(*a.expect_member) : json(nullptr)}};
    out["tolerances"] = {{"c", t.c},
                         {"tol_rel", t.tol_rel},
                         {"adjoint", t.adjoint},
                         {"lp_change", t.lp_change},
                         {"slope_min", t.slope_min},
                         {"ratio", t.ratio},
                         {"envelope", t.envelope},
                         {"stabilization", t.stabilization}};
    out["output"] = {{"dir", cfg.output.dir}, {"tables", cfg.output.tables}};
    return out;
}

}  // namespace poslab::harness
