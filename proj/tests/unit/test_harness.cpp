#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "oracles.hpp"
#include "poslab/errors.hpp"
#include "poslab/harness/config.hpp"
#include "poslab/harness/experiments.hpp"

using namespace poslab;
using namespace poslab::harness;
using doctest::Approx;

namespace {

ExperimentConfig resolved(const std::string& text, const std::string& experiment) {
    ExperimentConfig cfg = parse_config(text, experiment);
    resolve(cfg);
    return cfg;
}

const nlohmann::json* find_stage(const ExperimentReport& rep, const std::string& name) {
    for (const auto& s : rep.stages) {
        if (s.at("name") == name) return &s;
    }
    return nullptr;
}

nlohmann::json without_time(const ExperimentReport& rep) {
    auto j = rep.json();
    j.erase("wall_time");
    return j;
}

std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("poslab-harness-" + name);
    std::filesystem::remove_all(p);
    return p;
}

int cli(const std::string& args) {
    const int status = std::system((std::string(POSLAB_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* pp_text = R"(
[manifold]
profile = euclidean
n = 3
r_max = 2
nodes = 201
[analysis]
input = sinhc
p = 2
)";

}  // namespace

TEST_CASE("config parsing echoes values and fills defaults") {
    const auto cfg = resolved(R"(
; comment
[manifold]
profile = hyperbolic
n = 2
r_max = 4
h = 0.02
[analysis]
ks = [0.5, 1, 2]
p = 3
# another comment
[tolerances]
c = 20
[output]
dir = somewhere
tables = false
)",
                              "liouville");
    CHECK(cfg.manifold.profile == "hyperbolic");
    CHECK(cfg.manifold.nodes == 201);
    CHECK_FALSE(cfg.manifold.h.has_value());
    CHECK(cfg.analysis.ks == std::vector<double>{0.5, 1.0, 2.0});
    CHECK(cfg.analysis.p == 3.0);
    CHECK(cfg.analysis.input == "constant");
    CHECK(cfg.tolerances.c == 20.0);
    CHECK(cfg.output.dir == "somewhere");
    CHECK_FALSE(cfg.output.tables);

    const auto j = to_json(cfg);
    CHECK(j.at("manifold").at("nodes") == 201);
    CHECK(j.at("tolerances").at("stabilization") == 1e-6);
    CHECK(j.at("analysis").at("delta") == 0.5);
}

TEST_CASE("config validation rejects bad input before computing") {
    CHECK_THROWS_AS(parse_config("[manifold]\nradius = 2\n", "pp"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[geometry]\nn = 2\n", "pp"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[manifold]\nn = two\n", "pp"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[manifold\nn = 2\n", "pp"), InvalidArgument);
    CHECK_THROWS_AS(resolved("[manifold]\nprofile = euclidian\n", "pp"), InvalidArgument);
    CHECK_THROWS_AS(resolved(pp_text, "not-an-experiment"), InvalidArgument);
    CHECK_THROWS_AS(resolved("[manifold]\nr_max = 2\nh = 0.03\n", "pp"), InvalidArgument);
    CHECK_THROWS_AS(resolved("[analysis]\np = 1\n", "pp"), InvalidArgument);
    CHECK_THROWS_AS(resolved("[analysis]\ninput = cosh\n", "pp"), InvalidArgument);
    CHECK_THROWS_AS(resolved("[analysis]\nlambda = 0\n", "pw-identity"), InvalidArgument);
    CHECK_THROWS_AS(resolved("[analysis]\nks = 1, 2, 4\n", "subquadratic"), InvalidArgument);
    CHECK_THROWS_AS(resolved("[analysis]\ncatalog = torus\n", "counterexample"), InvalidArgument);
    CHECK_THROWS_AS(resolved("[analysis]\np_list = 2\neps = 1.5\n", "caccioppoli"), InvalidArgument);
    CHECK_THROWS_AS(resolved("[manifold]\nleft = open\nr_min = 0.1\n", "liouville"), InvalidArgument);
}

TEST_CASE("pp run on the Euclidean model passes with its certificate chain") {
    const ExperimentReport rep = run(resolved(pp_text, "pp"));
    CHECK(rep.pass);
    CHECK(rep.stages.size() >= 3);
    for (const char* name : {"hypothesis", "brezis-kato", "subharmonic"}) {
        const auto* s = find_stage(rep, name);
        REQUIRE(s != nullptr);
        CHECK(s->at("pass") == true);
    }
    CHECK(rep.summary.at("conclusion") == "nonnegative");
    CHECK(rep.json().at("schema_version") == "1.0");
    CHECK(rep.json().at("verdict") == "pass");
}

TEST_CASE("counterexample run reports the punctured-ball L2 mass") {
    const ExperimentReport rep = run(resolved("[analysis]\ncatalog = punctured-ball\n", "counterexample"));
    CHECK(rep.pass);
    const auto* s = find_stage(rep, "l2-norm-squared");
    REQUIRE(s != nullptr);
    // int_{r_min}^1 (e^{-r}/r)^2 4 pi r^2 dr, limit 2 pi (1 - e^{-2})
    const double exact = oracle::integrate([](double r) { return 4.0 * oracle::pi * std::exp(-2.0 * r); }, 1e-3, 1.0);
    CHECK(s->at("value").get<double>() == Approx(exact).epsilon(1e-3));
    CHECK(s->at("reference").get<double>() == Approx(2.0 * oracle::pi * (1.0 - std::exp(-2.0))).epsilon(1e-12));
}

TEST_CASE("a failing certificate turns into a failed verdict, not an exception") {
    // (Delta - 1) e^{-r} = -2 e^{-r} / r < 0 in three dimensions
    const auto cfg = resolved(R"(
[manifold]
r_max = 3
nodes = 301
[analysis]
input = exp-decay
)",
                              "brezis-kato");
    const ExperimentReport rep = run(cfg);
    CHECK_FALSE(rep.pass);
    CHECK(find_stage(rep, "precondition") != nullptr);
}

TEST_CASE("pw-identity sweep on the hyperbolic plane converges at second order") {
    const auto cfg = resolved(R"(
[manifold]
profile = hyperbolic
n = 2
r_max = 2
nodes = 51
[analysis]
trials = 5
)",
                              "pw-identity");
    const ExperimentReport rep = sweep(cfg, 3);
    CHECK(rep.pass);
    const auto slope = rep.summary.at("slopes").at("strong_residual").get<double>();
    CHECK(slope == Approx(2.0).epsilon(0.1));
    const auto& t = rep.tables.at("refinement");
    REQUIRE(t.rows.size() == 3);
    CHECK(std::get<long long>(t.rows[2][1]) == 201);
    CHECK_THROWS_AS(sweep(cfg, 1), InvalidArgument);
}

TEST_CASE("liouville stabilization columns agree across truncation radii") {
    const auto cfg = resolved(R"(
[manifold]
profile = linear-cap
n = 3
r_max = 40
nodes = 2001
[analysis]
input = constant
p = 2
)",
                              "liouville");
    const ExperimentReport rep = run(cfg);
    const auto* s = find_stage(rep, "stabilization");
    REQUIRE(s != nullptr);
    CHECK(s->at("pass") == true);
    CHECK(s->at("compared") == cfg.analysis.ks.size());
    CHECK(rep.tables.at("stabilization").rows.size() == cfg.analysis.ks.size());
    CHECK(rep.pass);
}

TEST_CASE("identical config and seed give identical reports") {
    const auto text = R"(
[manifold]
r_max = 8
nodes = 401
[analysis]
trials = 3
)";
    auto cfg = resolved(text, "caccioppoli");
    cfg.seed = 7;
    const auto a = run(cfg);
    const auto b = run(cfg);
    CHECK(without_time(a).dump() == without_time(b).dump());
    cfg.seed = 8;
    CHECK(without_time(run(cfg)).dump() != without_time(a).dump());
}

TEST_CASE("reports are written as JSON plus one CSV per table") {
    const auto dir = scratch("write");
    const ExperimentReport rep = run(resolved(pp_text, "pp"));
    const auto written = write_report(rep, dir.string(), true);
    CHECK(written.size() == 1 + rep.tables.size());
    std::ifstream csv(dir / "energy.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "r_max,k,lhs,annulus_mass,rhs,bound,budget_bound,dominated");
    std::ifstream js(dir / "report.json");
    const auto j = nlohmann::json::parse(js);
    CHECK(j.at("verdict") == "pass");
    std::filesystem::remove_all(dir);
}

TEST_CASE("every registered experiment runs on a small config") {
    for (const auto& name : experiment_names()) {
        CAPTURE(name);
        std::string text = "[manifold]\nr_max = 4\nnodes = 161\n";
        if (name == "counterexample") text = "[analysis]\ncatalog_nodes = 2000\n";
        if (name == "smoothing-abc" || name == "regularity") text += "[analysis]\nlambda = 0\n";
        auto cfg = resolved(text, name);
        const auto rep = run(cfg);
        CHECK(rep.stages.size() >= 1);
        CHECK(rep.wall_time >= 0.0);
    }
}

TEST_CASE("CLI exit codes follow pass / fail / invalid") {
    const auto dir = scratch("cli");
    std::filesystem::create_directories(dir);
    const auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    const auto good = write("pp.ini", pp_text);
    const auto bad = write("bad.ini", "[manifold]\nprofile = euclidian\n");
    const auto failing = write("fail.ini", "[manifold]\nr_max = 3\n[analysis]\ninput = exp-decay\n");

    CHECK(cli("run pp --config " + good + " --out " + (dir / "out").string()) == 0);
    CHECK(std::filesystem::exists(dir / "out" / "report.json"));
    CHECK(cli("run pp --config " + bad) == 2);
    CHECK(cli("run pp --config " + good + " --refine 1") == 2);
    CHECK(cli("run nope --config " + good) == 2);
    CHECK(cli("run --config " + good) == 2);
    CHECK(cli("run brezis-kato --config " + failing + " --out " + (dir / "f").string()) == 1);
    CHECK(cli("list") == 0);

    // the environment variable redirects output unless --out is given
    const auto env_dir = dir / "env";
    const std::string env = "POSLAB_OUT_DIR=" + env_dir.string() + " ";
    const int status = std::system((env + POSLAB_CLI + " run pp --config " + good + " >/dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(std::filesystem::exists(env_dir / "report.json"));
    std::filesystem::remove_all(dir);
}
