#pragma once

// Experiment configuration: INI-style text with [manifold], [analysis],
// [tolerances] and [output] sections. Unknown sections or keys are errors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "poslab/geometry.hpp"

namespace poslab::harness {

struct ManifoldSpec {
    std::string profile = "euclidean";
    double growth = 1.0;               ///< superexp coefficient a
    int n = 3;
    double r_min = 0.0;
    double r_max = 2.0;
    std::size_t nodes = 201;
    std::optional<double> h;           ///< overrides nodes when set
    std::string left = "pole";         ///< pole | open
    std::string right = "truncation";  ///< truncation | boundary
};

struct AnalysisSpec {
    std::string input;                 ///< u = scale * f(r) + shift, f named in input_names()
    double scale = 1.0;
    double shift = 0.0;
    double lambda = 1.0;
    double p = 2.0;
    std::vector<double> p_list;
    std::optional<double> eps;         ///< Caccioppoli epsilon; (p - 1) / 2 when unset
    double delta = 0.5;                ///< required decay exponent of the energy rhs
    double delta_fit = 0.1;            ///< margin below 2 for the growth class
    std::vector<double> ks;
    std::vector<double> ladder;
    std::optional<Interval> omega;
    std::optional<Interval> omega1;
    std::size_t k_count = 5;
    std::size_t trials = 20;
    std::string catalog = "punctured-ball";
    double catalog_r_min = 1e-3;
    std::size_t catalog_nodes = 100000;
    std::optional<bool> expect_member;
};

struct ToleranceSpec {
    double c = 10.0;
    double tol_rel = 1e-12;
    double adjoint = 1e-12;
    double lp_change = 0.05;
    double slope_min = 1.9;
    double ratio = 0.3;
    double envelope = 0.1;
    double stabilization = 1e-6;
};

struct OutputSpec {
    std::string dir = "poslab-out";
    bool tables = true;
};

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    ManifoldSpec manifold;
    AnalysisSpec analysis;
    ToleranceSpec tolerances;
    OutputSpec output;
};

/// Experiment names accepted by run().
const std::vector<std::string>& experiment_names();
/// f(r) in {1, sinh r / r, max(-1, -1/r), e^{-r}, r^2}.
const std::vector<std::string>& input_names();

/// Parses INI text. Throws InvalidArgument on syntax errors, unknown keys
/// and unparsable values.
ExperimentConfig parse_config(const std::string& text, const std::string& experiment);
ExperimentConfig load_config(const std::string& path, const std::string& experiment);

/// Fills experiment-specific defaults and checks every precondition that can
/// be checked before computing. Throws InvalidArgument.
void resolve(ExperimentConfig& cfg);

/// Full echo of the resolved configuration.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Builds the model and grid described by the manifold section.
std::pair<ModelManifold, GridPtr> build_model(const ManifoldSpec& spec);

}  // namespace poslab::harness
