#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace poslab::harness {

inline constexpr const char* schema_version = "1.0";

/// Column-oriented table written as CSV with a one-line header.
struct Table {
    using Cell = std::variant<double, long long, std::string, bool>;

    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    [[nodiscard]] std::string csv() const;
    [[nodiscard]] nlohmann::json json() const;
};

struct ExperimentReport {
    nlohmann::json config;
    nlohmann::json stages = nlohmann::json::array();   ///< one object per certificate stage
    std::map<std::string, Table> tables;
    std::map<std::string, double> errors;              ///< discretization errors for refinement fits
    nlohmann::json summary = nlohmann::json::object();
    bool pass = false;
    double wall_time = 0.0;

    void stage(const std::string& name, bool ok, nlohmann::json fields = nlohmann::json::object());
    [[nodiscard]] nlohmann::json json() const;
};

/// Writes report.json and one CSV per table into dir (created if needed);
/// returns the written paths.
std::vector<std::string> write_report(const ExperimentReport& report, const std::string& dir, bool tables);

}  // namespace poslab::harness
