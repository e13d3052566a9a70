#include "poslab/harness/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "poslab/errors.hpp"

namespace poslab::harness {
namespace {

std::string cell_text(const Table::Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return fmt::format("{:.17g}", v);
            else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else {
                if (v.find_first_of(",\"\n") == std::string::npos) return v;
                std::string q = "\"";
                for (char ch : v) {
                    if (ch == '"') q += '"';
                    q += ch;
                }
                return q + "\"";
            }
        },
        c);
}

nlohmann::json cell_json(const Table::Cell& c) {
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) return fmt::format("{}", v);
            }
            return v;
        },
        c);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << text;
}

}  // namespace

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw InvalidArgument("table row width differs from the header");
    rows.push_back(std::move(row));
}

std::string Table::csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + cell_text(row[c]);
        out += '\n';
    }
    return out;
}

nlohmann::json Table::json() const {
    nlohmann::json out = {{"columns", columns}, {"rows", nlohmann::json::array()}};
    for (const auto& row : rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        out["rows"].push_back(std::move(r));
    }
    return out;
}

void ExperimentReport::stage(const std::string& name, bool ok, nlohmann::json fields) {
    fields["name"] = name;
    fields["pass"] = ok;
    stages.push_back(std::move(fields));
}

nlohmann::json ExperimentReport::json() const {
    nlohmann::json out;
    out["schema_version"] = schema_version;
    out["config"] = config;
    out["stages"] = stages;
    out["summary"] = summary;
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [name, table] : tables) t[name] = table.json();
    out["tables"] = t;
    out["errors"] = errors;
    out["verdict"] = pass ? "pass" : "fail";
    out["wall_time"] = wall_time;
    return out;
}

std::vector<std::string> write_report(const ExperimentReport& report, const std::string& dir, bool tables) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
    std::vector<std::string> written;
    const fs::path json_path = root / "report.json";
    write_file(json_path, report.json().dump(2) + "\n");
    written.push_back(json_path.string());
    if (tables) {
        for (const auto& [name, table] : report.tables) {
            const fs::path p = root / (name + ".csv");
            write_file(p, table.csv());
            written.push_back(p.string());
        }
    }
    return written;
}

}  // namespace poslab::harness
