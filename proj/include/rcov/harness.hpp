#pragma once

#include "rcov/diagnostics.hpp"
#include "rcov/energy.hpp"
#include "rcov/estimators.hpp"
#include "rcov/measure.hpp"
#include "rcov/radii.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rcov {

inline constexpr int k_config_schema_version = 1;
inline constexpr const char* k_tool_version = "rcov 0.1.0";

struct EnergyToggle {
    bool enabled = false;
    std::vector<double> ts;
    EnergyMethod method = EnergyMethod::cylinder_quadrature;
    double pair_tol = 1e-3;
    std::size_t mc_samples = 200000;
};

// Pinned pass criterion evaluated on the mean over seeds.
struct AcceptanceSpec {
    std::string metric = "slope"; // "slope" or "s2_hat"
    double target = 0.0;
    double tolerance = 0.0;
};

struct ExperimentConfig {
    int schema_version = k_config_schema_version;
    std::string name = "experiment";
    nlohmann::json scheme;
    nlohmann::json radii;
    std::int64_t K = 1000000;
    std::vector<std::uint64_t> seeds;
    // Block schedule for the intersection surrogate: explicit bounds, or geometric (n0, m).
    std::vector<std::int64_t> block_bounds;
    std::int64_t schedule_n0 = 1000;
    int schedule_m = 4;
    std::vector<double> delta_grid;
    bool est_limsup = true;
    bool est_surrogate = false;
    bool est_exponents = true;
    LimsupDimensionOptions limsup;
    EnergyToggle energy;
    std::string output_dir = "runs/experiment";
    std::vector<AcceptanceSpec> acceptance;

    // Every field, defaults included.
    nlohmann::json to_json() const;
    // Rejects unknown keys, wrong types and a newer schema version.
    static ExperimentConfig from_json(const nlohmann::json& doc);
    // Builds scheme and radii and checks module preconditions; throws invalid-parameter.
    void validate() const;
};

struct SeedOutcome {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double slope = 0.0;
    double stderr_ = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
    std::vector<std::string> files;
};

struct RunManifest {
    nlohmann::json config; // materialized snapshot
    std::string tool_version = k_tool_version;
    std::string timestamp;
    std::string input_hash; // SHA-256 of the canonical config dump
    std::vector<SeedOutcome> seeds;
    std::vector<std::pair<std::string, std::string>> files; // relative path, SHA-256
    nlohmann::json summary;

    bool partial_failure() const;
    nlohmann::json to_json() const;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// Runs every seed in parallel and writes CSVs plus manifest.json under `out`
// (the config's output_dir when empty). Seed failures are recorded, not thrown.
RunManifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out = {});

struct TriangleRow {
    double gamma = 0.0;
    double s0 = 0.0;
    std::int64_t K = 0;
    double s2_hat = 0.0;
    double slope = 0.0;
    double lower = 0.0; // s2_hat * s / u
    double upper = 0.0; // s2_hat
    bool inside = false;
    bool ok = false;
    std::string error;
};

struct TriangleConfig {
    double s = 0.4;
    double u = 0.8;
    double ell0 = 0.5;
    int depth = 8;
    std::vector<double> gammas{0.5, 0.625, 0.75, 0.875, 1.0};
    // s0 values as fractions of the admissible maximum s / gamma.
    std::vector<double> s0_fractions{0.5, 0.75, 1.0};
    std::int64_t K_cap = 1000000;
    std::uint64_t seed = 1;
    double tolerance = 0.08;
    LimsupDimensionOptions limsup{1e-12, 0.1, 2.0, 1, 1, 1e-2};
};

std::vector<TriangleRow> triangle_sweep(const TriangleConfig& cfg);
void write_triangle_csv(std::ostream& os, const std::vector<TriangleRow>& rows);

struct ReportRow {
    std::string metric;
    double mean = 0.0;
    std::optional<double> stderr_; // empty with a single sample
    std::size_t n = 0;
};

struct RunReport {
    std::string name;
    std::vector<ReportRow> rows;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, bool>> acceptance; // description, passed
};

// Aggregates a run directory. Missing or corrupted seed files become warnings.
RunReport report(const std::filesystem::path& dir);
void print_report(std::ostream& os, const RunReport& rep);
void write_report_csv(std::ostream& os, const RunReport& rep);

} // namespace rcov
