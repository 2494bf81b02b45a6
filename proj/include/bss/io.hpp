#pragma once

#include "bss/desim.hpp"
#include "bss/metrics.hpp"
#include "bss/model.hpp"
#include "bss/productform.hpp"
#include "bss/statespace.hpp"
#include "bss/traffic.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace bss::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

/// Parses a config object. Matrices are dense N x N arrays; diagonal entries
/// may be null. Throws Error{config}.
[[nodiscard]] NetworkParams params_from_json(const json& config);
[[nodiscard]] json to_json(const NetworkParams& params);

/// Reads and parses a JSON file. Throws Error{config}.
[[nodiscard]] json read_json(const std::filesystem::path& path);
[[nodiscard]] NetworkParams load_params(const std::filesystem::path& path);

/// Optional "solver" and "simulation" sections of a config.
struct SolverSettings {
    std::size_t max_states = kDefaultMaxStates;
    std::size_t direct_limit = 20'000;
    std::size_t max_iterations = 1'000'000;
    double tolerance = 1e-10;
};
[[nodiscard]] SolverSettings solver_settings(const json& config);
[[nodiscard]] SimConfig simulation_settings(const json& config);

struct RunManifest {
    std::string config_path;
    std::string subcommand;
    json options = json::object();
    std::string tool_version = kToolVersion;
    std::string timestamp;
};
[[nodiscard]] json to_json(const RunManifest& manifest);

[[nodiscard]] json to_json(const ValidationReport& report);
[[nodiscard]] json to_json(const VisitRatios& ratios);
[[nodiscard]] json to_json(const PerformanceReport& report);
[[nodiscard]] json to_json(const Estimate& estimate);

/// Rank/state/probability table. `space` adds the state vectors.
[[nodiscard]] json distribution_json(const StationaryDistribution& dist, const StateSpace* space);
/// Reads back "source", "space_size" and the table written by distribution_json.
[[nodiscard]] StationaryDistribution distribution_from_json(const json& result);

[[nodiscard]] Source source_from_string(const std::string& name);

/// Manifest rendered as CSV comment lines.
[[nodiscard]] std::string csv_header(const RunManifest& manifest);
[[nodiscard]] std::string distribution_csv(const RunManifest& manifest, const StationaryDistribution& dist,
                                           const StateSpace& space, const SimEstimate* estimate = nullptr);
[[nodiscard]] std::string report_csv(const RunManifest& manifest, const PerformanceReport& report);

/// Throws Error{io}.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest round-trip decimal representation.
[[nodiscard]] std::string format_double(double value);

}  // namespace bss::io
