#pragma once

#include "bss/model.hpp"
#include "bss/productform.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bss {

struct SimConfig {
    double horizon = 1e5;
    double warmup = 1e3;
    int replications = 20;
    std::uint64_t seed = 1;
    bool estimate_states = true;   ///< per-state occupancy fractions
    std::size_t trace_events = 0;  ///< events of replication 0 to record
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;      ///< across replications; 0 with one replication
    double ci_half_width = 0.0;  ///< 1.96 * std_error
};

struct TraceRecord {
    double time;
    std::string kind;  ///< arrival, lost, return, redirect
    int station;       ///< station where the event happens
    std::size_t source;
    std::size_t destination;
};

/// Output of one independent run.
struct ReplicationResult {
    std::vector<std::uint64_t> state_ranks;  ///< sorted
    std::vector<double> state_fraction;      ///< time fraction in each state
    std::vector<double> empty;
    std::vector<double> full;
    std::vector<double> mean_occupancy;
    double riding = 0.0;
    std::uint64_t events = 0;
    std::uint64_t lost_customers = 0;
    std::uint64_t redirects = 0;
    std::uint64_t conservation_checks = 0;
    std::vector<TraceRecord> trace;
};

struct SimEstimate {
    int replications = 0;
    std::vector<std::uint64_t> state_ranks;
    std::vector<Estimate> state_probability;
    std::vector<Estimate> empty;
    std::vector<Estimate> full;
    std::vector<Estimate> problematic;
    std::vector<Estimate> mean_occupancy;
    Estimate riding;
    std::uint64_t events = 0;
    std::uint64_t lost_customers = 0;
    std::uint64_t redirects = 0;
    std::uint64_t conservation_checks = 0;  ///< every event is audited for conservation
    std::vector<TraceRecord> trace;

    /// Point estimates as a distribution over the visited ranks.
    [[nodiscard]] StationaryDistribution distribution(std::size_t space_size) const;
};

/// Throws Error{config} for an empty measurement window or no replications.
void check_config(const SimConfig& cfg);

/// One replication with its own seed stream derived from (cfg.seed, index).
[[nodiscard]] ReplicationResult run_replication(const NetworkParams& params, const SimConfig& cfg, int index);

[[nodiscard]] SimEstimate aggregate(std::span<const ReplicationResult> runs);

/// Replications run across OpenMP threads; the result does not depend on the thread count.
[[nodiscard]] SimEstimate simulate(const NetworkParams& params, const SimConfig& cfg);

namespace reference {

[[nodiscard]] SimEstimate simulate(const NetworkParams& params, const SimConfig& cfg);

}  // namespace reference

}  // namespace bss
