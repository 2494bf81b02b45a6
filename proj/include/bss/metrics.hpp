#pragma once

#include "bss/productform.hpp"
#include "bss/statespace.hpp"

#include <span>
#include <string>
#include <vector>

namespace bss {

struct StationProbabilities {
    double empty = 0.0;
    double full = 0.0;
    double problematic = 0.0;  ///< empty + full
};

/// Station index is 0-based. Throws Error{out_of_range} for a bad index.
[[nodiscard]] StationProbabilities problematic(const StationaryDistribution& dist, const StateSpace& space, int station);

/// P{n_i = k}, k = 0..K.
[[nodiscard]] std::vector<double> station_marginal(const StationaryDistribution& dist, const StateSpace& space,
                                                   int station);

struct MeanQueues {
    std::vector<double> station;     ///< Q_i
    double riding_direct = 0.0;      ///< sum of expected road counts
    double riding_complement = 0.0;  ///< NC - sum Q_i
};

[[nodiscard]] MeanQueues mean_queues(const StationaryDistribution& dist, const StateSpace& space);

struct PerformanceReport {
    Source source = Source::ctmc;
    std::vector<StationProbabilities> stations;
    MeanQueues queues;
    double mean_problematic = 0.0;  ///< average of the per-station values; an extension
};

[[nodiscard]] PerformanceReport performance_report(const StationaryDistribution& dist, const StateSpace& space);

struct PairComparison {
    std::size_t first = 0;
    std::size_t second = 0;
    double total_variation = 0.0;  ///< over the union of supports, missing ranks count as 0
    double max_abs_difference = 0.0;
    double first_mass_outside_second = 0.0;  ///< mass of `first` on ranks absent from `second`
    double second_mass_outside_first = 0.0;
};

struct ComparisonBlock {
    std::vector<Source> sources;
    std::vector<PairComparison> pairs;
};

/// Throws Error{mismatched_space} when the distributions come from different spaces.
[[nodiscard]] ComparisonBlock compare(std::span<const StationaryDistribution> dists);

[[nodiscard]] PairComparison compare_pair(const StationaryDistribution& a, const StationaryDistribution& b);

}  // namespace bss
