#pragma once

#include "bss/model.hpp"
#include "bss/statespace.hpp"
#include "bss/traffic.hpp"

#include <span>
#include <vector>

namespace bss {

enum class Convention {
    /// Exactly as printed: prod F(n_i) * prod m(k,l)! H1(m1) H2(m2), with
    /// H(m) = (1/m!) [e / (m * rate)]^m.
    literal,
    /// Single-server stations and infinite-server (road, class) nodes:
    /// prod (e_i/lambda_i)^{n_i} * prod (1/m!) (e/rate)^m.
    standard,
};

enum class Source { product_form_literal, product_form_standard, ctmc, simulation };

[[nodiscard]] const char* to_string(Convention convention) noexcept;
[[nodiscard]] const char* to_string(Source source) noexcept;
[[nodiscard]] Source source_of(Convention convention) noexcept;

/// Probability vector over a subset of ranks of a state space.
struct StationaryDistribution {
    Source source = Source::ctmc;
    std::size_t space_size = 0;       ///< |Omega| of the underlying space
    std::vector<std::size_t> ranks;   ///< sorted support (may include zero-probability states)
    std::vector<double> probability;  ///< aligned with ranks

    [[nodiscard]] double total() const noexcept;
};

/// Natural log of the unnormalized weight; -inf when a zero visit ratio meets a
/// positive count.
[[nodiscard]] double log_weight(std::span<const int> state, const StateLayout& layout, const VisitRatios& ratios,
                                const NetworkParams& params, Convention convention);

[[nodiscard]] double weight(std::span<const int> state, const StateLayout& layout, const VisitRatios& ratios,
                            const NetworkParams& params, Convention convention);

struct Normalization {
    double log_G = 0.0;
    double G = 0.0;  ///< exp(log_G); may overflow to inf on large populations
    StationaryDistribution distribution;
};

/// G = sum of weights over the whole state space; the distribution covers every rank.
/// Throws Error{degenerate} when every weight is zero.
[[nodiscard]] Normalization normalize_direct(const StateSpace& space, const VisitRatios& ratios,
                                             const NetworkParams& params, Convention convention);

/// Coefficient of z^population in prod_j sum_n factors[j][n] z^n.
[[nodiscard]] double convolve_nodes(std::span<const std::vector<double>> factors, int population);

/// G by node-by-node convolution under the standard convention. Stations are
/// load-independent nodes capped at K; each (road, class) is an infinite-server
/// node. Throws Error{regime} in the full-reachable regime.
[[nodiscard]] double normalize_convolution(const NetworkParams& params, const VisitRatios& ratios);

/// P{n_i = K} per station under the given convention, for use with fixed_point_beta.
[[nodiscard]] FullStationEvaluator full_station_evaluator(const StateSpace& space, const NetworkParams& params,
                                                          Convention convention);

namespace reference {

/// Serial normalization: one pass over the states with a single compensated sum.
[[nodiscard]] Normalization normalize_direct(const StateSpace& space, const VisitRatios& ratios,
                                             const NetworkParams& params, Convention convention);

}  // namespace reference

}  // namespace bss
