#pragma once

#include "bss/model.hpp"
#include "bss/sparse.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bss {

/// Left fixed vector of a stochastic matrix, first component pinned to 1.
struct StateLevelSolution {
    std::vector<double> values;
    double residual = 0.0;  ///< max-norm of R - R P
    std::size_t iterations = 0;
    std::string method;     ///< "direct" or "power"
};

struct StateLevelOptions {
    std::size_t direct_limit = 20'000;      ///< use sparse LU up to this dimension
    std::size_t max_iterations = 1'000'000; ///< power-iteration sweeps
    double tolerance = 1e-10;               ///< required residual
};

/// Solves R = R P, R_0 = 1 for an irreducible stochastic `jump`.
/// Throws Error{singular} or Error{non_convergence}.
[[nodiscard]] StateLevelSolution solve_state_level(const SparseTransitionMatrix& jump,
                                                   const StateLevelOptions& options = {});

/// Power iteration on the lazy chain (I + P)/2 from `start` (positive entries).
[[nodiscard]] StateLevelSolution solve_state_level_power(const SparseTransitionMatrix& jump,
                                                         std::span<const double> start,
                                                         const StateLevelOptions& options = {});

/// Occupancy-independent visit ratios of stations and (road, class) nodes.
struct VisitRatios {
    std::vector<double> station;  ///< e_i
    Eigen::MatrixXd road1;        ///< e1(k,l), zero diagonal
    Eigen::MatrixXd road2;        ///< e2(k,l), zero diagonal
    std::vector<double> beta;     ///< probability that a returning bike finds station i full

    [[nodiscard]] int stations() const noexcept { return static_cast<int>(station.size()); }
    [[nodiscard]] VisitRatios scaled(double factor) const;
};

/// Node-level traffic equations e = e P_node where
///   station i          -> road (i,l,1)  with p(i,l)
///   road (k,i,r)       -> station i     with 1 - beta_i
///   road (k,i,r)       -> road (i,l,2)  with beta_i alpha(i,l)
/// normalized to e_station[0] = 1. Nodes outside the recurrent class of the
/// stations get 0. Throws Error{singular} if the stations do not form part of
/// one strongly connected recurrent class, and Error{out_of_range} for a beta
/// outside [0,1].
[[nodiscard]] VisitRatios solve_node_level(const NetworkParams& params, std::span<const double> beta);

/// Returns P{n_i = K} per station for a given set of visit ratios.
using FullStationEvaluator = std::function<std::vector<double>(const VisitRatios&)>;

struct FixedPointOptions {
    double tolerance = 1e-8;
    int max_iterations = 500;
    double damping = 0.5;  ///< weight of the new marginal in each update
};

struct FixedPointResult {
    VisitRatios ratios;
    std::vector<double> full_probability;  ///< evaluator output at the final beta
    int iterations = 0;
    double last_change = 0.0;
    bool converged = false;
};

/// Self-consistent bypass probabilities: beta <- beta + d (P{n_i = K} - beta),
/// starting from beta = 0. Non-convergence is reported, not thrown.
[[nodiscard]] FixedPointResult fixed_point_beta(const NetworkParams& params, const FullStationEvaluator& evaluator,
                                                const FixedPointOptions& options = {});

}  // namespace bss
