#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bss {

/// Model constants of the bike-sharing network.
///
/// Stations are indexed 0..N-1 internally. Matrices are dense N x N with
/// unused diagonals (which must be zero). Rates on pairs with zero routing
/// probability never enter any computation and may be left at zero.
struct NetworkParams {
    int N = 0;  ///< stations
    int C = 0;  ///< initial bikes per station
    int K = 0;  ///< docks per station
    std::vector<double> lambda;  ///< outside-customer arrival rate per station
    Eigen::MatrixXd p_first;     ///< first-trip destination probabilities
    Eigen::MatrixXd mu;          ///< first-trip riding rates
    Eigen::MatrixXd alpha;       ///< redirect destination probabilities at a full station
    Eigen::MatrixXd xi;          ///< redirect riding rates

    [[nodiscard]] int total_bikes() const noexcept { return N * C; }
};

enum class Regime {
    full_reachable,  ///< NC >= K: some station can fill up
    no_full,         ///< NC < K: no station is ever full
};

[[nodiscard]] const char* to_string(Regime regime) noexcept;
[[nodiscard]] Regime regime_of(const NetworkParams& params) noexcept;

struct Violation {
    std::string code;
    std::string message;
    std::vector<int> indices;  ///< 1-based station indices involved
};

struct ValidationReport {
    std::vector<Violation> violations;
    Regime regime = Regime::no_full;
    int total_bikes = 0;
    int capacity = 0;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    [[nodiscard]] bool full_reachable() const noexcept { return regime == Regime::full_reachable; }
};

inline constexpr double kRowSumTolerance = 1e-12;

/// Reports every violated invariant; never throws.
[[nodiscard]] ValidationReport validate(const NetworkParams& params);

/// Throws Error{invalid_params} listing the violations when validation fails.
void require_valid(const NetworkParams& params);

/// Uniform routing (1/(N-1) to every other station, for both first trips and
/// redirects) with one riding rate on every road.
[[nodiscard]] NetworkParams uniform_params(int stations, int bikes_per_station, int capacity,
                                           std::vector<double> lambda, double riding_rate = 1.0);

}  // namespace bss
