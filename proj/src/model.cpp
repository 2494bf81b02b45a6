#include "bss/model.hpp"

#include "bss/error.hpp"

#include <cmath>
#include <sstream>

namespace bss {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return "config";
        case ErrorKind::invalid_params: return "invalid_params";
        case ErrorKind::resource_limit: return "resource_limit";
        case ErrorKind::not_a_member: return "not_a_member";
        case ErrorKind::out_of_range: return "out_of_range";
        case ErrorKind::absorbing_state: return "absorbing_state";
        case ErrorKind::singular: return "singular";
        case ErrorKind::non_convergence: return "non_convergence";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::regime: return "regime";
        case ErrorKind::mismatched_space: return "mismatched_space";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

const char* to_string(Regime regime) noexcept {
    return regime == Regime::full_reachable ? "full-reachable" : "no-full";
}

Regime regime_of(const NetworkParams& params) noexcept {
    return params.total_bikes() >= params.K ? Regime::full_reachable : Regime::no_full;
}

namespace {

void add(ValidationReport& report, std::string code, std::string message, std::vector<int> indices = {}) {
    report.violations.push_back({std::move(code), std::move(message), std::move(indices)});
}

bool square(const Eigen::MatrixXd& m, int n) { return m.rows() == n && m.cols() == n; }

void check_probability_matrix(ValidationReport& report, const Eigen::MatrixXd& m, const char* name) {
    const auto n = static_cast<int>(m.rows());
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = m(i, j);
            if (i == j) {
                if (v != 0.0) {
                    add(report, "diagonal", std::string(name) + " has a nonzero diagonal entry at station " +
                                                std::to_string(i + 1), {i + 1});
                }
                continue;
            }
            if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
                add(report, "probability_range",
                    std::string(name) + "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") is not a probability",
                    {i + 1, j + 1});
            }
            sum += v;
        }
        if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
            std::ostringstream os;
            os.precision(17);
            os << "row " << i + 1 << " of " << name << " sums to " << sum;
            add(report, "row_sum", os.str(), {i + 1});
        }
    }
}

void check_rate_matrix(ValidationReport& report, const Eigen::MatrixXd& rates, const Eigen::MatrixXd& probs,
                       const char* name) {
    const auto n = static_cast<int>(rates.rows());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = rates(i, j);
            if (i == j) {
                if (v != 0.0) {
                    add(report, "diagonal", std::string(name) + " has a nonzero diagonal entry at station " +
                                                std::to_string(i + 1), {i + 1});
                }
                continue;
            }
            const std::string where = std::string(name) + "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
            if (!std::isfinite(v) || v < 0.0) {
                add(report, "rate_range", where + " is negative or not finite", {i + 1, j + 1});
            } else if (probs(i, j) > 0.0 && v <= 0.0) {
                add(report, "rate_positive", where + " must be positive on a route with positive probability",
                    {i + 1, j + 1});
            }
        }
    }
}

}  // namespace

ValidationReport validate(const NetworkParams& params) {
    ValidationReport report;
    report.total_bikes = params.total_bikes();
    report.capacity = params.K;
    report.regime = regime_of(params);

    if (params.N < 2) add(report, "N_min", "N must be at least 2");
    if (params.C < 1) add(report, "C_min", "C must be at least 1");
    if (params.K < 1) add(report, "K_min", "K must be at least 1");
    if (params.C > params.K) add(report, "C_le_K", "C must not exceed K (the initial state puts C bikes in each station)");
    if (params.N < 1) return report;

    const int n = params.N;
    bool shapes_ok = true;
    if (params.lambda.size() != static_cast<std::size_t>(n)) {
        add(report, "shape", "lambda must have N entries");
        shapes_ok = false;
    }
    const std::pair<const Eigen::MatrixXd*, const char*> matrices[] = {
        {&params.p_first, "p_first"}, {&params.mu, "mu"}, {&params.alpha, "alpha"}, {&params.xi, "xi"}};
    for (const auto& [m, name] : matrices) {
        if (!square(*m, n)) {
            add(report, "shape", std::string(name) + " must be an N x N matrix");
            shapes_ok = false;
        }
    }
    if (!shapes_ok) return report;

    for (int i = 0; i < n; ++i) {
        const double l = params.lambda[static_cast<std::size_t>(i)];
        if (!std::isfinite(l) || l <= 0.0) {
            add(report, "lambda_positive", "lambda of station " + std::to_string(i + 1) + " must be positive", {i + 1});
        }
    }
    check_probability_matrix(report, params.p_first, "p_first");
    check_probability_matrix(report, params.alpha, "alpha");
    check_rate_matrix(report, params.mu, params.p_first, "mu");
    check_rate_matrix(report, params.xi, params.alpha, "xi");
    return report;
}

void require_valid(const NetworkParams& params) {
    const auto report = validate(params);
    if (report.ok()) return;
    std::string message = "invalid parameters:";
    for (const auto& v : report.violations) message += " [" + v.code + "] " + v.message + ";";
    throw Error(ErrorKind::invalid_params, message);
}

NetworkParams uniform_params(int stations, int bikes_per_station, int capacity, std::vector<double> lambda,
                             double riding_rate) {
    NetworkParams p;
    p.N = stations;
    p.C = bikes_per_station;
    p.K = capacity;
    p.lambda = std::move(lambda);
    const double share = stations > 1 ? 1.0 / (stations - 1) : 0.0;
    p.p_first = Eigen::MatrixXd::Constant(stations, stations, share);
    p.alpha = p.p_first;
    p.mu = Eigen::MatrixXd::Constant(stations, stations, riding_rate);
    p.xi = p.mu;
    for (int i = 0; i < stations; ++i) {
        p.p_first(i, i) = p.alpha(i, i) = p.mu(i, i) = p.xi(i, i) = 0.0;
    }
    return p;
}

}  // namespace bss
