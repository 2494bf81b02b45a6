#include "bss/traffic.hpp"

#include "bss/error.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace bss {

namespace {

double fixed_point_residual(const SparseTransitionMatrix& jump, std::span<const double> x) {
    const auto y = jump.left_multiply(x);
    double r = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) r = std::max(r, std::abs(y[i] - x[i]));
    return r;
}

}  // namespace

StateLevelSolution solve_state_level(const SparseTransitionMatrix& jump, const StateLevelOptions& options) {
    const std::size_t n = jump.dimension();
    if (n == 0) throw Error(ErrorKind::singular, "empty jump chain");
    if (n > options.direct_limit) {
        const std::vector<double> start(n, 1.0);
        return solve_state_level_power(jump, start, options);
    }

    // (P^T - I) x = 0 with the first equation replaced by x_0 = 1.
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(jump.nonzeros() + n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto cols = jump.columns(r);
        const auto vals = jump.values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (cols[k] == 0) continue;
            triplets.emplace_back(static_cast<int>(cols[k]), static_cast<int>(r), vals[k]);
        }
    }
    for (std::size_t i = 1; i < n; ++i) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), -1.0);
    triplets.emplace_back(0, 0, 1.0);

    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::SparseMatrix<double> a(dim, dim);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::singular, "jump-chain fixed-point system is singular");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    b(0) = 1.0;
    const Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::singular, "jump-chain fixed-point solve failed");

    StateLevelSolution sol;
    sol.values.assign(x.data(), x.data() + n);
    sol.residual = fixed_point_residual(jump, sol.values);
    sol.method = "direct";
    if (!(sol.residual <= options.tolerance)) {
        throw Error(ErrorKind::non_convergence,
                    "direct fixed-point residual " + std::to_string(sol.residual) + " above tolerance");
    }
    return sol;
}

StateLevelSolution solve_state_level_power(const SparseTransitionMatrix& jump, std::span<const double> start,
                                           const StateLevelOptions& options) {
    const std::size_t n = jump.dimension();
    if (start.size() != n) throw Error(ErrorKind::out_of_range, "start vector has the wrong length");
    std::vector<double> x(start.begin(), start.end());
    StateLevelSolution sol;
    sol.method = "power";
    constexpr std::size_t kCheckEvery = 16;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        const auto y = jump.left_multiply(x);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = 0.5 * (x[i] + y[i]);
            total += x[i];
        }
        for (double& v : x) v /= total;
        if (it % kCheckEvery != 0 && it != options.max_iterations) continue;
        std::vector<double> pinned(x);
        const double first = pinned[0];
        if (!(first > 0.0)) continue;
        for (double& v : pinned) v /= first;
        const double residual = fixed_point_residual(jump, pinned);
        if (residual <= options.tolerance) {
            sol.values = std::move(pinned);
            sol.residual = residual;
            sol.iterations = it;
            return sol;
        }
        sol.residual = residual;
    }
    throw Error(ErrorKind::non_convergence, "power iteration did not converge; residual " + std::to_string(sol.residual));
}

VisitRatios VisitRatios::scaled(double factor) const {
    VisitRatios v = *this;
    for (double& e : v.station) e *= factor;
    v.road1 *= factor;
    v.road2 *= factor;
    return v;
}

namespace {

struct NodeIndex {
    int n;
    [[nodiscard]] int count() const { return n + 2 * n * (n - 1); }
    [[nodiscard]] int station(int i) const { return i; }
    [[nodiscard]] int road(int k, int l, int cls) const {
        const int slot = l < k ? l : l - 1;
        return n + 2 * (k * (n - 1) + slot) + (cls - 1);
    }
};

std::vector<char> search(const Eigen::MatrixXd& p, int start, bool forward) {
    const auto m = static_cast<int>(p.rows());
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    std::deque<int> queue{start};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v = 0; v < m; ++v) {
            const double w = forward ? p(u, v) : p(v, u);
            if (w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                queue.push_back(v);
            }
        }
    }
    return seen;
}

}  // namespace

VisitRatios solve_node_level(const NetworkParams& params, std::span<const double> beta) {
    const int n = params.N;
    if (beta.size() != static_cast<std::size_t>(n)) throw Error(ErrorKind::out_of_range, "beta must have N entries");
    for (double b : beta) {
        if (!(b >= 0.0 && b <= 1.0)) throw Error(ErrorKind::out_of_range, "beta entries must lie in [0,1]");
    }
    const NodeIndex idx{n};
    const int m = idx.count();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l) {
            if (l != i) p(idx.station(i), idx.road(i, l, 1)) = params.p_first(i, l);
        }
    }
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            const double b = beta[static_cast<std::size_t>(i)];
            for (int cls = 1; cls <= 2; ++cls) {
                const int from = idx.road(k, i, cls);
                p(from, idx.station(i)) = 1.0 - b;
                for (int l = 0; l < n; ++l) {
                    if (l != i) p(from, idx.road(i, l, 2)) = b * params.alpha(i, l);
                }
            }
        }
    }

    const auto reached = search(p, idx.station(0), true);
    const auto returns = search(p, idx.station(0), false);
    std::vector<int> nodes;
    for (int v = 0; v < m; ++v) {
        if (!reached[static_cast<std::size_t>(v)]) continue;
        if (!returns[static_cast<std::size_t>(v)]) {
            throw Error(ErrorKind::singular, "node routing graph has no recurrent class containing the stations");
        }
        nodes.push_back(v);
    }
    for (int i = 0; i < n; ++i) {
        if (!reached[static_cast<std::size_t>(idx.station(i))]) {
            throw Error(ErrorKind::singular, "station " + std::to_string(i + 1) + " is not reachable from station 1");
        }
    }

    // (P_R^T - I) x = 0 with the station-0 equation replaced by x_0 = 1.
    const auto s = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd a(s, s);
    for (Eigen::Index r = 0; r < s; ++r) {
        for (Eigen::Index c = 0; c < s; ++c) a(r, c) = p(nodes[static_cast<std::size_t>(c)], nodes[static_cast<std::size_t>(r)]);
        a(r, r) -= 1.0;
    }
    a.row(0).setZero();
    a(0, 0) = 1.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s);
    rhs(0) = 1.0;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw Error(ErrorKind::singular, "node-level traffic equations are singular");
    const Eigen::VectorXd x = lu.solve(rhs);

    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    for (Eigen::Index r = 0; r < s; ++r) e(nodes[static_cast<std::size_t>(r)]) = std::max(0.0, x(r));

    VisitRatios v;
    v.station.resize(static_cast<std::size_t>(n));
    v.road1 = Eigen::MatrixXd::Zero(n, n);
    v.road2 = Eigen::MatrixXd::Zero(n, n);
    v.beta.assign(beta.begin(), beta.end());
    for (int i = 0; i < n; ++i) v.station[static_cast<std::size_t>(i)] = e(idx.station(i));
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            if (k == l) continue;
            v.road1(k, l) = e(idx.road(k, l, 1));
            v.road2(k, l) = e(idx.road(k, l, 2));
        }
    }
    return v;
}

FixedPointResult fixed_point_beta(const NetworkParams& params, const FullStationEvaluator& evaluator,
                                  const FixedPointOptions& options) {
    std::vector<double> beta(static_cast<std::size_t>(params.N), 0.0);
    FixedPointResult result;
    result.ratios = solve_node_level(params, beta);
    for (int it = 1; it <= options.max_iterations; ++it) {
        const auto full = evaluator(result.ratios);
        double change = 0.0;
        for (std::size_t i = 0; i < beta.size(); ++i) {
            const double next = beta[i] + options.damping * (full[i] - beta[i]);
            change = std::max(change, std::abs(next - beta[i]));
            beta[i] = next;
        }
        result.iterations = it;
        result.last_change = change;
        result.ratios = solve_node_level(params, beta);
        if (change <= options.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.full_probability = evaluator(result.ratios);
    return result;
}

}  // namespace bss
