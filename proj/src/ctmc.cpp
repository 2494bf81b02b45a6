#include "bss/ctmc.hpp"

#include "bss/error.hpp"
#include "parallel.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace bss {

double GeneratorMatrix::row_sum(std::size_t r) const noexcept { return rates.row_sum(r) - exit_rate[r]; }

GeneratorMatrix GeneratorMatrix::restricted(std::span<const std::size_t> keep) const {
    GeneratorMatrix out;
    out.rates = rates.restricted(keep);
    out.exit_rate.reserve(keep.size());
    for (std::size_t local = 0; local < keep.size(); ++local) {
        const double e = exit_rate[keep[local]];
        if (std::abs(out.rates.row_sum(local) - e) > 1e-12 * std::max(1.0, e)) {
            throw Error(ErrorKind::out_of_range, "generator rate leaves the kept class");
        }
        out.exit_rate.push_back(e);
    }
    return out;
}

void GeneratorMatrix::dump(std::ostream& os) const {
    const auto old = os.precision(17);
    for (std::size_t r = 0; r < dimension(); ++r) {
        const auto cols = rates.columns(r);
        const auto vals = rates.values(r);
        bool diag_written = false;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (!diag_written && cols[k] > r) {
                os << r << ' ' << r << ' ' << diagonal(r) << '\n';
                diag_written = true;
            }
            os << r << ' ' << cols[k] << ' ' << vals[k] << '\n';
        }
        if (!diag_written) os << r << ' ' << r << ' ' << diagonal(r) << '\n';
    }
    os.precision(old);
}

namespace {

void generator_row(const StateSpace& space, const NetworkParams& params, std::size_t r,
                   std::vector<SparseEntry>& row) {
    const auto state = space.state(r);
    std::vector<TransitionEvent> events;
    enabled_events(space.layout(), params, state, events);
    std::vector<int> target(state.begin(), state.end());
    for (const auto& e : events) {
        --target[e.source];
        ++target[e.destination];
        row.push_back({static_cast<std::size_t>(space.indexer().rank(target)), e.rate});
        ++target[e.source];
        --target[e.destination];
    }
}

std::vector<double> exit_rates_of(const SparseTransitionMatrix& rates) {
    std::vector<double> exit(rates.dimension());
    for (std::size_t r = 0; r < rates.dimension(); ++r) exit[r] = rates.row_sum(r);
    return exit;
}

std::vector<double> left_residual(const GeneratorMatrix& gen, std::span<const double> pi) {
    auto y = gen.rates.left_multiply(pi);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= pi[i] * gen.exit_rate[i];
    return y;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

GeneratorMatrix build_generator(const StateSpace& space, const NetworkParams& params) {
    GeneratorMatrix gen;
    gen.rates = detail::build_rows_parallel(space.size(), [&](std::size_t r, std::vector<SparseEntry>& row) {
        generator_row(space, params, r, row);
    });
    gen.exit_rate = exit_rates_of(gen.rates);
    return gen;
}

SparseTransitionMatrix jump_chain_from_generator(const GeneratorMatrix& gen) {
    std::vector<std::vector<SparseEntry>> rows(gen.dimension());
    for (std::size_t r = 0; r < gen.dimension(); ++r) {
        if (!(gen.exit_rate[r] > 0.0)) {
            throw Error(ErrorKind::absorbing_state, "state " + std::to_string(r) + " has zero exit rate");
        }
        const auto cols = gen.rates.columns(r);
        const auto vals = gen.rates.values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) rows[r].push_back({cols[k], vals[k] / gen.exit_rate[r]});
    }
    return SparseTransitionMatrix::from_rows(gen.dimension(), std::move(rows));
}

StationarySolve stationary(const GeneratorMatrix& gen, const StationaryOptions& options) {
    const std::size_t n = gen.dimension();
    if (n == 0) throw Error(ErrorKind::singular, "empty generator");
    StationarySolve out;

    if (n <= options.direct_limit) {
        // Q^T pi = 0 with the last equation replaced by sum(pi) = 1.
        const auto dim = static_cast<Eigen::Index>(n);
        const auto last = n - 1;
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(gen.rates.nonzeros() + 2 * n);
        for (std::size_t r = 0; r < n; ++r) {
            const auto cols = gen.rates.columns(r);
            const auto vals = gen.rates.values(r);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (cols[k] != last) triplets.emplace_back(static_cast<int>(cols[k]), static_cast<int>(r), vals[k]);
            }
            if (r != last) triplets.emplace_back(static_cast<int>(r), static_cast<int>(r), -gen.exit_rate[r]);
            triplets.emplace_back(static_cast<int>(last), static_cast<int>(r), 1.0);
        }
        Eigen::SparseMatrix<double> a(dim, dim);
        a.setFromTriplets(triplets.begin(), triplets.end());
        a.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.analyzePattern(a);
        lu.factorize(a);
        if (lu.info() != Eigen::Success) throw Error(ErrorKind::singular, "generator system is singular");
        Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
        b(dim - 1) = 1.0;
        const Eigen::VectorXd x = lu.solve(b);
        out.pi.assign(x.data(), x.data() + n);
        for (double& p : out.pi) p = std::max(0.0, p);
        CompensatedSum total;
        for (double p : out.pi) total.add(p);
        const double t = total.value();
        for (double& p : out.pi) p /= t;
        out.method = "direct";
    } else {
        // Uniformization: P = I + Q / Lambda with Lambda above every exit rate, so P is aperiodic.
        const double uniform = 1.05 * *std::max_element(gen.exit_rate.begin(), gen.exit_rate.end());
        std::vector<double> pi(n, 1.0 / static_cast<double>(n));
        out.method = "power";
        bool converged = false;
        for (std::size_t it = 1; it <= options.max_iterations; ++it) {
            const auto flow = gen.rates.left_multiply(pi);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                pi[i] = pi[i] + (flow[i] - pi[i] * gen.exit_rate[i]) / uniform;
                total += pi[i];
            }
            for (double& p : pi) p /= total;
            out.iterations = it;
            if (it % 16 == 0 && max_abs(left_residual(gen, pi)) <= options.tolerance) {
                converged = true;
                break;
            }
        }
        out.pi = std::move(pi);
        if (!converged) {
            out.residual = max_abs(left_residual(gen, out.pi));
            throw Error(ErrorKind::non_convergence,
                        "stationary power iteration did not converge; residual " + std::to_string(out.residual));
        }
    }
    out.residual = max_abs(left_residual(gen, out.pi));
    if (!(out.residual <= options.tolerance)) {
        throw Error(ErrorKind::non_convergence, "stationary residual " + std::to_string(out.residual) + " above tolerance");
    }
    return out;
}

CtmcSolution solve_ctmc(const StateSpace& space, const NetworkParams& params, const StationaryOptions& options) {
    CtmcSolution sol;
    sol.reachable = reachable_class(space, params);
    const auto gen = build_generator(space, params).restricted(sol.reachable.ranks());
    auto solve = stationary(gen, options);
    sol.distribution.source = Source::ctmc;
    sol.distribution.space_size = space.size();
    sol.distribution.ranks.assign(sol.reachable.ranks().begin(), sol.reachable.ranks().end());
    sol.distribution.probability = std::move(solve.pi);
    sol.residual = solve.residual;
    sol.iterations = solve.iterations;
    sol.method = solve.method;
    return sol;
}

namespace reference {

GeneratorMatrix build_generator(const StateSpace& space, const NetworkParams& params) {
    std::vector<std::vector<SparseEntry>> rows(space.size());
    for (std::size_t r = 0; r < space.size(); ++r) generator_row(space, params, r, rows[r]);
    GeneratorMatrix gen;
    gen.rates = SparseTransitionMatrix::from_rows(space.size(), std::move(rows));
    gen.exit_rate = exit_rates_of(gen.rates);
    return gen;
}

}  // namespace reference

}  // namespace bss
