#pragma once

#include "bss/model.hpp"
#include "bss/productform.hpp"
#include "bss/routing.hpp"
#include "bss/sparse.hpp"
#include "bss/statespace.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bss {

/// CTMC generator Q stored as off-diagonal rates plus exit rates; Q(r,r) = -exit_rate[r].
struct GeneratorMatrix {
    SparseTransitionMatrix rates;
    std::vector<double> exit_rate;

    [[nodiscard]] std::size_t dimension() const noexcept { return rates.dimension(); }
    [[nodiscard]] double diagonal(std::size_t r) const noexcept { return -exit_rate[r]; }
    /// Off-diagonal sum minus exit rate; zero up to rounding.
    [[nodiscard]] double row_sum(std::size_t r) const noexcept;

    /// Restriction to a closed class. Throws Error{out_of_range} if rate leaves the class.
    [[nodiscard]] GeneratorMatrix restricted(std::span<const std::size_t> keep) const;

    /// Coordinate text including the diagonal.
    void dump(std::ostream& os) const;
};

[[nodiscard]] GeneratorMatrix build_generator(const StateSpace& space, const NetworkParams& params);

/// Jump chain read off the generator: off-diagonal / exit rate.
[[nodiscard]] SparseTransitionMatrix jump_chain_from_generator(const GeneratorMatrix& gen);

struct StationaryOptions {
    std::size_t direct_limit = 20'000;
    std::size_t max_iterations = 1'000'000;
    double tolerance = 1e-10;
};

struct StationarySolve {
    std::vector<double> pi;
    double residual = 0.0;  ///< max-norm of pi Q
    std::size_t iterations = 0;
    std::string method;
};

/// pi Q = 0, sum pi = 1 for an irreducible generator. Sparse LU up to
/// `direct_limit` states, uniformized power iteration beyond.
/// Throws Error{non_convergence} with the residual when the tolerance is missed.
[[nodiscard]] StationarySolve stationary(const GeneratorMatrix& gen, const StationaryOptions& options = {});

struct CtmcSolution {
    StationaryDistribution distribution;
    ReachableClass reachable;
    double residual = 0.0;
    std::size_t iterations = 0;
    std::string method;
};

/// Builds the generator, restricts it to the class reachable from the start
/// state and solves it.
[[nodiscard]] CtmcSolution solve_ctmc(const StateSpace& space, const NetworkParams& params,
                                      const StationaryOptions& options = {});

namespace reference {

[[nodiscard]] GeneratorMatrix build_generator(const StateSpace& space, const NetworkParams& params);

}  // namespace reference

}  // namespace bss
