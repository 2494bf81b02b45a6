#include "bss/ctmc.hpp"
#include "bss/error.hpp"
#include "bss/routing.hpp"
#include "bss/traffic.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <sstream>

using namespace bss;

namespace {

Eigen::MatrixXd dense(const GeneratorMatrix& g) {
    const auto n = static_cast<Eigen::Index>(g.dimension());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < g.dimension(); ++r) {
        const auto cols = g.rates.columns(r);
        const auto vals = g.rates.values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) q(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols[k])) = vals[k];
        q(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) = g.diagonal(r);
    }
    return q;
}

std::size_t rank_of(const StateSpace& space, const std::vector<int>& s) { return space.rank(s); }

}  // namespace

TEST_CASE("two-state generator has stationary vector (2/3, 1/3)") {
    GeneratorMatrix g;
    g.rates = SparseTransitionMatrix::from_rows(2, {{{1, 1.0}}, {{0, 2.0}}});
    g.exit_rate = {1.0, 2.0};
    const auto s = stationary(g);
    CHECK(s.pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(s.pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("T1: state with both bikes at station 1 has one transition of rate 1") {
    const auto p = testing::t1();
    const auto space = enumerate(p);
    const auto g = build_generator(space, p);
    // Layout: n1, m1(1,2), m2(1,2), n2, m1(2,1), m2(2,1).
    const auto r = rank_of(space, {2, 0, 0, 0, 0, 0});
    const auto to = rank_of(space, {1, 1, 0, 0, 0, 0});
    CHECK(g.rates.columns(r).size() == 1);
    CHECK(g.rates.at(r, to) == 1.0);
    CHECK(g.diagonal(r) == -1.0);
}

TEST_CASE("T2: a return to a full station is redirected at rate mu * alpha") {
    const auto p = testing::t2();
    const auto space = enumerate(p);
    const auto g = build_generator(space, p);
    const auto r = rank_of(space, {1, 1, 0, 2, 0, 0});
    const auto to = rank_of(space, {1, 0, 0, 2, 0, 1});
    CHECK(g.rates.at(r, to) == doctest::Approx(p.mu(0, 1) * p.alpha(1, 0)));
    CHECK(g.rates.columns(r).size() == 3);  // the redirect and one rental per station
}

TEST_CASE("generator rows: non-negative off-diagonals, zero sums, audited exit rates") {
    for (const auto& p : {testing::t1(), testing::t2(), testing::t3()}) {
        const auto space = enumerate(p);
        const auto g = build_generator(space, p);
        for (std::size_t r = 0; r < space.size(); ++r) {
            for (double v : g.rates.values(r)) CHECK(v > 0.0);
            CHECK(g.rates.at(r, r) == 0.0);
            CHECK(std::abs(g.row_sum(r)) <= 1e-12);
            const auto s = space.state(r);
            CHECK(g.exit_rate[r] == doctest::Approx(testing::audited_exit_rate(p, {s.begin(), s.end()})).epsilon(1e-13));
        }
    }
}

TEST_CASE("jump chain read off the generator equals routing's jump chain") {
    for (const auto& p : {testing::t1(), testing::t2(), testing::t3()}) {
        const auto space = enumerate(p);
        const auto a = jump_chain_from_generator(build_generator(space, p));
        const auto b = jump_chain(space, p);
        REQUIRE(a.dimension() == b.dimension());
        double diff = 0.0;
        for (std::size_t r = 0; r < a.dimension(); ++r) {
            REQUIRE(a.columns(r).size() == b.columns(r).size());
            for (std::size_t k = 0; k < a.columns(r).size(); ++k) {
                CHECK(a.columns(r)[k] == b.columns(r)[k]);
                diff = std::max(diff, std::abs(a.values(r)[k] - b.values(r)[k]));
            }
        }
        CHECK(diff <= 1e-12);
    }
}

TEST_CASE("CTMC solution: residual, normalization, dense oracle") {
    for (const auto& p : {testing::t1(), testing::t2(), testing::t3()}) {
        const auto space = enumerate(p);
        const auto sol = solve_ctmc(space, p);
        CHECK(sol.residual <= 1e-10);
        CHECK(std::abs(sol.distribution.total() - 1.0) <= 1e-12);
        for (double x : sol.distribution.probability) CHECK(x > 0.0);
        if (sol.reachable.size() <= 200) {
            const auto gen = build_generator(space, p).restricted(sol.reachable.ranks());
            const auto oracle = testing::dense_stationary(dense(gen));
            for (std::size_t k = 0; k < sol.reachable.size(); ++k) {
                CHECK(std::abs(sol.distribution.probability[k] - oracle(static_cast<Eigen::Index>(k))) <= 1e-12);
            }
        }
    }
}

TEST_CASE("embedded-chain identity: pi proportional to R / exit rate") {
    for (const auto& p : {testing::t1(), testing::t2()}) {
        const auto space = enumerate(p);
        const auto sol = solve_ctmc(space, p);
        const auto gen = build_generator(space, p).restricted(sol.reachable.ranks());
        const auto R = solve_state_level(jump_chain_from_generator(gen));
        std::vector<double> q(R.values.size());
        double z = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) z += q[k] = R.values[k] / gen.exit_rate[k];
        double diff = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) diff = std::max(diff, std::abs(q[k] / z - sol.distribution.probability[k]));
        CHECK(diff <= 1e-8);
    }
}

TEST_CASE("iterative stationary path agrees with the direct solve") {
    const auto p = testing::t2();
    const auto space = enumerate(p);
    const auto direct = solve_ctmc(space, p);
    StationaryOptions opts;
    opts.direct_limit = 0;
    const auto iter = solve_ctmc(space, p, opts);
    CHECK(iter.method != direct.method);
    CHECK(iter.residual <= 1e-10);
    double diff = 0.0;
    for (std::size_t k = 0; k < iter.distribution.probability.size(); ++k) {
        diff = std::max(diff, std::abs(iter.distribution.probability[k] - direct.distribution.probability[k]));
    }
    CHECK(diff <= 1e-8);
}

TEST_CASE("iterative path reports non-convergence") {
    const auto p = testing::t2();
    const auto space = enumerate(p);
    StationaryOptions opts;
    opts.direct_limit = 0;
    opts.max_iterations = 2;
    try {
        (void)solve_ctmc(space, p, opts);
        FAIL("expected non-convergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::non_convergence);
    }
}

TEST_CASE("restriction refuses a set that is not closed") {
    const auto p = testing::t1();
    const auto space = enumerate(p);
    const auto g = build_generator(space, p);
    const std::vector<std::size_t> keep{space.initial_rank()};
    CHECK_THROWS_AS((void)g.restricted(keep), Error);
}

TEST_CASE("generator dump lists diagonal entries") {
    GeneratorMatrix g;
    g.rates = SparseTransitionMatrix::from_rows(2, {{{1, 1.5}}, {{0, 2.0}}});
    g.exit_rate = {1.5, 2.0};
    std::ostringstream os;
    g.dump(os);
    CHECK(os.str().find("0 0 -1.5") != std::string::npos);
    CHECK(os.str().find("0 1 1.5") != std::string::npos);
}
