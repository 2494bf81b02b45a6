// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.
#include "bss/ctmc.hpp"
#include "bss/desim.hpp"
#include "bss/metrics.hpp"
#include "bss/productform.hpp"
#include "bss/routing.hpp"
#include "bss/traffic.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace bss;

namespace {

// Tolerances and limits.
constexpr double kExactTol = 1e-10;        // criterion 1: max pointwise and TV
constexpr double kSeBand = 3.0;            // criterion 2: standard errors
constexpr double kCoverage = 0.95;         // criterion 2: fraction of states inside the band
constexpr double kRowSumTol = 1e-12;       // criterion 3
constexpr double kResidualTol = 1e-10;     // criterion 3
constexpr double kEmbeddedTol = 1e-8;      // criterion 3
constexpr double kSumTol = 1e-12;          // criterion 4, 5
constexpr double kRescaleTol = 1e-12;      // criterion 4
constexpr double kRescaleFactor = 3.7;     // criterion 4
constexpr double kConvolutionRelTol = 1e-10;  // criterion 6
constexpr double kLimit1 = 1.0, kLimit2 = 60.0, kLimit6 = 5.0;  // seconds

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

VisitRatios zero_bypass(const NetworkParams& p) {
    return solve_node_level(p, std::vector<double>(static_cast<std::size_t>(p.N), 0.0));
}

/// Product-form probabilities on the CTMC support, in CTMC order.
std::vector<double> on_support(const StationaryDistribution& pf, const StationaryDistribution& ctmc) {
    std::vector<double> out;
    for (auto r : ctmc.ranks) out.push_back(pf.probability[r]);
    return out;
}

Outcome criterion1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = testing::t1();
    const auto space = enumerate(p);
    const auto ctmc = solve_ctmc(space, p);
    const auto pf = normalize_direct(space, zero_bypass(p), p, Convention::standard);
    const auto pf_on = on_support(pf.distribution, ctmc.distribution);
    double max_diff = 0.0;
    for (std::size_t k = 0; k < pf_on.size(); ++k) {
        max_diff = std::max(max_diff, std::abs(pf_on[k] - ctmc.distribution.probability[k]));
    }
    const auto tv = compare_pair(pf.distribution, ctmc.distribution).total_variation;
    const double elapsed = seconds_since(t0);
    o.detail << "reachable=" << ctmc.reachable.size() << " max|diff|=" << max_diff << " TV=" << tv
             << " time=" << elapsed << "s";
    o.require(max_diff <= kExactTol, "max pointwise difference");
    o.require(tv <= kExactTol, "total variation");
    o.require(elapsed < kLimit1, "runtime");
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = testing::t2();
    const auto space = enumerate(p);
    const auto ctmc = solve_ctmc(space, p);
    SimConfig cfg;
    cfg.horizon = 1e5;
    cfg.warmup = 1e3;
    cfg.replications = 20;
    cfg.seed = 20240517;
    const auto est = simulate(p, cfg);

    std::size_t inside = 0;
    for (std::size_t k = 0; k < ctmc.distribution.ranks.size(); ++k) {
        Estimate e;  // unvisited states estimate 0 with zero standard error
        for (std::size_t j = 0; j < est.state_ranks.size(); ++j) {
            if (est.state_ranks[j] == ctmc.distribution.ranks[k]) e = est.state_probability[j];
        }
        if (std::abs(e.mean - ctmc.distribution.probability[k]) <= kSeBand * e.std_error) ++inside;
    }
    const double coverage = static_cast<double>(inside) / static_cast<double>(ctmc.distribution.ranks.size());
    const auto report = performance_report(ctmc.distribution, space);
    double worst = 0.0;  // largest |diff| / SE over the station measures
    for (std::size_t i = 0; i < 2; ++i) {
        const double zi = std::abs(est.problematic[i].mean - report.stations[i].problematic) / est.problematic[i].std_error;
        const double zq = std::abs(est.mean_occupancy[i].mean - report.queues.station[i]) / est.mean_occupancy[i].std_error;
        worst = std::max({worst, zi, zq});
    }
    const double elapsed = seconds_since(t0);
    o.detail << "states in 3SE=" << inside << "/" << ctmc.distribution.ranks.size() << " (" << coverage
             << ") worst station z=" << worst << " events=" << est.events << " time=" << elapsed << "s";
    o.require(coverage >= kCoverage, "state coverage");
    o.require(worst <= kSeBand, "problematic/occupancy band");
    o.require(elapsed < kLimit2, "runtime");
    return o;
}

Outcome criterion3() {
    Outcome o;
    for (const auto& [name, p] : {std::pair{"T1", testing::t1()}, std::pair{"T2", testing::t2()}}) {
        const auto space = enumerate(p);
        const auto jump = jump_chain(space, p);
        double row_err = 0.0;
        for (std::size_t r = 0; r < jump.dimension(); ++r) row_err = std::max(row_err, std::abs(jump.row_sum(r) - 1.0));

        const auto reach = reachable_class(space, p);
        const auto R = solve_state_level(jump.restricted(reach.ranks()));
        double min_r = R.values.front();
        for (double v : R.values) min_r = std::min(min_r, v);

        const auto ctmc = solve_ctmc(space, p);
        const auto gen = build_generator(space, p).restricted(reach.ranks());
        std::vector<double> q(R.values.size());
        double z = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) z += q[k] = R.values[k] / gen.exit_rate[k];
        double emb = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) emb = std::max(emb, std::abs(q[k] / z - ctmc.distribution.probability[k]));

        o.detail << name << ": row err=" << row_err << " min R=" << min_r << " residual=" << R.residual
                 << " embedded diff=" << emb << "; ";
        o.require(row_err <= kRowSumTol, std::string(name) + " row sums");
        o.require(min_r > 0.0, std::string(name) + " positivity");
        o.require(R.residual <= kResidualTol, std::string(name) + " residual");
        o.require(emb <= kEmbeddedTol, std::string(name) + " embedded-chain identity");
    }
    return o;
}

int road_total(std::span<const int> s, const StateLayout& layout) {
    int m = 0;
    for (std::size_t c = 0; c < s.size(); ++c) {
        if (layout.describe(c).kind != StateLayout::Kind::station) m += s[c];
    }
    return m;
}

Outcome criterion4() {
    Outcome o;
    double worst_sum = 0.0, worst_rescale = 0.0;
    std::size_t compared = 0, unequal = 0;
    for (const auto& p : {testing::t1(), testing::t2(), testing::t3()}) {
        const auto space = enumerate(p);
        const auto v = solve_node_level(p, std::vector<double>(static_cast<std::size_t>(p.N), regime_of(p) == Regime::full_reachable ? 0.3 : 0.0));
        for (auto conv : {Convention::literal, Convention::standard}) {
            const auto a = normalize_direct(space, v, p, conv);
            const auto b = normalize_direct(space, v.scaled(kRescaleFactor), p, conv);
            worst_sum = std::max(worst_sum, std::abs(a.distribution.total() - 1.0));
            for (std::size_t k = 0; k < space.size(); ++k) {
                worst_rescale = std::max(worst_rescale, std::abs(a.distribution.probability[k] - b.distribution.probability[k]));
            }
        }
        for (std::size_t r = 0; r < space.size(); ++r) {
            const auto s = space.state(r);
            if (road_total(s, space.layout()) > 1) continue;
            ++compared;
            if (weight(s, space.layout(), v, p, Convention::literal) != weight(s, space.layout(), v, p, Convention::standard)) ++unequal;
        }
    }
    // Minimum population is NC = 2 (N >= 2, C >= 1); the road-count <= 1 states stand in for NC = 1.
    o.detail << "max|sum-1|=" << worst_sum << " rescale diff=" << worst_rescale << " literal!=standard on "
             << unequal << "/" << compared << " states with at most one bike riding (T1,T2,T3)";
    o.require(worst_sum <= kSumTol, "normalization");
    o.require(worst_rescale <= kRescaleTol, "rescaling invariance");
    o.require(compared > 0 && unequal == 0, "exact convention equality");
    return o;
}

Outcome criterion5() {
    Outcome o;
    std::size_t bad_enum = 0;
    double worst_q0 = 0.0;
    for (const auto& [name, p, expected] : {std::tuple{"T1", testing::t1(), std::size_t{21}},
                                            std::tuple{"T2", testing::t2(), std::size_t{114}}}) {
        const auto space = enumerate(p);
        const auto brute = testing::brute_force_states(p);
        bool same = brute.size() == space.size();
        for (std::size_t r = 0; same && r < space.size(); ++r) {
            const auto s = space.state(r);
            same = std::equal(s.begin(), s.end(), brute[r].begin(), brute[r].end());
        }
        o.detail << name << " |Omega|=" << space.size() << " brute=" << brute.size() << "; ";
        o.require(space.size() == expected && same, std::string(name) + " state count");
    }
    std::uint64_t events = 0, checks = 0;
    for (const auto& p : {testing::t1(), testing::t2(), testing::t3()}) {
        const auto space = enumerate(p);
        for (std::size_t r = 0; r < space.size(); ++r) {
            int sum = 0;
            for (int x : space.state(r)) sum += x;
            if (sum != p.total_bikes()) ++bad_enum;
        }
        std::vector<StationaryDistribution> analytic{solve_ctmc(space, p).distribution};
        for (auto conv : {Convention::literal, Convention::standard}) {
            const auto v = solve_node_level(p, std::vector<double>(static_cast<std::size_t>(p.N), 0.2));
            analytic.push_back(normalize_direct(space, v, p, conv).distribution);
        }
        for (const auto& d : analytic) {
            const auto q = mean_queues(d, space);
            worst_q0 = std::max(worst_q0, std::abs(q.riding_direct - q.riding_complement));
        }
        SimConfig cfg;
        cfg.horizon = 2e3;
        cfg.warmup = 0.0;
        cfg.replications = 4;
        const auto est = simulate(p, cfg);
        events += est.events;
        checks += est.conservation_checks;
    }
    o.detail << "enumerated violations=" << bad_enum << " simulated events audited=" << checks << "/" << events
             << " max|Q0 direct-complement|=" << worst_q0;
    o.require(bad_enum == 0, "enumerated conservation");
    o.require(checks == events && events > 0, "simulated conservation");
    o.require(worst_q0 <= kSumTol, "Q0 two ways");
    return o;
}

Outcome criterion6() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& [name, p] : {std::pair{"T1", testing::t1()}, std::pair{"T3", testing::t3()}}) {
        const auto space = enumerate(p);
        const auto v = zero_bypass(p);
        const double direct = normalize_direct(space, v, p, Convention::standard).G;
        const double conv = normalize_convolution(p, v);
        const double rel = std::abs(conv - direct) / direct;
        o.detail << name << " (" << space.size() << " states) rel diff=" << rel << "; ";
        o.require(rel <= kConvolutionRelTol, std::string(name) + " convolution");
    }
    const double elapsed = seconds_since(t0);
    o.detail << "time=" << elapsed << "s";
    o.require(elapsed < kLimit6, "runtime");
    return o;
}

struct FullRegimeReport {
    double tv_standard = 0.0;
    double tv_literal = 0.0;
    std::vector<FixedPointResult> fixed;

    bool operator==(const FullRegimeReport& o) const {
        if (tv_standard != o.tv_standard || tv_literal != o.tv_literal || fixed.size() != o.fixed.size()) return false;
        for (std::size_t k = 0; k < fixed.size(); ++k) {
            if (fixed[k].ratios.beta != o.fixed[k].ratios.beta || fixed[k].iterations != o.fixed[k].iterations ||
                fixed[k].converged != o.fixed[k].converged || fixed[k].last_change != o.fixed[k].last_change) {
                return false;
            }
        }
        return true;
    }
};

FullRegimeReport full_regime_report() {
    const auto p = testing::t2();
    const auto space = enumerate(p);
    const auto ctmc = solve_ctmc(space, p);
    FullRegimeReport r;
    for (auto conv : {Convention::standard, Convention::literal}) {
        auto fp = fixed_point_beta(p, full_station_evaluator(space, p, conv));
        const auto pf = normalize_direct(space, fp.ratios, p, conv);
        const double tv = compare_pair(pf.distribution, ctmc.distribution).total_variation;
        (conv == Convention::standard ? r.tv_standard : r.tv_literal) = tv;
        r.fixed.push_back(std::move(fp));
    }
    return r;
}

Outcome criterion7() {
    Outcome o;
    const auto a = full_regime_report();
    const auto b = full_regime_report();
    o.detail << "TV(standard,CTMC)=" << a.tv_standard << " TV(literal,CTMC)=" << a.tv_literal;
    const char* names[] = {"standard", "literal"};
    for (std::size_t k = 0; k < a.fixed.size(); ++k) {
        const auto& f = a.fixed[k];
        o.detail << " fixed-point[" << names[k] << "]: beta=(" << f.ratios.beta[0] << "," << f.ratios.beta[1]
                 << ") iterations=" << f.iterations << " converged=" << (f.converged ? "yes" : "no");
    }
    o.require(std::isfinite(a.tv_standard) && std::isfinite(a.tv_literal), "report produced");
    o.require(a == b, "deterministic");
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"1 exact product-form regime (T1)", criterion1},
        {"2 simulation vs CTMC (T2)", criterion2},
        {"3 jump chain and state-level ratios", criterion3},
        {"4 product-form internal consistency", criterion4},
        {"5 conservation and counting", criterion5},
        {"6 convolution vs direct normalization", criterion6},
        {"7 full-station regime report (T2)", criterion7},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
