#include "bss/productform.hpp"

#include "bss/error.hpp"
#include "bss/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bss {

const char* to_string(Convention convention) noexcept {
    return convention == Convention::literal ? "literal" : "standard";
}

const char* to_string(Source source) noexcept {
    switch (source) {
        case Source::product_form_literal: return "product-form-literal";
        case Source::product_form_standard: return "product-form-standard";
        case Source::ctmc: return "ctmc";
        case Source::simulation: return "simulation";
    }
    return "unknown";
}

Source source_of(Convention convention) noexcept {
    return convention == Convention::literal ? Source::product_form_literal : Source::product_form_standard;
}

double StationaryDistribution::total() const noexcept {
    CompensatedSum s;
    for (double p : probability) s.add(p);
    return s.value();
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(m!) with exact zeros at m = 0 and 1.
double log_factorial(int m) noexcept { return m <= 1 ? 0.0 : std::lgamma(m + 1.0); }

// One (road, class) contribution. `literal` uses m*rate inside the bracket.
double road_class_term(int m, double e, double rate, bool literal) {
    if (m == 0) return 0.0;
    if (e == 0.0) return kNegInf;
    if (!(rate > 0.0)) throw Error(ErrorKind::invalid_params, "positive visit ratio on a road without a riding rate");
    const double denom = literal ? m * rate : rate;
    return m * (std::log(e) - std::log(denom)) - log_factorial(m);
}

void check_rates(const NetworkParams& params, const VisitRatios& ratios) {
    for (int k = 0; k < params.N; ++k) {
        for (int l = 0; l < params.N; ++l) {
            if (k == l) continue;
            if ((ratios.road1(k, l) > 0.0 && !(params.mu(k, l) > 0.0)) ||
                (ratios.road2(k, l) > 0.0 && !(params.xi(k, l) > 0.0))) {
                throw Error(ErrorKind::invalid_params, "positive visit ratio on a road without a riding rate");
            }
        }
    }
}

Normalization finish(const StateSpace& space, std::vector<double> log_w, double max_log, double scaled_sum,
                     Convention convention) {
    Normalization out;
    out.log_G = max_log + std::log(scaled_sum);
    out.G = std::exp(out.log_G);
    auto& dist = out.distribution;
    dist.source = source_of(convention);
    dist.space_size = space.size();
    dist.ranks.resize(space.size());
    for (std::size_t r = 0; r < space.size(); ++r) dist.ranks[r] = r;
    for (double& lw : log_w) lw = std::exp(lw - max_log) / scaled_sum;
    dist.probability = std::move(log_w);
    return out;
}

}  // namespace

double log_weight(std::span<const int> state, const StateLayout& layout, const VisitRatios& ratios,
                  const NetworkParams& params, Convention convention) {
    const int n = params.N;
    const bool literal = convention == Convention::literal;
    double lw = 0.0;
    for (int i = 0; i < n; ++i) {
        const int ni = state[layout.station(i)];
        if (ni == 0) continue;
        const double e = ratios.station[static_cast<std::size_t>(i)];
        if (e == 0.0) return kNegInf;
        lw += ni * (std::log(e) - std::log(params.lambda[static_cast<std::size_t>(i)]));
    }
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            if (k == l) continue;
            const int m1 = state[layout.road(k, l, 1)];
            const int m2 = state[layout.road(k, l, 2)];
            const double t1 = road_class_term(m1, ratios.road1(k, l), params.mu(k, l), literal);
            const double t2 = road_class_term(m2, ratios.road2(k, l), params.xi(k, l), literal);
            if (t1 == kNegInf || t2 == kNegInf) return kNegInf;
            lw += literal ? log_factorial(m1 + m2) + (t1 + t2) : (t1 + t2);
        }
    }
    return lw;
}

double weight(std::span<const int> state, const StateLayout& layout, const VisitRatios& ratios,
              const NetworkParams& params, Convention convention) {
    return std::exp(log_weight(state, layout, ratios, params, convention));
}

Normalization normalize_direct(const StateSpace& space, const VisitRatios& ratios, const NetworkParams& params,
                               Convention convention) {
    check_rates(params, ratios);
    const std::size_t size = space.size();
    std::vector<double> log_w(size);
    const auto count = static_cast<long long>(size);
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < count; ++r) {
        const auto u = static_cast<std::size_t>(r);
        log_w[u] = log_weight(space.state(u), space.layout(), ratios, params, convention);
    }
    double max_log = kNegInf;
    for (double lw : log_w) max_log = std::max(max_log, lw);
    if (max_log == kNegInf) throw Error(ErrorKind::degenerate, "normalization constant is zero");

    // Fixed-size blocks so the summation order is independent of the thread count.
    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (size + kBlock - 1) / kBlock;
    std::vector<double> partial(blocks, 0.0);
    const auto block_count = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < block_count; ++b) {
        const auto lo = static_cast<std::size_t>(b) * kBlock;
        const auto hi = std::min(size, lo + kBlock);
        CompensatedSum s;
        for (std::size_t r = lo; r < hi; ++r) s.add(std::exp(log_w[r] - max_log));
        partial[static_cast<std::size_t>(b)] = s.value();
    }
    CompensatedSum total;
    for (double p : partial) total.add(p);
    return finish(space, std::move(log_w), max_log, total.value(), convention);
}

double convolve_nodes(std::span<const std::vector<double>> factors, int population) {
    const auto width = static_cast<std::size_t>(population + 1);
    std::vector<double> g(width, 0.0);
    g[0] = 1.0;
    std::vector<double> next(width);
    for (const auto& f : factors) {
        for (std::size_t total = 0; total < width; ++total) {
            CompensatedSum s;
            for (std::size_t k = 0; k <= total && k < f.size(); ++k) s.add(f[k] * g[total - k]);
            next[total] = s.value();
        }
        g.swap(next);
    }
    return g[static_cast<std::size_t>(population)];
}

double normalize_convolution(const NetworkParams& params, const VisitRatios& ratios) {
    if (regime_of(params) == Regime::full_reachable) {
        throw Error(ErrorKind::regime, "convolution is only valid in the no-full regime (NC < K)");
    }
    const int n = params.N;
    const int population = params.total_bikes();
    std::vector<std::vector<double>> factors;
    for (int i = 0; i < n; ++i) {
        const double x = ratios.station[static_cast<std::size_t>(i)] / params.lambda[static_cast<std::size_t>(i)];
        std::vector<double> f(static_cast<std::size_t>(std::min(params.K, population) + 1));
        f[0] = 1.0;
        for (std::size_t k = 1; k < f.size(); ++k) f[k] = f[k - 1] * x;
        factors.push_back(std::move(f));
    }
    auto delay_node = [&](double e, double rate) {
        std::vector<double> f(static_cast<std::size_t>(population + 1), 0.0);
        f[0] = 1.0;
        if (e == 0.0) return f;
        const double x = e / rate;
        for (std::size_t m = 1; m < f.size(); ++m) f[m] = f[m - 1] * x / static_cast<double>(m);
        return f;
    };
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            if (k == l) continue;
            factors.push_back(delay_node(ratios.road1(k, l), params.mu(k, l)));
            factors.push_back(delay_node(ratios.road2(k, l), params.xi(k, l)));
        }
    }
    return convolve_nodes(factors, population);
}

FullStationEvaluator full_station_evaluator(const StateSpace& space, const NetworkParams& params,
                                            Convention convention) {
    return [&space, &params, convention](const VisitRatios& ratios) {
        const auto norm = normalize_direct(space, ratios, params, convention);
        std::vector<CompensatedSum> full(static_cast<std::size_t>(params.N));
        for (std::size_t r = 0; r < space.size(); ++r) {
            const auto s = space.state(r);
            for (int i = 0; i < params.N; ++i) {
                if (s[space.layout().station(i)] == params.K) full[static_cast<std::size_t>(i)].add(norm.distribution.probability[r]);
            }
        }
        std::vector<double> out;
        for (const auto& f : full) out.push_back(f.value());
        return out;
    };
}

namespace reference {

Normalization normalize_direct(const StateSpace& space, const VisitRatios& ratios, const NetworkParams& params,
                               Convention convention) {
    std::vector<double> log_w(space.size());
    double max_log = kNegInf;
    for (std::size_t r = 0; r < space.size(); ++r) {
        log_w[r] = log_weight(space.state(r), space.layout(), ratios, params, convention);
        max_log = std::max(max_log, log_w[r]);
    }
    if (max_log == kNegInf) throw Error(ErrorKind::degenerate, "normalization constant is zero");
    CompensatedSum total;
    for (double lw : log_w) total.add(std::exp(lw - max_log));
    return finish(space, std::move(log_w), max_log, total.value(), convention);
}

}  // namespace reference

}  // namespace bss
