#include "bss/metrics.hpp"

#include "bss/error.hpp"
#include "bss/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bss {

namespace {

void check_station(const StateSpace& space, int station) {
    if (station < 0 || station >= space.stations()) {
        throw Error(ErrorKind::out_of_range, "station index " + std::to_string(station) + " is out of range");
    }
}

void check_support(const StationaryDistribution& dist, const StateSpace& space) {
    if (dist.space_size != space.size()) {
        throw Error(ErrorKind::mismatched_space, "distribution does not belong to this state space");
    }
}

}  // namespace

std::vector<double> station_marginal(const StationaryDistribution& dist, const StateSpace& space, int station) {
    check_station(space, station);
    check_support(dist, space);
    std::vector<CompensatedSum> acc(static_cast<std::size_t>(space.capacity() + 1));
    const std::size_t component = space.layout().station(station);
    for (std::size_t k = 0; k < dist.ranks.size(); ++k) {
        acc[static_cast<std::size_t>(space.state(dist.ranks[k])[component])].add(dist.probability[k]);
    }
    std::vector<double> out;
    for (const auto& a : acc) out.push_back(a.value());
    return out;
}

StationProbabilities problematic(const StationaryDistribution& dist, const StateSpace& space, int station) {
    const auto marginal = station_marginal(dist, space, station);
    StationProbabilities p;
    p.empty = marginal.front();
    p.full = marginal.back();
    p.problematic = p.empty + p.full;
    return p;
}

MeanQueues mean_queues(const StationaryDistribution& dist, const StateSpace& space) {
    check_support(dist, space);
    const int n = space.stations();
    std::vector<CompensatedSum> parked(static_cast<std::size_t>(n));
    CompensatedSum riding;
    for (std::size_t k = 0; k < dist.ranks.size(); ++k) {
        const auto s = space.state(dist.ranks[k]);
        const double p = dist.probability[k];
        for (std::size_t c = 0; c < s.size(); ++c) {
            if (s[c] == 0) continue;
            const auto comp = space.layout().describe(c);
            if (comp.kind == StateLayout::Kind::station) {
                parked[static_cast<std::size_t>(comp.from)].add(s[c] * p);
            } else {
                riding.add(s[c] * p);
            }
        }
    }
    MeanQueues q;
    CompensatedSum total_parked;
    for (const auto& a : parked) {
        q.station.push_back(a.value());
        total_parked.add(a.value());
    }
    q.riding_direct = riding.value();
    q.riding_complement = space.total_bikes() - total_parked.value();
    return q;
}

PerformanceReport performance_report(const StationaryDistribution& dist, const StateSpace& space) {
    PerformanceReport report;
    report.source = dist.source;
    double sum = 0.0;
    for (int i = 0; i < space.stations(); ++i) {
        report.stations.push_back(problematic(dist, space, i));
        sum += report.stations.back().problematic;
    }
    report.mean_problematic = sum / space.stations();
    report.queues = mean_queues(dist, space);
    return report;
}

PairComparison compare_pair(const StationaryDistribution& a, const StationaryDistribution& b) {
    if (a.space_size != b.space_size) {
        throw Error(ErrorKind::mismatched_space, "distributions are over state spaces of different size");
    }
    PairComparison out;
    CompensatedSum l1, outside_a, outside_b;
    std::size_t i = 0;
    std::size_t j = 0;
    auto take = [&](double pa, double pb) {
        const double d = std::abs(pa - pb);
        l1.add(d);
        out.max_abs_difference = std::max(out.max_abs_difference, d);
    };
    while (i < a.ranks.size() || j < b.ranks.size()) {
        if (j == b.ranks.size() || (i < a.ranks.size() && a.ranks[i] < b.ranks[j])) {
            take(a.probability[i], 0.0);
            outside_a.add(a.probability[i]);
            ++i;
        } else if (i == a.ranks.size() || b.ranks[j] < a.ranks[i]) {
            take(0.0, b.probability[j]);
            outside_b.add(b.probability[j]);
            ++j;
        } else {
            take(a.probability[i], b.probability[j]);
            ++i;
            ++j;
        }
    }
    out.total_variation = 0.5 * l1.value();
    out.first_mass_outside_second = outside_a.value();
    out.second_mass_outside_first = outside_b.value();
    return out;
}

ComparisonBlock compare(std::span<const StationaryDistribution> dists) {
    ComparisonBlock block;
    for (const auto& d : dists) block.sources.push_back(d.source);
    for (std::size_t a = 0; a < dists.size(); ++a) {
        for (std::size_t b = a + 1; b < dists.size(); ++b) {
            auto pair = compare_pair(dists[a], dists[b]);
            pair.first = a;
            pair.second = b;
            block.pairs.push_back(pair);
        }
    }
    return block;
}

}  // namespace bss
