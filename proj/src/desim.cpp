#include "bss/desim.hpp"

#include "bss/error.hpp"
#include "bss/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <queue>
#include <random>
#include <unordered_map>

namespace bss {

void check_config(const SimConfig& cfg) {
    if (!(cfg.horizon > cfg.warmup) || !(cfg.warmup >= 0.0)) {
        throw Error(ErrorKind::config, "simulation needs 0 <= warmup < horizon");
    }
    if (cfg.replications < 1) throw Error(ErrorKind::config, "simulation needs at least one replication");
}

namespace {

struct Pending {
    double time;
    std::uint64_t seq;  // tie-breaker for determinism
    int bike;           // -1 for an outside arrival
    int station;        // arrival station

    bool operator>(const Pending& o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

struct Bike {
    int from = 0;
    int to = 0;
    int cls = 0;
};

class Replication {
public:
    Replication(const NetworkParams& params, const SimConfig& cfg, int index)
        : params_(params), cfg_(cfg), layout_(params.N), indexer_(params), index_(index) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(index), 0x5eedu};
        rng_.seed(seq);
        const int n = params.N;
        for (int i = 0; i < n; ++i) {
            std::vector<double> p(static_cast<std::size_t>(n)), a(static_cast<std::size_t>(n));
            for (int l = 0; l < n; ++l) {
                p[static_cast<std::size_t>(l)] = l == i ? 0.0 : params.p_first(i, l);
                a[static_cast<std::size_t>(l)] = l == i ? 0.0 : params.alpha(i, l);
            }
            first_trip_.emplace_back(p.begin(), p.end());
            redirect_.emplace_back(a.begin(), a.end());
        }
        state_.assign(layout_.dimension(), 0);
        for (int i = 0; i < n; ++i) state_[layout_.station(i)] = params.C;
        bikes_.resize(static_cast<std::size_t>(params.total_bikes()));
        for (int b = static_cast<int>(bikes_.size()) - 1; b >= 0; --b) free_.push_back(b);
        out_.empty.assign(static_cast<std::size_t>(n), 0.0);
        out_.full.assign(static_cast<std::size_t>(n), 0.0);
        out_.mean_occupancy.assign(static_cast<std::size_t>(n), 0.0);
    }

    ReplicationResult run() {
        for (int i = 0; i < params_.N; ++i) schedule_arrival(i, 0.0);
        if (cfg_.estimate_states) current_rank_ = indexer_.rank(state_);
        double now = 0.0;
        while (!queue_.empty() && queue_.top().time <= cfg_.horizon) {
            const Pending next = queue_.top();
            queue_.pop();
            accumulate(now, next.time);
            now = next.time;
            if (next.bike < 0) {
                arrival(next.station, now);
            } else {
                completion(next.bike, now);
            }
            ++out_.events;
            audit();
            if (cfg_.estimate_states) current_rank_ = indexer_.rank(state_);
        }
        accumulate(now, cfg_.horizon);
        finish();
        return std::move(out_);
    }

private:
    double exponential(double rate) { return std::exponential_distribution<double>(rate)(rng_); }

    void schedule_arrival(int station, double now) {
        const double rate = params_.lambda[static_cast<std::size_t>(station)];
        if (rate > 0.0) queue_.push({now + exponential(rate), seq_++, -1, station});
    }

    void start_ride(int bike, int from, int to, int cls, double now) {
        bikes_[static_cast<std::size_t>(bike)] = {from, to, cls};
        ++state_[layout_.road(from, to, cls)];
        const double rate = cls == 1 ? params_.mu(from, to) : params_.xi(from, to);
        if (rate > 0.0) queue_.push({now + exponential(rate), seq_++, bike, to});
    }

    void arrival(int i, double now) {
        const std::size_t si = layout_.station(i);
        schedule_arrival(i, now);
        if (state_[si] == 0) {
            ++out_.lost_customers;
            record(now, "lost", i, si, si);
            return;
        }
        const int l = first_trip_[static_cast<std::size_t>(i)](rng_);
        const int bike = free_.back();
        free_.pop_back();
        --state_[si];
        start_ride(bike, i, l, 1, now);
        record(now, "arrival", i, si, layout_.road(i, l, 1));
    }

    void completion(int bike, double now) {
        const Bike b = bikes_[static_cast<std::size_t>(bike)];
        const std::size_t road = layout_.road(b.from, b.to, b.cls);
        const int i = b.to;
        const std::size_t si = layout_.station(i);
        --state_[road];
        if (state_[si] < params_.K) {
            ++state_[si];
            free_.push_back(bike);
            record(now, "return", i, road, si);
            return;
        }
        const int l = redirect_[static_cast<std::size_t>(i)](rng_);
        ++out_.redirects;
        start_ride(bike, i, l, 2, now);
        record(now, "redirect", i, road, layout_.road(i, l, 2));
    }

    void record(double now, const char* kind, int station, std::size_t source, std::size_t destination) {
        if (index_ == 0 && out_.trace.size() < cfg_.trace_events) {
            out_.trace.push_back({now, kind, station + 1, source, destination});
        }
    }

    void audit() {
        long long total = 0;
        for (std::size_t c = 0; c < state_.size(); ++c) {
            if (state_[c] < 0 || state_[c] > indexer_.cap(c)) {
                throw Error(ErrorKind::out_of_range, "simulated state violates an occupancy bound");
            }
            total += state_[c];
        }
        if (total != params_.total_bikes()) throw Error(ErrorKind::out_of_range, "simulated state lost or gained a bike");
        ++out_.conservation_checks;
    }

    void accumulate(double from, double to) {
        const double lo = std::max(from, cfg_.warmup);
        const double hi = std::min(to, cfg_.horizon);
        if (!(hi > lo)) return;
        const double dt = hi - lo;
        if (cfg_.estimate_states) state_time_[current_rank_] += dt;
        double parked = 0.0;
        for (int i = 0; i < params_.N; ++i) {
            const int ni = state_[layout_.station(i)];
            const auto u = static_cast<std::size_t>(i);
            if (ni == 0) out_.empty[u] += dt;
            if (ni == params_.K) out_.full[u] += dt;
            out_.mean_occupancy[u] += ni * dt;
            parked += ni;
        }
        out_.riding += (params_.total_bikes() - parked) * dt;
    }

    void finish() {
        const double window = cfg_.horizon - cfg_.warmup;
        for (auto* v : {&out_.empty, &out_.full, &out_.mean_occupancy}) {
            for (double& x : *v) x /= window;
        }
        out_.riding /= window;
        std::vector<std::pair<std::uint64_t, double>> sorted(state_time_.begin(), state_time_.end());
        std::sort(sorted.begin(), sorted.end());
        for (const auto& [rank, t] : sorted) {
            out_.state_ranks.push_back(rank);
            out_.state_fraction.push_back(t / window);
        }
    }

    const NetworkParams& params_;
    const SimConfig& cfg_;
    StateLayout layout_;
    CompositionIndexer indexer_;
    int index_;
    std::mt19937_64 rng_;
    std::vector<std::discrete_distribution<int>> first_trip_;
    std::vector<std::discrete_distribution<int>> redirect_;
    std::vector<int> state_;
    std::vector<Bike> bikes_;
    std::vector<int> free_;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
    std::uint64_t seq_ = 0;
    std::uint64_t current_rank_ = 0;
    std::unordered_map<std::uint64_t, double> state_time_;
    ReplicationResult out_;
};

Estimate summarize(std::span<const double> values) {
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    Estimate e;
    e.mean = mean;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        e.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        e.ci_half_width = 1.96 * e.std_error;
    }
    return e;
}

std::vector<Estimate> summarize_columns(std::span<const ReplicationResult> runs,
                                        std::vector<double> ReplicationResult::*field) {
    const std::size_t width = (runs.front().*field).size();
    std::vector<Estimate> out(width);
    std::vector<double> column(runs.size());
    for (std::size_t j = 0; j < width; ++j) {
        for (std::size_t r = 0; r < runs.size(); ++r) column[r] = (runs[r].*field)[j];
        out[j] = summarize(column);
    }
    return out;
}

}  // namespace

StationaryDistribution SimEstimate::distribution(std::size_t space_size) const {
    StationaryDistribution d;
    d.source = Source::simulation;
    d.space_size = space_size;
    d.ranks.assign(state_ranks.begin(), state_ranks.end());
    for (const auto& e : state_probability) d.probability.push_back(e.mean);
    return d;
}

ReplicationResult run_replication(const NetworkParams& params, const SimConfig& cfg, int index) {
    check_config(cfg);
    return Replication(params, cfg, index).run();
}

SimEstimate aggregate(std::span<const ReplicationResult> runs) {
    if (runs.empty()) throw Error(ErrorKind::config, "no replications to aggregate");
    SimEstimate est;
    est.replications = static_cast<int>(runs.size());

    std::map<std::uint64_t, std::vector<double>> per_state;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (std::size_t k = 0; k < runs[r].state_ranks.size(); ++k) {
            auto& column = per_state[runs[r].state_ranks[k]];
            column.resize(runs.size(), 0.0);
            column[r] = runs[r].state_fraction[k];
        }
    }
    for (const auto& [rank, column] : per_state) {
        est.state_ranks.push_back(rank);
        est.state_probability.push_back(summarize(column));
    }

    est.empty = summarize_columns(runs, &ReplicationResult::empty);
    est.full = summarize_columns(runs, &ReplicationResult::full);
    est.mean_occupancy = summarize_columns(runs, &ReplicationResult::mean_occupancy);
    std::vector<double> column(runs.size());
    for (std::size_t j = 0; j < est.empty.size(); ++j) {
        for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r].empty[j] + runs[r].full[j];
        est.problematic.push_back(summarize(column));
    }
    for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r].riding;
    est.riding = summarize(column);

    for (const auto& run : runs) {
        est.events += run.events;
        est.lost_customers += run.lost_customers;
        est.redirects += run.redirects;
        est.conservation_checks += run.conservation_checks;
    }
    est.trace = runs.front().trace;
    return est;
}

SimEstimate simulate(const NetworkParams& params, const SimConfig& cfg) {
    check_config(cfg);
    std::vector<ReplicationResult> runs(static_cast<std::size_t>(cfg.replications));
    std::vector<std::exception_ptr> errors(runs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < cfg.replications; ++r) {
        try {
            runs[static_cast<std::size_t>(r)] = Replication(params, cfg, r).run();
        } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return aggregate(runs);
}

namespace reference {

SimEstimate simulate(const NetworkParams& params, const SimConfig& cfg) {
    check_config(cfg);
    std::vector<ReplicationResult> runs;
    for (int r = 0; r < cfg.replications; ++r) runs.push_back(run_replication(params, cfg, r));
    return aggregate(runs);
}

}  // namespace reference

}  // namespace bss
