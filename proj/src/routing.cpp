#include "bss/routing.hpp"

#include "bss/error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace bss {

const char* to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::rental: return "rental";
        case EventKind::return_to_station: return "return";
        case EventKind::redirect: return "redirect";
    }
    return "unknown";
}

void enabled_events(const StateLayout& layout, const NetworkParams& params, std::span<const int> state,
                    std::vector<TransitionEvent>& out) {
    const int n = params.N;
    for (int i = 0; i < n; ++i) {
        const std::size_t si = layout.station(i);
        if (state[si] >= 1) {
            const double lambda = params.lambda[static_cast<std::size_t>(i)];
            for (int l = 0; l < n; ++l) {
                const double p = l == i ? 0.0 : params.p_first(i, l);
                if (p > 0.0) out.push_back({EventKind::rental, si, layout.road(i, l, 1), 1, p, lambda * p});
            }
        }
        // Bikes finishing a ride on any road into station i.
        const bool full = state[si] >= params.K;
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            for (int cls = 1; cls <= 2; ++cls) {
                const std::size_t road = layout.road(k, i, cls);
                const int riding = state[road];
                if (riding == 0) continue;
                const double service = riding * (cls == 1 ? params.mu(k, i) : params.xi(k, i));
                if (!full) {
                    out.push_back({EventKind::return_to_station, road, si, cls, 1.0, service});
                    continue;
                }
                for (int l = 0; l < n; ++l) {
                    const double a = l == i ? 0.0 : params.alpha(i, l);
                    if (a > 0.0) out.push_back({EventKind::redirect, road, layout.road(i, l, 2), cls, a, service * a});
                }
            }
        }
    }
}

double exit_rate(const StateLayout& layout, const NetworkParams& params, std::span<const int> state) {
    std::vector<TransitionEvent> events;
    enabled_events(layout, params, state, events);
    CompensatedSum total;
    for (const auto& e : events) total.add(e.rate);
    return total.value();
}

namespace {

enum class Weight { probability, normalized_rate };

void build_row(const StateSpace& space, const NetworkParams& params, std::size_t r, Weight weight,
               std::vector<SparseEntry>& row) {
    const auto state = space.state(r);
    std::vector<TransitionEvent> events;
    enabled_events(space.layout(), params, state, events);
    std::vector<int> target(state.begin(), state.end());
    CompensatedSum total;
    for (const auto& e : events) total.add(e.rate);
    const double exit = total.value();
    row.reserve(events.size());
    for (const auto& e : events) {
        if (weight == Weight::normalized_rate && !(e.rate > 0.0)) continue;
        --target[e.source];
        ++target[e.destination];
        const auto col = static_cast<std::size_t>(space.indexer().rank(target));
        ++target[e.source];
        --target[e.destination];
        row.push_back({col, weight == Weight::probability ? e.probability : e.rate / exit});
    }
}

void check_absorbing(const SparseTransitionMatrix& m) {
    for (std::size_t r = 0; r < m.dimension(); ++r) {
        if (m.columns(r).empty()) {
            throw Error(ErrorKind::absorbing_state, "state " + std::to_string(r) + " has zero exit rate");
        }
    }
}

}  // namespace

SparseTransitionMatrix literal_routing_entries(const StateSpace& space, const NetworkParams& params) {
    return detail::build_rows_parallel(space.size(), [&](std::size_t r, std::vector<SparseEntry>& row) {
        build_row(space, params, r, Weight::probability, row);
    });
}

SparseTransitionMatrix jump_chain(const StateSpace& space, const NetworkParams& params) {
    auto m = detail::build_rows_parallel(space.size(), [&](std::size_t r, std::vector<SparseEntry>& row) {
        build_row(space, params, r, Weight::normalized_rate, row);
    });
    check_absorbing(m);
    return m;
}

std::optional<std::size_t> ReachableClass::local_index(std::size_t rank) const noexcept {
    const auto it = std::lower_bound(ranks_.begin(), ranks_.end(), rank);
    if (it == ranks_.end() || *it != rank) return std::nullopt;
    return static_cast<std::size_t>(it - ranks_.begin());
}

ReachableClass reachable_class(const StateSpace& space, const NetworkParams& params) {
    std::vector<char> seen(space.size(), 0);
    std::deque<std::size_t> frontier;
    const std::size_t start = space.initial_rank();
    seen[start] = 1;
    frontier.push_back(start);
    std::vector<TransitionEvent> events;
    std::vector<int> target;
    while (!frontier.empty()) {
        const std::size_t r = frontier.front();
        frontier.pop_front();
        const auto state = space.state(r);
        events.clear();
        enabled_events(space.layout(), params, state, events);
        target.assign(state.begin(), state.end());
        for (const auto& e : events) {
            --target[e.source];
            ++target[e.destination];
            const auto next = static_cast<std::size_t>(space.indexer().rank(target));
            ++target[e.source];
            --target[e.destination];
            if (!seen[next]) {
                seen[next] = 1;
                frontier.push_back(next);
            }
        }
    }
    std::vector<std::size_t> ranks;
    for (std::size_t r = 0; r < seen.size(); ++r) {
        if (seen[r]) ranks.push_back(r);
    }
    return ReachableClass(std::move(ranks));
}

LiteralDiagnostics literal_diagnostics(const SparseTransitionMatrix& literal, const NetworkParams& params) {
    LiteralDiagnostics d;
    d.nonzeros = literal.nonzeros();
    const double dim = static_cast<double>(literal.dimension());
    d.actual_zero_count = dim * dim - static_cast<double>(d.nonzeros);
    if (literal.dimension() > 0) {
        d.min_row_sum = d.max_row_sum = literal.row_sum(0);
    }
    for (std::size_t r = 0; r < literal.dimension(); ++r) {
        const double s = literal.row_sum(r);
        d.min_row_sum = std::min(d.min_row_sum, s);
        d.max_row_sum = std::max(d.max_row_sum, s);
        if (std::abs(s - 1.0) <= 1e-12) ++d.stochastic_rows;
    }
    const double n = params.N;
    const double c = params.C;
    const double k = params.K;
    const double box = std::pow(10.0, box_size(params).log10);
    d.printed_zero_count = box * box - n * k * (n - 1) - 2 * n * n * (n - 1) * c * k -
                           2 * n * n * n * (n - 1) * (n - 1) * c * c;
    return d;
}

namespace reference {

SparseTransitionMatrix literal_routing_entries(const StateSpace& space, const NetworkParams& params) {
    std::vector<std::vector<SparseEntry>> rows(space.size());
    for (std::size_t r = 0; r < space.size(); ++r) build_row(space, params, r, Weight::probability, rows[r]);
    return SparseTransitionMatrix::from_rows(space.size(), std::move(rows));
}

SparseTransitionMatrix jump_chain(const StateSpace& space, const NetworkParams& params) {
    std::vector<std::vector<SparseEntry>> rows(space.size());
    for (std::size_t r = 0; r < space.size(); ++r) build_row(space, params, r, Weight::normalized_rate, rows[r]);
    auto m = SparseTransitionMatrix::from_rows(space.size(), std::move(rows));
    check_absorbing(m);
    return m;
}

}  // namespace reference

}  // namespace bss
