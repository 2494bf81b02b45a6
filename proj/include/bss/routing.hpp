#pragma once

#include "bss/model.hpp"
#include "bss/sparse.hpp"
#include "bss/statespace.hpp"

#include <optional>
#include <span>
#include <vector>

namespace bss {

enum class EventKind {
    rental,             ///< station i -> road (i,l), class 1
    return_to_station,  ///< road (k,i) class r -> station i, station not full
    redirect,           ///< road (k,i) class r -> road (i,l) class 2, station i full
};

[[nodiscard]] const char* to_string(EventKind kind) noexcept;

/// One enabled move of a single bike out of a state.
struct TransitionEvent {
    EventKind kind;
    std::size_t source;       ///< component that loses a bike
    std::size_t destination;  ///< component that gains a bike
    int cls;                  ///< class of the moving bike before the move (rental: 1)
    double probability;       ///< routing weight: p(i,l), 1 or alpha(i,l)
    double rate;              ///< CTMC rate of the move
};

/// Appends every enabled event of `state` to `out`. Events with zero routing
/// probability are skipped.
void enabled_events(const StateLayout& layout, const NetworkParams& params, std::span<const int> state,
                    std::vector<TransitionEvent>& out);

/// Sum of rates of all enabled events.
[[nodiscard]] double exit_rate(const StateLayout& layout, const NetworkParams& params, std::span<const int> state);

/// Entry-by-entry routing matrix P as printed: p(i,l) for rentals, 1 for
/// returns, alpha(i,l) for redirects, accumulated per destination state.
/// Rows are generally not stochastic.
[[nodiscard]] SparseTransitionMatrix literal_routing_entries(const StateSpace& space, const NetworkParams& params);

/// Rate-normalized jump chain P^ over the whole state space. Every row sums to 1.
/// Throws Error{absorbing_state} if some state has no enabled event.
[[nodiscard]] SparseTransitionMatrix jump_chain(const StateSpace& space, const NetworkParams& params);

/// Closed class reached from the start state (C bikes per station).
class ReachableClass {
public:
    ReachableClass() = default;
    explicit ReachableClass(std::vector<std::size_t> sorted_ranks) : ranks_(std::move(sorted_ranks)) {}

    [[nodiscard]] std::span<const std::size_t> ranks() const noexcept { return ranks_; }
    [[nodiscard]] std::size_t size() const noexcept { return ranks_.size(); }
    [[nodiscard]] std::optional<std::size_t> local_index(std::size_t rank) const noexcept;
    [[nodiscard]] bool contains(std::size_t rank) const noexcept { return local_index(rank).has_value(); }

private:
    std::vector<std::size_t> ranks_;
};

/// Breadth-first search over enabled events from the start state.
[[nodiscard]] ReachableClass reachable_class(const StateSpace& space, const NetworkParams& params);

struct LiteralDiagnostics {
    std::size_t nonzeros = 0;
    double min_row_sum = 0.0;
    double max_row_sum = 0.0;
    std::size_t stochastic_rows = 0;  ///< rows summing to 1 within 1e-12
    /// (box)^2 - NK(N-1) - 2N^2(N-1)CK - 2N^3(N-1)^2C^2, the printed minimal
    /// zero count, evaluated in floating point. Diagnostic only.
    double printed_zero_count = 0.0;
    double actual_zero_count = 0.0;  ///< |Omega|^2 - nonzeros
};

[[nodiscard]] LiteralDiagnostics literal_diagnostics(const SparseTransitionMatrix& literal, const NetworkParams& params);

namespace reference {

/// Serial single-loop builds, kept as the baseline for the OpenMP kernels.
[[nodiscard]] SparseTransitionMatrix literal_routing_entries(const StateSpace& space, const NetworkParams& params);
[[nodiscard]] SparseTransitionMatrix jump_chain(const StateSpace& space, const NetworkParams& params);

}  // namespace reference

}  // namespace bss
