#pragma once

#include "bss/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace bss {

/// Component layout of a state vector, length N(2N-1).
///
/// Station i owns a contiguous block of 2N-1 components:
///   n_i; m1(i,l), m2(i,l) for each l != i in increasing l.
class StateLayout {
public:
    enum class Kind { station, road };

    struct Component {
        Kind kind;
        int from;  ///< station index, or road origin
        int to;    ///< road destination (equal to `from` for stations)
        int cls;   ///< 1 or 2 for roads, 0 for stations
    };

    explicit StateLayout(int stations);

    [[nodiscard]] int stations() const noexcept { return stations_; }
    [[nodiscard]] std::size_t dimension() const noexcept {
        return static_cast<std::size_t>(stations_) * static_cast<std::size_t>(block_);
    }

    [[nodiscard]] std::size_t station(int i) const noexcept {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(block_);
    }

    /// Component holding class `cls` (1 or 2) bikes on road from -> to.
    [[nodiscard]] std::size_t road(int from, int to, int cls) const noexcept {
        const int slot = to < from ? to : to - 1;
        return station(from) + 1 + static_cast<std::size_t>(2 * slot + (cls - 1));
    }

    [[nodiscard]] Component describe(std::size_t component) const noexcept;

private:
    int stations_;
    int block_;
};

/// A point of the state space as a flat component vector (see StateLayout).
struct NetworkState {
    std::vector<int> components;

    friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

/// Counts, ranks and unranks bounded compositions of NC in lexicographic order.
///
/// Position caps are K for station components and NC for road components.
/// Counts saturate at UINT64_MAX.
class CompositionIndexer {
public:
    explicit CompositionIndexer(const NetworkParams& params);

    [[nodiscard]] const StateLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] int total() const noexcept { return total_; }
    [[nodiscard]] int cap(std::size_t position) const noexcept { return caps_[position]; }
    [[nodiscard]] std::uint64_t count() const noexcept { return suffix(0, total_); }
    [[nodiscard]] bool saturated() const noexcept { return count() == kSaturated; }

    /// Number of ways to fill positions [position, D) summing to `remaining`.
    [[nodiscard]] std::uint64_t suffix(std::size_t position, int remaining) const noexcept {
        return table_[position * static_cast<std::size_t>(total_ + 1) + static_cast<std::size_t>(remaining)];
    }

    [[nodiscard]] bool is_member(std::span<const int> state) const noexcept;
    /// Throws Error{not_a_member}.
    [[nodiscard]] std::uint64_t rank(std::span<const int> state) const;
    /// Throws Error{out_of_range}.
    [[nodiscard]] NetworkState unrank(std::uint64_t r) const;

    static constexpr std::uint64_t kSaturated = ~std::uint64_t{0};

private:
    StateLayout layout_;
    int total_;
    std::vector<int> caps_;
    std::vector<std::uint64_t> table_;
};

/// Size of the unconstrained box [0,K]^N x [0,NC]^{2N(N-1)}.
struct BoxSize {
    std::optional<std::uint64_t> exact;  ///< empty when above 2^64
    double log10 = 0.0;
};

[[nodiscard]] BoxSize box_size(const NetworkParams& params);

inline constexpr std::size_t kDefaultMaxStates = 5'000'000;

/// Enumerated state space: every state satisfying the occupancy bounds and
/// bike conservation, in lexicographic order, rank = position.
class StateSpace {
public:
    /// Throws Error{resource_limit} when the state count exceeds `max_states`.
    static StateSpace enumerate(const NetworkParams& params, std::size_t max_states = kDefaultMaxStates);

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] const StateLayout& layout() const noexcept { return indexer_.layout(); }
    [[nodiscard]] const CompositionIndexer& indexer() const noexcept { return indexer_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return layout().dimension(); }
    [[nodiscard]] int stations() const noexcept { return layout().stations(); }
    [[nodiscard]] int total_bikes() const noexcept { return indexer_.total(); }
    [[nodiscard]] int capacity() const noexcept { return capacity_; }

    [[nodiscard]] std::span<const int> state(std::size_t r) const noexcept {
        return {flat_.data() + r * dimension(), dimension()};
    }

    [[nodiscard]] std::size_t rank(std::span<const int> s) const;
    [[nodiscard]] NetworkState unrank(std::size_t r) const;

    /// Rank of the start state: C bikes in every station, nothing on the roads.
    [[nodiscard]] std::size_t initial_rank() const;
    [[nodiscard]] NetworkState initial_state() const;

    /// One state per line, components space-separated.
    void dump(std::ostream& os) const;

private:
    StateSpace(const NetworkParams& params, std::size_t max_states);

    CompositionIndexer indexer_;
    int capacity_;
    int per_station_;
    std::size_t size_ = 0;
    std::vector<int> flat_;
};

[[nodiscard]] inline StateSpace enumerate(const NetworkParams& params, std::size_t max_states = kDefaultMaxStates) {
    return StateSpace::enumerate(params, max_states);
}

}  // namespace bss
