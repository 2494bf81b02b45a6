#include "bss/statespace.hpp"

#include "bss/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace bss {

StateLayout::StateLayout(int stations) : stations_(stations), block_(2 * stations - 1) {}

StateLayout::Component StateLayout::describe(std::size_t component) const noexcept {
    const int from = static_cast<int>(component / static_cast<std::size_t>(block_));
    const int offset = static_cast<int>(component % static_cast<std::size_t>(block_));
    if (offset == 0) return {Kind::station, from, from, 0};
    const int slot = (offset - 1) / 2;
    const int cls = (offset - 1) % 2 + 1;
    const int to = slot < from ? slot : slot + 1;
    return {Kind::road, from, to, cls};
}

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) noexcept {
    const std::uint64_t s = a + b;
    return s < a ? CompositionIndexer::kSaturated : s;
}

}  // namespace

CompositionIndexer::CompositionIndexer(const NetworkParams& params)
    : layout_(params.N), total_(params.total_bikes()) {
    const std::size_t dim = layout_.dimension();
    caps_.resize(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        caps_[c] = layout_.describe(c).kind == StateLayout::Kind::station ? std::min(params.K, total_) : total_;
    }
    const auto width = static_cast<std::size_t>(total_ + 1);
    table_.assign((dim + 1) * width, 0);
    table_[dim * width + 0] = 1;
    for (std::size_t pos = dim; pos-- > 0;) {
        for (int rem = 0; rem <= total_; ++rem) {
            std::uint64_t acc = 0;
            for (int v = 0; v <= std::min(caps_[pos], rem); ++v) {
                acc = saturating_add(acc, table_[(pos + 1) * width + static_cast<std::size_t>(rem - v)]);
            }
            table_[pos * width + static_cast<std::size_t>(rem)] = acc;
        }
    }
}

bool CompositionIndexer::is_member(std::span<const int> state) const noexcept {
    if (state.size() != caps_.size()) return false;
    long long sum = 0;
    for (std::size_t c = 0; c < state.size(); ++c) {
        if (state[c] < 0 || state[c] > caps_[c]) return false;
        sum += state[c];
    }
    return sum == total_;
}

std::uint64_t CompositionIndexer::rank(std::span<const int> state) const {
    if (!is_member(state)) throw Error(ErrorKind::not_a_member, "state is not a member of the state space");
    std::uint64_t r = 0;
    int rem = total_;
    for (std::size_t pos = 0; pos < state.size(); ++pos) {
        for (int v = 0; v < state[pos]; ++v) r += suffix(pos + 1, rem - v);
        rem -= state[pos];
    }
    return r;
}

NetworkState CompositionIndexer::unrank(std::uint64_t r) const {
    if (r >= count()) throw Error(ErrorKind::out_of_range, "rank " + std::to_string(r) + " is out of range");
    NetworkState s;
    s.components.resize(caps_.size());
    int rem = total_;
    for (std::size_t pos = 0; pos < caps_.size(); ++pos) {
        int v = 0;
        for (;; ++v) {
            const std::uint64_t block = suffix(pos + 1, rem - v);
            if (r < block) break;
            r -= block;
        }
        s.components[pos] = v;
        rem -= v;
    }
    return s;
}

BoxSize box_size(const NetworkParams& params) {
    const int n = params.N;
    const int roads = 2 * n * (n - 1);
    const double stations_base = params.K + 1.0;
    const double road_base = params.total_bikes() + 1.0;
    BoxSize box;
    box.log10 = n * std::log10(stations_base) + roads * std::log10(road_base);

    std::uint64_t acc = 1;
    bool overflow = false;
    auto mul = [&](std::uint64_t f) { overflow = __builtin_mul_overflow(acc, f, &acc); };
    for (int i = 0; i < n && !overflow; ++i) mul(static_cast<std::uint64_t>(params.K) + 1);
    for (int i = 0; i < roads && !overflow; ++i) mul(static_cast<std::uint64_t>(params.total_bikes()) + 1);
    if (!overflow) box.exact = acc;
    return box;
}

StateSpace::StateSpace(const NetworkParams& params, std::size_t max_states)
    : indexer_(params), capacity_(params.K), per_station_(params.C) {
    const std::uint64_t count = indexer_.count();
    if (count > max_states) {
        throw Error(ErrorKind::resource_limit,
                    "state space has " + (indexer_.saturated() ? std::string("more than 2^64") : std::to_string(count)) +
                        " states, above the cap of " + std::to_string(max_states));
    }
    size_ = static_cast<std::size_t>(count);
    const std::size_t dim = dimension();
    flat_.reserve(size_ * dim);

    // Lexicographic generation; a value is tried only if the suffix can still be completed.
    std::vector<int> current(dim, 0);
    auto fill = [&](auto&& self, std::size_t pos, int rem) -> void {
        if (pos == dim) {
            flat_.insert(flat_.end(), current.begin(), current.end());
            return;
        }
        for (int v = 0; v <= std::min(indexer_.cap(pos), rem); ++v) {
            if (indexer_.suffix(pos + 1, rem - v) == 0) continue;
            current[pos] = v;
            self(self, pos + 1, rem - v);
        }
        current[pos] = 0;
    };
    fill(fill, 0, indexer_.total());
}

StateSpace StateSpace::enumerate(const NetworkParams& params, std::size_t max_states) {
    return StateSpace(params, max_states);
}

std::size_t StateSpace::rank(std::span<const int> s) const { return static_cast<std::size_t>(indexer_.rank(s)); }

NetworkState StateSpace::unrank(std::size_t r) const {
    if (r >= size_) throw Error(ErrorKind::out_of_range, "rank " + std::to_string(r) + " is out of range");
    const auto view = state(r);
    return NetworkState{{view.begin(), view.end()}};
}

NetworkState StateSpace::initial_state() const {
    NetworkState s;
    s.components.assign(dimension(), 0);
    for (int i = 0; i < stations(); ++i) s.components[layout().station(i)] = per_station_;
    return s;
}

std::size_t StateSpace::initial_rank() const { return rank(initial_state().components); }

void StateSpace::dump(std::ostream& os) const {
    for (std::size_t r = 0; r < size_; ++r) {
        const auto s = state(r);
        for (std::size_t c = 0; c < s.size(); ++c) {
            if (c) os << ' ';
            os << s[c];
        }
        os << '\n';
    }
}

}  // namespace bss
