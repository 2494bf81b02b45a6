#pragma once

#include "bss/sparse.hpp"

#include <cstddef>
#include <vector>

namespace bss::detail {

/// Builds each row independently with `row_fn(row, entries)` across OpenMP
/// threads. Row order, and therefore the result, does not depend on the
/// thread count.
template <typename RowFn>
SparseTransitionMatrix build_rows_parallel(std::size_t dimension, RowFn&& row_fn) {
    std::vector<std::vector<SparseEntry>> rows(dimension);
    const auto n = static_cast<long long>(dimension);
#pragma omp parallel for schedule(dynamic, 256)
    for (long long r = 0; r < n; ++r) {
        row_fn(static_cast<std::size_t>(r), rows[static_cast<std::size_t>(r)]);
    }
    return SparseTransitionMatrix::from_rows(dimension, std::move(rows));
}

}  // namespace bss::detail
