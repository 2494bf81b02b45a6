#include "bss/sparse.hpp"

#include "bss/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace bss {

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
}

SparseTransitionMatrix SparseTransitionMatrix::from_rows(std::size_t dimension,
                                                         std::vector<std::vector<SparseEntry>> rows) {
    if (rows.size() != dimension) throw Error(ErrorKind::out_of_range, "row count does not match dimension");
    SparseTransitionMatrix m;
    m.dimension_ = dimension;
    m.offsets_.assign(1, 0);
    m.offsets_.reserve(dimension + 1);
    for (auto& row : rows) {
        std::sort(row.begin(), row.end(), [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
        for (std::size_t k = 0; k < row.size();) {
            const std::size_t col = row[k].col;
            if (col >= dimension) throw Error(ErrorKind::out_of_range, "column index out of range");
            double v = 0.0;
            for (; k < row.size() && row[k].col == col; ++k) v += row[k].value;
            if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::out_of_range, "matrix entry is negative or not finite");
            if (v == 0.0) continue;
            m.cols_.push_back(col);
            m.values_.push_back(v);
        }
        m.offsets_.push_back(m.cols_.size());
    }
    return m;
}

double SparseTransitionMatrix::at(std::size_t row, std::size_t col) const noexcept {
    const auto cols = columns(row);
    const auto it = std::lower_bound(cols.begin(), cols.end(), col);
    if (it == cols.end() || *it != col) return 0.0;
    return values(row)[static_cast<std::size_t>(it - cols.begin())];
}

double SparseTransitionMatrix::row_sum(std::size_t row) const noexcept {
    CompensatedSum s;
    for (double v : values(row)) s.add(v);
    return s.value();
}

SparseTransitionMatrix SparseTransitionMatrix::restricted(std::span<const std::size_t> keep) const {
    std::vector<std::vector<SparseEntry>> rows(keep.size());
    for (std::size_t local = 0; local < keep.size(); ++local) {
        const auto cols = columns(keep[local]);
        const auto vals = values(keep[local]);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto it = std::lower_bound(keep.begin(), keep.end(), cols[k]);
            if (it != keep.end() && *it == cols[k]) {
                rows[local].push_back({static_cast<std::size_t>(it - keep.begin()), vals[k]});
            }
        }
    }
    return from_rows(keep.size(), std::move(rows));
}

std::vector<double> SparseTransitionMatrix::left_multiply(std::span<const double> x) const {
    std::vector<double> y(dimension_, 0.0);
    for (std::size_t r = 0; r < dimension_; ++r) {
        const auto cols = columns(r);
        const auto vals = values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) y[cols[k]] += x[r] * vals[k];
    }
    return y;
}

void SparseTransitionMatrix::dump(std::ostream& os) const {
    const auto old = os.precision(17);
    for (std::size_t r = 0; r < dimension_; ++r) {
        const auto cols = columns(r);
        const auto vals = values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) os << r << ' ' << cols[k] << ' ' << vals[k] << '\n';
    }
    os.precision(old);
}

}  // namespace bss
