#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace bss {

struct SparseEntry {
    std::size_t col;
    double value;
};

/// Row-compressed nonnegative sparse matrix.
///
/// Invariants: columns sorted within a row, no duplicates, no stored zeros,
/// every value finite and >= 0.
class SparseTransitionMatrix {
public:
    SparseTransitionMatrix() = default;

    /// Sorts each row, merges duplicate columns by addition and drops zeros.
    /// Throws Error{out_of_range} on a negative, non-finite or out-of-range entry.
    static SparseTransitionMatrix from_rows(std::size_t dimension, std::vector<std::vector<SparseEntry>> rows);

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return cols_.size(); }

    [[nodiscard]] std::span<const std::size_t> columns(std::size_t row) const noexcept {
        return {cols_.data() + offsets_[row], offsets_[row + 1] - offsets_[row]};
    }
    [[nodiscard]] std::span<const double> values(std::size_t row) const noexcept {
        return {values_.data() + offsets_[row], offsets_[row + 1] - offsets_[row]};
    }

    [[nodiscard]] double at(std::size_t row, std::size_t col) const noexcept;
    [[nodiscard]] double row_sum(std::size_t row) const noexcept;

    /// Submatrix on the sorted index set `keep`; entries leaving the set are dropped.
    [[nodiscard]] SparseTransitionMatrix restricted(std::span<const std::size_t> keep) const;

    /// x^T A
    [[nodiscard]] std::vector<double> left_multiply(std::span<const double> x) const;

    /// Coordinate text: "row col value" per line, 0-based.
    void dump(std::ostream& os) const;

    friend bool operator==(const SparseTransitionMatrix&, const SparseTransitionMatrix&) = default;

private:
    std::size_t dimension_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept;
    [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

}  // namespace bss
