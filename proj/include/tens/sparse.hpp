#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace tens {

/**
 * Symmetric sparse matrix holding the upper triangle and diagonal in CSR form.
 * Row i stores columns j >= i in ascending order; the diagonal is the first entry of each row.
 */
class SymmetricCsr {
public:
    SymmetricCsr() = default;

    /// Builds the sparsity pattern from (row, col) pairs in any order; (j, i) is folded onto (i, j).
    /// Every diagonal entry is always present.
    static SymmetricCsr from_pattern(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> entries);

    std::size_t size() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
    std::size_t stored_entries() const noexcept { return values_.size(); }

    /// Adds `v` to entry (i, j); throws std::out_of_range if it is outside the pattern.
    void add(std::size_t i, std::size_t j, double v);

    /// Entry (i, j), zero when not stored.
    double value(std::size_t i, std::size_t j) const;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;

    std::vector<double> diagonal() const;

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> columns() const noexcept { return cols_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

private:
    std::size_t find(std::size_t i, std::size_t j) const;

    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
};

}  // namespace tens
