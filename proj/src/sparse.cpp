#include "tens/sparse.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tens {

SymmetricCsr SymmetricCsr::from_pattern(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> entries)
{
    for (auto& [i, j] : entries) {
        if (i >= n || j >= n) {
            throw std::out_of_range("sparsity entry outside a " + std::to_string(n) + "x" + std::to_string(n) +
                                    " matrix");
        }
        if (j < i) {
            std::swap(i, j);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        entries.emplace_back(i, i);
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

    SymmetricCsr m;
    m.row_ptr_.assign(n + 1, 0);
    m.cols_.reserve(entries.size());
    for (const auto& [i, j] : entries) {
        ++m.row_ptr_[i + 1];
        m.cols_.push_back(j);
    }
    for (std::size_t i = 0; i < n; ++i) {
        m.row_ptr_[i + 1] += m.row_ptr_[i];
    }
    m.values_.assign(m.cols_.size(), 0.0);
    return m;
}

std::size_t SymmetricCsr::find(std::size_t i, std::size_t j) const
{
    if (j < i) {
        std::swap(i, j);
    }
    if (i >= size()) {
        return static_cast<std::size_t>(-1);
    }
    const auto begin = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto end = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) {
        return static_cast<std::size_t>(-1);
    }
    return static_cast<std::size_t>(it - cols_.begin());
}

void SymmetricCsr::add(std::size_t i, std::size_t j, double v)
{
    const auto k = find(i, j);
    if (k == static_cast<std::size_t>(-1)) {
        throw std::out_of_range("entry (" + std::to_string(i) + ", " + std::to_string(j) + ") not in pattern");
    }
    values_[k] += v;
}

double SymmetricCsr::value(std::size_t i, std::size_t j) const
{
    const auto k = find(i, j);
    return k == static_cast<std::size_t>(-1) ? 0.0 : values_[k];
}

void SymmetricCsr::multiply(std::span<const double> x, std::span<double> y) const
{
    const std::size_t n = size();
    std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        double acc = 0.0;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            const std::size_t j = cols_[k];
            const double a = values_[k];
            acc += a * x[j];
            if (j != i) {
                y[j] += a * xi;
            }
        }
        y[i] += acc;
    }
}

std::vector<double> SymmetricCsr::diagonal() const
{
    std::vector<double> d(size());
    for (std::size_t i = 0; i < size(); ++i) {
        d[i] = values_[row_ptr_[i]];
    }
    return d;
}

}  // namespace tens
