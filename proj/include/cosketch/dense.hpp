#pragma once

#include <cstddef>
#include <span>

#include "cosketch/memory.hpp"

namespace cosketch {

// Column-major dense matrix of doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[j * rows_ + i]; }

    std::span<double> col(std::size_t j) noexcept { return {values_.data() + j * rows_, rows_}; }
    std::span<const double> col(std::size_t j) const noexcept {
        return {values_.data() + j * rows_, rows_};
    }

    std::span<double> data() noexcept { return {values_.data(), values_.size()}; }
    std::span<const double> data() const noexcept { return {values_.data(), values_.size()}; }

    void fill(double v) noexcept;

    // First `n` columns as a new matrix.
    DenseMatrix left_cols(std::size_t n) const;
    DenseMatrix transposed() const;

    double frobenius_norm() const noexcept;
    bool all_finite() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    memory::tracked_vector<double> values_;
};

// [a, b] side by side; a and b must have the same row count.
DenseMatrix hconcat(const DenseMatrix& a, const DenseMatrix& b);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;

}  // namespace cosketch
