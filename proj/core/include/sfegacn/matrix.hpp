#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sfegacn {

/// Dense row-major matrix of doubles. Small by design: the pipeline's nets
/// and feature sets are desk-scale, so plain loops are fine.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

    /// Copies row r of src into row dst_row.
    void set_row(std::size_t dst_row, std::span<const double> values);

    /// Returns the matrix made of the given rows of this one, in order.
    Matrix gather_rows(const std::vector<std::size_t>& indices) const;

    /// Stacks other below this one. Column counts must match.
    void append_rows(const Matrix& other);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// result = a * b
Matrix matmul(const Matrix& a, const Matrix& b);

/// result = a^T * b
Matrix matmul_at_b(const Matrix& a, const Matrix& b);

/// result = a * b^T
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

/// Column sums of a, as a vector of length a.cols().
std::vector<double> column_sums(const Matrix& a);

/// Adds bias[c] to every entry of column c.
void add_row_vector(Matrix& a, const std::vector<double>& bias);

/// Squared Euclidean distance between two equal-length spans.
double squared_distance(std::span<const double> a, std::span<const double> b);

} // namespace sfegacn
