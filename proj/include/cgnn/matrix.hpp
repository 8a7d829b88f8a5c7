#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace cgnn {

/// Dense row-major matrix of 64-bit floats. The only numeric carrier in the
/// library; sized for desk-scale graphs (n up to a few hundred), so kernels
/// are plain loops with no BLAS dependency.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols);
    Matrix(int rows, int cols, std::initializer_list<double> values);

    static Matrix zeros(int rows, int cols) { return Matrix(rows, cols); }
    static Matrix identity(int n);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    std::string shape_str() const;

    double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    size_t size() const { return data_.size(); }

    void fill(double v);
    bool all_finite() const;

    bool operator==(const Matrix& other) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// Shape mismatches throw std::invalid_argument naming both shapes.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix scale(const Matrix& a, double s);
Matrix relu(const Matrix& a);

/// Adds a 1 x cols bias row to every row of `a`.
Matrix add_row_broadcast(const Matrix& a, const Matrix& bias);

/// Per-column maximum over the selected rows. `rows` must be nonempty and in
/// range.
Matrix row_max_pool(const Matrix& a, const std::vector<int>& rows);

/// Horizontal concatenation; all parts must have the same row count.
Matrix concat_cols(const std::vector<Matrix>& parts);

/// Vertical concatenation; all parts must have the same column count.
Matrix concat_rows(const std::vector<Matrix>& parts);

/// Stable log(sum(exp(v))) via max shift. Throws on an empty input.
double logsumexp(const std::vector<double>& values);

}  // namespace cgnn
