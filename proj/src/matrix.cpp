#include "cgnn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cgnn {

namespace {

[[noreturn]] void shape_error(const std::string& op, const Matrix& a, const Matrix& b) {
    throw std::invalid_argument(op + ": incompatible shapes " + a.shape_str() + " and " +
                                b.shape_str());
}

}  // namespace

Matrix::Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) {
        throw std::invalid_argument("Matrix: negative dimension");
    }
}

Matrix::Matrix(int rows, int cols, std::initializer_list<double> values) : Matrix(rows, cols) {
    if (values.size() != data_.size()) {
        throw std::invalid_argument("Matrix: initializer size does not match " + shape_str());
    }
    std::copy(values.begin(), values.end(), data_.begin());
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m.at(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return Matrix(0, 0);
    }
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size()) {
            throw std::invalid_argument("Matrix::from_rows: ragged rows");
        }
        std::copy(rows[r].begin(), rows[r].end(), m.data() + r * rows[0].size());
    }
    return m;
}

std::string Matrix::shape_str() const {
    return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

bool Matrix::operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        shape_error("matmul", a, b);
    }
    Matrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (int j = 0; j < b.cols(); ++j) {
                out.at(i, j) += aik * b.at(k, j);
            }
        }
    }
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        shape_error("add", a, b);
    }
    Matrix out = a;
    for (size_t i = 0; i < out.size(); ++i) {
        out.data()[i] += b.data()[i];
    }
    return out;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        shape_error("subtract", a, b);
    }
    Matrix out = a;
    for (size_t i = 0; i < out.size(); ++i) {
        out.data()[i] -= b.data()[i];
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            out.at(j, i) = a.at(i, j);
        }
    }
    return out;
}

Matrix scale(const Matrix& a, double s) {
    Matrix out = a;
    for (size_t i = 0; i < out.size(); ++i) {
        out.data()[i] *= s;
    }
    return out;
}

Matrix relu(const Matrix& a) {
    Matrix out = a;
    for (size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = std::max(0.0, out.data()[i]);
    }
    return out;
}

Matrix add_row_broadcast(const Matrix& a, const Matrix& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols()) {
        shape_error("add_row_broadcast", a, bias);
    }
    Matrix out = a;
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            out.at(i, j) += bias.at(0, j);
        }
    }
    return out;
}

Matrix row_max_pool(const Matrix& a, const std::vector<int>& rows) {
    if (rows.empty()) {
        throw std::invalid_argument("row_max_pool: empty row set");
    }
    for (int r : rows) {
        if (r < 0 || r >= a.rows()) {
            throw std::invalid_argument("row_max_pool: row " + std::to_string(r) +
                                        " out of range for " + a.shape_str());
        }
    }
    Matrix out(1, a.cols());
    for (int j = 0; j < a.cols(); ++j) {
        double best = -std::numeric_limits<double>::infinity();
        for (int r : rows) {
            best = std::max(best, a.at(r, j));
        }
        out.at(0, j) = best;
    }
    return out;
}

Matrix concat_cols(const std::vector<Matrix>& parts) {
    if (parts.empty()) {
        throw std::invalid_argument("concat_cols: no parts");
    }
    int cols = 0;
    for (const Matrix& p : parts) {
        if (p.rows() != parts[0].rows()) {
            shape_error("concat_cols", parts[0], p);
        }
        cols += p.cols();
    }
    Matrix out(parts[0].rows(), cols);
    int offset = 0;
    for (const Matrix& p : parts) {
        for (int i = 0; i < p.rows(); ++i) {
            for (int j = 0; j < p.cols(); ++j) {
                out.at(i, offset + j) = p.at(i, j);
            }
        }
        offset += p.cols();
    }
    return out;
}

Matrix concat_rows(const std::vector<Matrix>& parts) {
    if (parts.empty()) {
        throw std::invalid_argument("concat_rows: no parts");
    }
    int rows = 0;
    for (const Matrix& p : parts) {
        if (p.cols() != parts[0].cols()) {
            shape_error("concat_rows", parts[0], p);
        }
        rows += p.rows();
    }
    Matrix out(rows, parts[0].cols());
    int offset = 0;
    for (const Matrix& p : parts) {
        for (int i = 0; i < p.rows(); ++i) {
            for (int j = 0; j < p.cols(); ++j) {
                out.at(offset + i, j) = p.at(i, j);
            }
        }
        offset += p.rows();
    }
    return out;
}

double logsumexp(const std::vector<double>& values) {
    if (values.empty()) {
        throw std::invalid_argument("logsumexp: empty input");
    }
    const double m = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) {
        sum += std::exp(v - m);
    }
    return m + std::log(sum);
}

}  // namespace cgnn
