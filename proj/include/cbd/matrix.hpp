#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cbd {

// Dense row-major matrix of doubles. Small by design: the toolkit only needs
// storage, indexing and row views; anything numeric lives at the call site.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) return Matrix();
        Matrix m(rows.size(), rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_)
                throw std::invalid_argument("Matrix::from_rows: ragged input");
            for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_)
            throw std::invalid_argument("Matrix::append_row: width mismatch");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// One sparse row: (column, value) pairs sorted by column, zeros omitted.
using SparseRow = std::vector<std::pair<std::uint32_t, double>>;

// Row-wise sparse matrix used for TF-IDF features; column count is explicit
// because trailing columns may be all-zero.
struct SparseMatrix {
    std::size_t cols = 0;
    std::vector<SparseRow> rows;

    std::size_t row_count() const { return rows.size(); }

    static SparseMatrix from_dense(const Matrix& m) {
        SparseMatrix s;
        s.cols = m.cols();
        s.rows.resize(m.rows());
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                if (m(r, c) != 0.0) s.rows[r].emplace_back(static_cast<std::uint32_t>(c), m(r, c));
        return s;
    }

    Matrix to_dense() const {
        Matrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (const auto& [c, v] : rows[r]) m(r, c) = v;
        return m;
    }
};

inline double sparse_dot(const SparseRow& row, std::span<const double> dense) {
    double acc = 0.0;
    for (const auto& [c, v] : row) acc += v * dense[c];
    return acc;
}

}  // namespace cbd
