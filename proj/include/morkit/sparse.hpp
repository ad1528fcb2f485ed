#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "morkit/kernels.hpp"

namespace morkit
{

struct Triplet
{
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse row matrix, 0-based indices, columns sorted per row.
class CsrMatrix
{
   public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
              std::vector<std::size_t> col_idx, std::vector<double> values);

    /// Duplicate (row, col) entries are summed.
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
    static CsrMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::size_t>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    kernels::CsrView view() const { return {rows_, cols_, row_ptr_, col_idx_, values_}; }

    /// y = M x for a single vector.
    void multiply(std::span<const double> x, std::span<double> y) const;

    double at(std::size_t row, std::size_t col) const;
    std::vector<double> diagonal() const;

    /// this + alpha * other; the sparsity pattern is the union.
    CsrMatrix add(const CsrMatrix& other, double alpha = 1.0) const;
    CsrMatrix scaled(double alpha) const;

    /// max |a_ij - a_ji|
    double asymmetry() const;

    Eigen::SparseMatrix<double> to_eigen() const;
    Eigen::MatrixXd to_dense() const;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

}  // namespace morkit
