#include "morkit/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "morkit/errors.hpp"

namespace morkit
{

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values))
{
    if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != values_.size() ||
        col_idx_.size() != values_.size())
        throw InvalidArgument("inconsistent CSR arrays");
    for (std::size_t r = 0; r < rows_; ++r) {
        if (row_ptr_[r] > row_ptr_[r + 1]) throw InvalidArgument("CSR row pointers not monotone");
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            if (col_idx_[p] >= cols_) throw IndexOutOfRange("CSR column index out of range");
            if (p > row_ptr_[r] && col_idx_[p] <= col_idx_[p - 1])
                throw InvalidArgument("CSR columns must be strictly increasing per row");
        }
    }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets)
{
    for (const auto& t : triplets)
        if (t.row >= rows || t.col >= cols) throw IndexOutOfRange("triplet index out of range");
    std::sort(triplets.begin(), triplets.end(),
              [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    std::vector<std::size_t> row_ptr(rows + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(triplets.size());
    values.reserve(triplets.size());
    std::size_t prev_row = rows, prev_col = cols;
    for (const auto& t : triplets) {
        if (t.row == prev_row && t.col == prev_col) {
            values.back() += t.value;
            continue;
        }
        col_idx.push_back(t.col);
        values.push_back(t.value);
        ++row_ptr[t.row + 1];
        prev_row = t.row;
        prev_col = t.col;
    }
    for (std::size_t r = 0; r < rows; ++r) row_ptr[r + 1] += row_ptr[r];
    return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::identity(std::size_t n)
{
    std::vector<std::size_t> row_ptr(n + 1), col_idx(n);
    for (std::size_t i = 0; i <= n; ++i) row_ptr[i] = i;
    for (std::size_t i = 0; i < n; ++i) col_idx[i] = i;
    return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0));
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    if (x.size() != cols_ || y.size() != rows_) throw DimensionMismatch("CSR multiply: dimension mismatch");
    kernels::omp::spmv(view(), x, y, 1);
}

double CsrMatrix::at(std::size_t row, std::size_t col) const
{
    if (row >= rows_ || col >= cols_) throw IndexOutOfRange("CSR at: index out of range");
    auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> CsrMatrix::diagonal() const
{
    std::vector<double> d(std::min(rows_, cols_), 0.0);
    for (std::size_t r = 0; r < d.size(); ++r) d[r] = at(r, r);
    return d;
}

CsrMatrix CsrMatrix::add(const CsrMatrix& other, double alpha) const
{
    if (other.rows_ != rows_ || other.cols_ != cols_) throw DimensionMismatch("CSR add: shape mismatch");
    std::vector<std::size_t> row_ptr(rows_ + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(nnz() + other.nnz());
    values.reserve(nnz() + other.nnz());
    for (std::size_t r = 0; r < rows_; ++r) {
        std::size_t p = row_ptr_[r], q = other.row_ptr_[r];
        const std::size_t pe = row_ptr_[r + 1], qe = other.row_ptr_[r + 1];
        while (p < pe || q < qe) {
            if (q == qe || (p < pe && col_idx_[p] < other.col_idx_[q])) {
                col_idx.push_back(col_idx_[p]);
                values.push_back(values_[p++]);
            } else if (p == pe || other.col_idx_[q] < col_idx_[p]) {
                col_idx.push_back(other.col_idx_[q]);
                values.push_back(alpha * other.values_[q++]);
            } else {
                col_idx.push_back(col_idx_[p]);
                values.push_back(values_[p++] + alpha * other.values_[q++]);
            }
        }
        row_ptr[r + 1] = values.size();
    }
    return CsrMatrix(rows_, cols_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::scaled(double alpha) const
{
    CsrMatrix m = *this;
    for (auto& v : m.values_) v *= alpha;
    return m;
}

double CsrMatrix::asymmetry() const
{
    if (rows_ != cols_) return INFINITY;
    double d = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
            d = std::max(d, std::abs(values_[p] - at(col_idx_[p], r)));
    return d;
}

Eigen::SparseMatrix<double> CsrMatrix::to_eigen() const
{
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
            t.emplace_back(static_cast<int>(r), static_cast<int>(col_idx_[p]), values_[p]);
    Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Eigen::MatrixXd CsrMatrix::to_dense() const
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_idx_[p])) = values_[p];
    return m;
}

}  // namespace morkit
