#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace morkit
{

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Ordered collection of vectors of a common dimension.
///
/// Algorithms in this library only talk to vectors through this interface,
/// so any backend (in-process buffers, handles into an external solver)
/// works with them unchanged. All methods returning small matrices return
/// data whose size depends on `len`, never on `dim`.
///
/// Mutation contract: single owner. Copies are explicit via copy().
class VectorArray
{
   public:
    virtual ~VectorArray() = default;

    virtual std::size_t dim() const = 0;
    virtual std::size_t len() const = 0;
    virtual std::string backend() const = 0;

    virtual std::unique_ptr<VectorArray> copy() const = 0;

    /// `count` zero vectors living in the same space as this array.
    virtual std::unique_ptr<VectorArray> zeros(std::size_t count) const = 0;

    virtual void append(const VectorArray& other) = 0;

    /// result[i] = sum_j coeffs(i, j) * this[j]; coeffs is count x len.
    virtual std::unique_ptr<VectorArray> lincomb(const Matrix& coeffs) const = 0;

    /// this[i] += alpha[i] * x[i], where x may hold a single vector that is
    /// broadcast. alpha may also have a single entry.
    virtual void axpy(std::span<const double> alpha, const VectorArray& x) = 0;
    void axpy(double alpha, const VectorArray& x);

    /// this[i] *= alpha[i]
    virtual void scal(std::span<const double> alpha) = 0;
    void scal(double alpha);

    /// Euclidean inner products, len x other.len().
    virtual Matrix inner(const VectorArray& other) const = 0;

    /// Euclidean <this[i], other[i]>.
    virtual Vector pairwise_inner(const VectorArray& other) const;

    /// entries [i, k] = this[i][indices[k]]
    virtual Matrix dofs(std::span<const std::size_t> indices) const = 0;

    virtual std::unique_ptr<VectorArray> select(std::span<const std::size_t> indices) const;
    std::unique_ptr<VectorArray> select_range(std::size_t begin, std::size_t end) const;

    /// Removes the vectors at `indices` (any order, duplicates ignored).
    virtual void remove(std::span<const std::size_t> indices) = 0;

    /// Euclidean norms.
    Vector norms() const;

   protected:
    void check_same_dim(const VectorArray& other, const char* what) const;
};

/// Backend that keeps its vectors in process memory, exposing each vector as
/// a contiguous span.
class LocalVectorArray : public VectorArray
{
   public:
    virtual std::span<const double> vec(std::size_t i) const = 0;
    virtual std::span<double> vec(std::size_t i) = 0;

    /// Zero array of the same backend with arbitrary dimension.
    virtual std::unique_ptr<LocalVectorArray> make(std::size_t dim, std::size_t count) const = 0;

    Matrix dofs(std::span<const std::size_t> indices) const override;

    /// Full dense dump, len x dim.
    Matrix to_matrix() const;
};

/// Contiguous row-major storage; all bulk operations run through one OpenMP
/// kernel over the single buffer.
class DenseVectorArray final : public LocalVectorArray
{
   public:
    DenseVectorArray(std::size_t dim, std::size_t len = 0);
    DenseVectorArray(std::size_t dim, std::vector<double> data);

    /// Rows of `m` become the vectors.
    static DenseVectorArray from_rows(const Matrix& m);
    static DenseVectorArray from_vectors(const std::vector<std::vector<double>>& vectors, std::size_t dim);

    std::size_t dim() const override { return dim_; }
    std::size_t len() const override { return len_; }
    std::string backend() const override { return "dense"; }

    std::unique_ptr<VectorArray> copy() const override;
    std::unique_ptr<VectorArray> zeros(std::size_t count) const override;
    std::unique_ptr<LocalVectorArray> make(std::size_t dim, std::size_t count) const override;
    void append(const VectorArray& other) override;
    std::unique_ptr<VectorArray> lincomb(const Matrix& coeffs) const override;
    void axpy(std::span<const double> alpha, const VectorArray& x) override;
    using VectorArray::axpy;
    void scal(std::span<const double> alpha) override;
    using VectorArray::scal;
    Matrix inner(const VectorArray& other) const override;
    Vector pairwise_inner(const VectorArray& other) const override;
    std::unique_ptr<VectorArray> select(std::span<const std::size_t> indices) const override;
    void remove(std::span<const std::size_t> indices) override;

    std::span<const double> vec(std::size_t i) const override;
    std::span<double> vec(std::size_t i) override;

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

   private:
    std::size_t dim_;
    std::size_t len_;
    std::vector<double> data_;
};

/// One heap allocation per vector, scalar loops per vector. Exists as the
/// non-vectorized baseline for the benchmark harness.
class ListVectorArray final : public LocalVectorArray
{
   public:
    ListVectorArray(std::size_t dim, std::size_t len = 0);
    static ListVectorArray from_dense(const DenseVectorArray& a);

    std::size_t dim() const override { return dim_; }
    std::size_t len() const override { return vectors_.size(); }
    std::string backend() const override { return "list"; }

    std::unique_ptr<VectorArray> copy() const override;
    std::unique_ptr<VectorArray> zeros(std::size_t count) const override;
    std::unique_ptr<LocalVectorArray> make(std::size_t dim, std::size_t count) const override;
    void append(const VectorArray& other) override;
    std::unique_ptr<VectorArray> lincomb(const Matrix& coeffs) const override;
    void axpy(std::span<const double> alpha, const VectorArray& x) override;
    using VectorArray::axpy;
    void scal(std::span<const double> alpha) override;
    using VectorArray::scal;
    Matrix inner(const VectorArray& other) const override;
    void remove(std::span<const std::size_t> indices) override;

    std::span<const double> vec(std::size_t i) const override { return vectors_.at(i); }
    std::span<double> vec(std::size_t i) override { return vectors_.at(i); }

   private:
    std::size_t dim_;
    std::vector<std::vector<double>> vectors_;
};

/// Column vector -> dense array of length 1.
DenseVectorArray dense_from_vector(const Vector& v);

}  // namespace morkit
