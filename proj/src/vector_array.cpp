#include "morkit/vector_array.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "morkit/errors.hpp"
#include "morkit/kernels.hpp"

namespace morkit
{

namespace
{
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

const LocalVectorArray& as_local(const VectorArray& a, const char* what)
{
    const auto* local = dynamic_cast<const LocalVectorArray*>(&a);
    if (!local)
        throw NotSupported(std::string(what) + ": cannot mix in-process and '" + a.backend() + "' arrays");
    return *local;
}

std::vector<std::size_t> kept_indices(std::size_t len, std::span<const std::size_t> removed)
{
    std::set<std::size_t> drop(removed.begin(), removed.end());
    for (auto i : drop)
        if (i >= len) throw IndexOutOfRange("remove: index out of range");
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < len; ++i)
        if (!drop.count(i)) keep.push_back(i);
    return keep;
}
}  // namespace

void VectorArray::axpy(double alpha, const VectorArray& x)
{
    std::vector<double> a(len(), alpha);
    axpy(a, x);
}

void VectorArray::scal(double alpha)
{
    std::vector<double> a(len(), alpha);
    scal(a);
}

Vector VectorArray::pairwise_inner(const VectorArray& other) const
{
    if (other.len() != len()) throw DimensionMismatch("pairwise_inner: length mismatch");
    return inner(other).diagonal();
}

std::unique_ptr<VectorArray> VectorArray::select(std::span<const std::size_t> indices) const
{
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(len()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= len()) throw IndexOutOfRange("select: index out of range");
        c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(indices[k])) = 1.0;
    }
    return lincomb(c);
}

std::unique_ptr<VectorArray> VectorArray::select_range(std::size_t begin, std::size_t end) const
{
    if (begin > end || end > len()) throw IndexOutOfRange("select_range: invalid range");
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    return select(idx);
}

Vector VectorArray::norms() const
{
    Vector n = pairwise_inner(*this);
    for (Eigen::Index i = 0; i < n.size(); ++i) n[i] = std::sqrt(std::max(n[i], 0.0));
    return n;
}

void VectorArray::check_same_dim(const VectorArray& other, const char* what) const
{
    if (other.dim() != dim())
        throw DimensionMismatch(std::string(what) + ": dimension mismatch (" + std::to_string(dim()) + " vs " +
                                std::to_string(other.dim()) + ")");
}

Matrix LocalVectorArray::dofs(std::span<const std::size_t> indices) const
{
    for (auto k : indices)
        if (k >= dim()) throw IndexOutOfRange("dofs: index " + std::to_string(k) + " out of range");
    Matrix m(static_cast<Eigen::Index>(len()), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < len(); ++i) {
        auto v = vec(i);
        for (std::size_t k = 0; k < indices.size(); ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v[indices[k]];
    }
    return m;
}

Matrix LocalVectorArray::to_matrix() const
{
    Matrix m(static_cast<Eigen::Index>(len()), static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < len(); ++i) {
        auto v = vec(i);
        for (std::size_t k = 0; k < dim(); ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v[k];
    }
    return m;
}

// ---------------------------------------------------------------------------
// DenseVectorArray

DenseVectorArray::DenseVectorArray(std::size_t dim, std::size_t len) : dim_(dim), len_(len), data_(dim * len, 0.0) {}

DenseVectorArray::DenseVectorArray(std::size_t dim, std::vector<double> data)
    : dim_(dim), len_(dim == 0 ? 0 : data.size() / dim), data_(std::move(data))
{
    if (dim != 0 && data_.size() % dim != 0) throw DimensionMismatch("buffer size is not a multiple of dim");
}

DenseVectorArray DenseVectorArray::from_rows(const Matrix& m)
{
    const RowMajorMatrix r = m;
    return DenseVectorArray(static_cast<std::size_t>(m.cols()), std::vector<double>(r.data(), r.data() + r.size()));
}

DenseVectorArray DenseVectorArray::from_vectors(const std::vector<std::vector<double>>& vectors, std::size_t dim)
{
    DenseVectorArray a(dim, vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != dim) throw DimensionMismatch("from_vectors: inconsistent dimension");
        std::copy(vectors[i].begin(), vectors[i].end(), a.data_.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    return a;
}

std::unique_ptr<VectorArray> DenseVectorArray::copy() const { return std::make_unique<DenseVectorArray>(*this); }

std::unique_ptr<VectorArray> DenseVectorArray::zeros(std::size_t count) const
{
    return std::make_unique<DenseVectorArray>(dim_, count);
}

std::unique_ptr<LocalVectorArray> DenseVectorArray::make(std::size_t dim, std::size_t count) const
{
    return std::make_unique<DenseVectorArray>(dim, count);
}

void DenseVectorArray::append(const VectorArray& other)
{
    check_same_dim(other, "append");
    const auto& local = as_local(other, "append");
    data_.reserve(data_.size() + other.len() * dim_);
    for (std::size_t i = 0; i < other.len(); ++i) {
        auto v = local.vec(i);
        data_.insert(data_.end(), v.begin(), v.end());
    }
    len_ += other.len();
}

std::unique_ptr<VectorArray> DenseVectorArray::lincomb(const Matrix& coeffs) const
{
    if (static_cast<std::size_t>(coeffs.cols()) != len_)
        throw DimensionMismatch("lincomb: coefficient columns != len");
    const auto count = static_cast<std::size_t>(coeffs.rows());
    const RowMajorMatrix c = coeffs;
    auto out = std::make_unique<DenseVectorArray>(dim_, count);
    kernels::omp::lincomb(out->data_, data_, std::span<const double>(c.data(), static_cast<std::size_t>(c.size())),
                          count, len_, dim_);
    return out;
}

void DenseVectorArray::axpy(std::span<const double> alpha, const VectorArray& x)
{
    check_same_dim(x, "axpy");
    if (x.len() != len_ && x.len() != 1) throw DimensionMismatch("axpy: length mismatch");
    std::vector<double> a(alpha.begin(), alpha.end());
    if (a.size() == 1 && len_ != 1) a.assign(len_, alpha[0]);
    if (a.size() != len_) throw DimensionMismatch("axpy: alpha length mismatch");
    if (len_ == 0) return;
    if (const auto* dx = dynamic_cast<const DenseVectorArray*>(&x)) {
        kernels::omp::axpy(data_, a, dx->data_, dim_);
        return;
    }
    const auto& lx = as_local(x, "axpy");
    for (std::size_t i = 0; i < len_; ++i) {
        auto xi = lx.vec(x.len() == 1 ? 0 : i);
        auto ai = vec(i);
        for (std::size_t k = 0; k < dim_; ++k) ai[k] += a[i] * xi[k];
    }
}

void DenseVectorArray::scal(std::span<const double> alpha)
{
    if (alpha.size() != len_) throw DimensionMismatch("scal: alpha length mismatch");
    kernels::omp::scal(data_, alpha, dim_);
}

Matrix DenseVectorArray::inner(const VectorArray& other) const
{
    check_same_dim(other, "inner");
    const auto& lo = as_local(other, "inner");
    RowMajorMatrix out(static_cast<Eigen::Index>(len_), static_cast<Eigen::Index>(other.len()));
    if (const auto* d = dynamic_cast<const DenseVectorArray*>(&other)) {
        kernels::omp::gramian(std::span<double>(out.data(), static_cast<std::size_t>(out.size())), data_, len_,
                              d->data_, d->len_, dim_);
        return out;
    }
    for (std::size_t i = 0; i < len_; ++i)
        for (std::size_t j = 0; j < other.len(); ++j) {
            auto a = vec(i);
            auto b = lo.vec(j);
            double s = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) s += a[k] * b[k];
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
        }
    return out;
}

Vector DenseVectorArray::pairwise_inner(const VectorArray& other) const
{
    check_same_dim(other, "pairwise_inner");
    if (other.len() != len_) throw DimensionMismatch("pairwise_inner: length mismatch");
    const auto& lo = as_local(other, "pairwise_inner");
    Vector out(static_cast<Eigen::Index>(len_));
    for (std::size_t i = 0; i < len_; ++i) {
        auto a = vec(i);
        auto b = lo.vec(i);
        double s = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) s += a[k] * b[k];
        out[static_cast<Eigen::Index>(i)] = s;
    }
    return out;
}

std::unique_ptr<VectorArray> DenseVectorArray::select(std::span<const std::size_t> indices) const
{
    auto out = std::make_unique<DenseVectorArray>(dim_, indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= len_) throw IndexOutOfRange("select: index out of range");
        auto src = vec(indices[k]);
        std::copy(src.begin(), src.end(), out->vec(k).begin());
    }
    return out;
}

void DenseVectorArray::remove(std::span<const std::size_t> indices)
{
    const auto keep = kept_indices(len_, indices);
    std::vector<double> data;
    data.reserve(keep.size() * dim_);
    for (auto i : keep) {
        auto v = vec(i);
        data.insert(data.end(), v.begin(), v.end());
    }
    data_ = std::move(data);
    len_ = keep.size();
}

std::span<const double> DenseVectorArray::vec(std::size_t i) const
{
    if (i >= len_) throw IndexOutOfRange("vector index out of range");
    return std::span<const double>(data_).subspan(i * dim_, dim_);
}

std::span<double> DenseVectorArray::vec(std::size_t i)
{
    if (i >= len_) throw IndexOutOfRange("vector index out of range");
    return std::span<double>(data_).subspan(i * dim_, dim_);
}

DenseVectorArray dense_from_vector(const Vector& v)
{
    return DenseVectorArray(static_cast<std::size_t>(v.size()), std::vector<double>(v.data(), v.data() + v.size()));
}

// ---------------------------------------------------------------------------
// ListVectorArray

ListVectorArray::ListVectorArray(std::size_t dim, std::size_t len)
    : dim_(dim), vectors_(len, std::vector<double>(dim, 0.0))
{
}

ListVectorArray ListVectorArray::from_dense(const DenseVectorArray& a)
{
    ListVectorArray l(a.dim(), 0);
    for (std::size_t i = 0; i < a.len(); ++i) {
        auto v = a.vec(i);
        l.vectors_.emplace_back(v.begin(), v.end());
    }
    return l;
}

std::unique_ptr<VectorArray> ListVectorArray::copy() const { return std::make_unique<ListVectorArray>(*this); }

std::unique_ptr<VectorArray> ListVectorArray::zeros(std::size_t count) const
{
    return std::make_unique<ListVectorArray>(dim_, count);
}

std::unique_ptr<LocalVectorArray> ListVectorArray::make(std::size_t dim, std::size_t count) const
{
    return std::make_unique<ListVectorArray>(dim, count);
}

void ListVectorArray::append(const VectorArray& other)
{
    check_same_dim(other, "append");
    const auto& lo = as_local(other, "append");
    for (std::size_t i = 0; i < other.len(); ++i) {
        auto v = lo.vec(i);
        vectors_.emplace_back(v.begin(), v.end());
    }
}

std::unique_ptr<VectorArray> ListVectorArray::lincomb(const Matrix& coeffs) const
{
    if (static_cast<std::size_t>(coeffs.cols()) != len()) throw DimensionMismatch("lincomb: coefficient columns != len");
    auto out = std::make_unique<ListVectorArray>(dim_, static_cast<std::size_t>(coeffs.rows()));
    for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
        auto& o = out->vectors_[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < len(); ++j) {
            const double c = coeffs(i, static_cast<Eigen::Index>(j));
            const auto& a = vectors_[j];
            for (std::size_t k = 0; k < dim_; ++k) o[k] += c * a[k];
        }
    }
    return out;
}

void ListVectorArray::axpy(std::span<const double> alpha, const VectorArray& x)
{
    check_same_dim(x, "axpy");
    if (x.len() != len() && x.len() != 1) throw DimensionMismatch("axpy: length mismatch");
    if (alpha.size() != len() && alpha.size() != 1) throw DimensionMismatch("axpy: alpha length mismatch");
    const auto& lx = as_local(x, "axpy");
    for (std::size_t i = 0; i < len(); ++i) {
        auto xi = lx.vec(x.len() == 1 ? 0 : i);
        const double a = alpha.size() == 1 ? alpha[0] : alpha[i];
        auto& v = vectors_[i];
        for (std::size_t k = 0; k < dim_; ++k) v[k] += a * xi[k];
    }
}

void ListVectorArray::scal(std::span<const double> alpha)
{
    if (alpha.size() != len()) throw DimensionMismatch("scal: alpha length mismatch");
    for (std::size_t i = 0; i < len(); ++i)
        for (auto& x : vectors_[i]) x *= alpha[i];
}

Matrix ListVectorArray::inner(const VectorArray& other) const
{
    check_same_dim(other, "inner");
    const auto& lo = as_local(other, "inner");
    Matrix out(static_cast<Eigen::Index>(len()), static_cast<Eigen::Index>(other.len()));
    for (std::size_t i = 0; i < len(); ++i)
        for (std::size_t j = 0; j < other.len(); ++j) {
            auto b = lo.vec(j);
            double s = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) s += vectors_[i][k] * b[k];
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
        }
    return out;
}

void ListVectorArray::remove(std::span<const std::size_t> indices)
{
    const auto keep = kept_indices(len(), indices);
    std::vector<std::vector<double>> v;
    v.reserve(keep.size());
    for (auto i : keep) v.push_back(std::move(vectors_[i]));
    vectors_ = std::move(v);
}

}  // namespace morkit
