#pragma once

#include <cstddef>
#include <span>

// Inner loops of the dense vector array and CSR backends.
//
// Every kernel exists twice: `serial` is the straightforward reference and
// `omp` the OpenMP-parallel version used in production. Parallelism is over
// independent output entries only, and every output entry is accumulated in
// the same order as in the serial kernel, so both produce bit-identical
// results regardless of the thread count.
//
// Arrays of vectors are stored row-major: vector i of an array with
// dimension `dim` occupies [i*dim, (i+1)*dim).

namespace morkit::kernels
{

struct CsrView
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::span<const std::size_t> row_ptr;
    std::span<const std::size_t> col_idx;
    std::span<const double> values;
};

namespace serial
{
/// a[i] += alpha[i] * x[i] (or x[0] if x holds a single vector)
void axpy(std::span<double> a, std::span<const double> alpha, std::span<const double> x, std::size_t dim);

/// out[i] = sum_j coeffs[i*len + j] * a[j]
void lincomb(std::span<double> out, std::span<const double> a, std::span<const double> coeffs,
             std::size_t count, std::size_t len, std::size_t dim);

/// out[i*len_b + j] = <a[i], b[j]>
void gramian(std::span<double> out, std::span<const double> a, std::size_t len_a, std::span<const double> b,
             std::size_t len_b, std::size_t dim);

/// y[k] = M x[k] for every vector x[k] of an array of length `count`
void spmv(const CsrView& m, std::span<const double> x, std::span<double> y, std::size_t count);

void scal(std::span<double> a, std::span<const double> alpha, std::size_t dim);
}  // namespace serial

namespace omp
{
void axpy(std::span<double> a, std::span<const double> alpha, std::span<const double> x, std::size_t dim);
void lincomb(std::span<double> out, std::span<const double> a, std::span<const double> coeffs,
             std::size_t count, std::size_t len, std::size_t dim);
void gramian(std::span<double> out, std::span<const double> a, std::size_t len_a, std::span<const double> b,
             std::size_t len_b, std::size_t dim);
void spmv(const CsrView& m, std::span<const double> x, std::span<double> y, std::size_t count);
void scal(std::span<double> a, std::span<const double> alpha, std::size_t dim);

/// Number of threads OpenMP would use for a parallel region (1 without OpenMP).
int max_threads();
}  // namespace omp

}  // namespace morkit::kernels
