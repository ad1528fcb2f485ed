#include "morkit/kernels.hpp"

#include <algorithm>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace morkit::kernels::omp
{

namespace
{
// below this many flops a parallel region costs more than it saves
constexpr std::size_t parallel_threshold = 1u << 15;
constexpr std::size_t chunk = 1024;
}  // namespace

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void axpy(std::span<double> a, std::span<const double> alpha, std::span<const double> x, std::size_t dim)
{
    const auto len = static_cast<std::int64_t>(alpha.size());
    const bool broadcast = x.size() == dim;
    const auto n = static_cast<std::int64_t>(dim);
#pragma omp parallel for collapse(2) schedule(static) if (alpha.size() * dim > parallel_threshold)
    for (std::int64_t i = 0; i < len; ++i)
        for (std::int64_t k = 0; k < n; ++k) a[i * n + k] += alpha[i] * x[(broadcast ? 0 : i * n) + k];
}

void lincomb(std::span<double> out, std::span<const double> a, std::span<const double> coeffs,
             std::size_t count, std::size_t len, std::size_t dim)
{
    const auto blocks = static_cast<std::int64_t>((dim + chunk - 1) / chunk);
    const auto cnt = static_cast<std::int64_t>(count);
#pragma omp parallel for collapse(2) schedule(static) if (count * len * dim > parallel_threshold)
    for (std::int64_t i = 0; i < cnt; ++i)
        for (std::int64_t b = 0; b < blocks; ++b) {
            const std::size_t begin = static_cast<std::size_t>(b) * chunk;
            const std::size_t end = std::min(dim, begin + chunk);
            double* oi = out.data() + static_cast<std::size_t>(i) * dim;
            for (std::size_t k = begin; k < end; ++k) oi[k] = 0.0;
            for (std::size_t j = 0; j < len; ++j) {
                const double c = coeffs[static_cast<std::size_t>(i) * len + j];
                const double* aj = a.data() + j * dim;
                for (std::size_t k = begin; k < end; ++k) oi[k] += c * aj[k];
            }
        }
}

void gramian(std::span<double> out, std::span<const double> a, std::size_t len_a, std::span<const double> b,
             std::size_t len_b, std::size_t dim)
{
    const auto la = static_cast<std::int64_t>(len_a);
    const auto lb = static_cast<std::int64_t>(len_b);
#pragma omp parallel for collapse(2) schedule(static) if (len_a * len_b * dim > parallel_threshold)
    for (std::int64_t i = 0; i < la; ++i)
        for (std::int64_t j = 0; j < lb; ++j) {
            const double* ai = a.data() + static_cast<std::size_t>(i) * dim;
            const double* bj = b.data() + static_cast<std::size_t>(j) * dim;
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) s += ai[k] * bj[k];
            out[static_cast<std::size_t>(i) * len_b + static_cast<std::size_t>(j)] = s;
        }
}

void spmv(const CsrView& m, std::span<const double> x, std::span<double> y, std::size_t count)
{
    const auto cnt = static_cast<std::int64_t>(count);
    const auto rows = static_cast<std::int64_t>(m.rows);
#pragma omp parallel for collapse(2) schedule(static) if (count * m.values.size() > parallel_threshold)
    for (std::int64_t v = 0; v < cnt; ++v)
        for (std::int64_t r = 0; r < rows; ++r) {
            const double* xv = x.data() + static_cast<std::size_t>(v) * m.cols;
            double s = 0.0;
            for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) s += m.values[p] * xv[m.col_idx[p]];
            y[static_cast<std::size_t>(v) * m.rows + static_cast<std::size_t>(r)] = s;
        }
}

void scal(std::span<double> a, std::span<const double> alpha, std::size_t dim)
{
    const auto len = static_cast<std::int64_t>(alpha.size());
    const auto n = static_cast<std::int64_t>(dim);
#pragma omp parallel for collapse(2) schedule(static) if (alpha.size() * dim > parallel_threshold)
    for (std::int64_t i = 0; i < len; ++i)
        for (std::int64_t k = 0; k < n; ++k) a[i * n + k] *= alpha[i];
}

}  // namespace morkit::kernels::omp
