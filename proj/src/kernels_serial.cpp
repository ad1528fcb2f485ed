#include "morkit/kernels.hpp"

namespace morkit::kernels::serial
{

void axpy(std::span<double> a, std::span<const double> alpha, std::span<const double> x, std::size_t dim)
{
    const std::size_t len = alpha.size();
    const bool broadcast = x.size() == dim;
    for (std::size_t i = 0; i < len; ++i) {
        double* ai = a.data() + i * dim;
        const double* xi = x.data() + (broadcast ? 0 : i * dim);
        const double s = alpha[i];
        for (std::size_t k = 0; k < dim; ++k) ai[k] += s * xi[k];
    }
}

void lincomb(std::span<double> out, std::span<const double> a, std::span<const double> coeffs,
             std::size_t count, std::size_t len, std::size_t dim)
{
    for (std::size_t i = 0; i < count; ++i) {
        double* oi = out.data() + i * dim;
        for (std::size_t k = 0; k < dim; ++k) oi[k] = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            const double c = coeffs[i * len + j];
            const double* aj = a.data() + j * dim;
            for (std::size_t k = 0; k < dim; ++k) oi[k] += c * aj[k];
        }
    }
}

void gramian(std::span<double> out, std::span<const double> a, std::size_t len_a, std::span<const double> b,
             std::size_t len_b, std::size_t dim)
{
    for (std::size_t i = 0; i < len_a; ++i)
        for (std::size_t j = 0; j < len_b; ++j) {
            const double* ai = a.data() + i * dim;
            const double* bj = b.data() + j * dim;
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) s += ai[k] * bj[k];
            out[i * len_b + j] = s;
        }
}

void spmv(const CsrView& m, std::span<const double> x, std::span<double> y, std::size_t count)
{
    for (std::size_t v = 0; v < count; ++v) {
        const double* xv = x.data() + v * m.cols;
        double* yv = y.data() + v * m.rows;
        for (std::size_t r = 0; r < m.rows; ++r) {
            double s = 0.0;
            for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) s += m.values[p] * xv[m.col_idx[p]];
            yv[r] = s;
        }
    }
}

void scal(std::span<double> a, std::span<const double> alpha, std::size_t dim)
{
    for (std::size_t i = 0; i < alpha.size(); ++i)
        for (std::size_t k = 0; k < dim; ++k) a[i * dim + k] *= alpha[i];
}

}  // namespace morkit::kernels::serial
