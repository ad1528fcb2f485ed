#include "morkit/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "morkit/errors.hpp"

namespace morkit
{

namespace
{
double product_norm(const VectorArray& v, const Operator* product) { return norms(v, product)[0]; }

// one projection pass of v against basis; returns the norm after the pass
double project_out(VectorArray& v, const VectorArray& basis, const Operator* product)
{
    if (basis.len() > 0) {
        const Matrix coeffs = inner(basis, v, product);  // len(basis) x 1
        v.axpy(-1.0, *basis.lincomb(coeffs.transpose()));
    }
    return product_norm(v, product);
}
}  // namespace

GramSchmidtResult gram_schmidt(const VectorArray& A, const Operator* product, std::size_t offset, double atol,
                               double rtol)
{
    if (offset > A.len()) throw InvalidArgument("gram_schmidt: offset exceeds array length");
    GramSchmidtResult result;
    result.basis = A.select_range(0, offset);

    for (std::size_t i = offset; i < A.len(); ++i) {
        const std::size_t idx[] = {i};
        auto v = A.select(idx);
        const double original = product_norm(*v, product);

        double before = original;
        double after = project_out(*v, *result.basis, product);
        // unconditional second pass, then more while cancellation is severe
        for (int pass = 1; pass < 6; ++pass) {
            if (pass > 1 && !(after < 0.1 * before)) break;
            before = after;
            if (before == 0.0) break;
            after = project_out(*v, *result.basis, product);
        }

        if (!(after >= atol + rtol * original)) {
            result.dropped.push_back(i);
            continue;
        }
        v->scal(1.0 / after);
        result.basis->append(*v);
    }
    return result;
}

PodResult pod(const VectorArray& A, std::size_t modes, const Operator* product, double rtol)
{
    if (A.len() == 0) throw InvalidArgument("pod: empty input");
    const Matrix gramian = inner(A, A, product);
    const Matrix symmetric = 0.5 * (gramian + gramian.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric);
    if (eig.info() != Eigen::Success) throw SolverError("pod: eigendecomposition failed");

    // Eigen returns ascending eigenvalues
    const Eigen::Index n = symmetric.rows();
    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) lambda[static_cast<std::size_t>(k)] = eig.eigenvalues()[n - 1 - k];
    const double lambda_max = std::max(lambda.front(), 0.0);
    for (auto& l : lambda)
        if (l < 1e-14 * lambda_max) l = 0.0;

    PodResult result;
    if (lambda_max == 0.0) {
        result.modes = A.zeros(0);
        return result;
    }
    const double sigma_max = std::sqrt(lambda_max);
    std::size_t keep = 0;
    while (keep < lambda.size() && std::sqrt(lambda[keep]) > rtol * sigma_max && (modes == 0 || keep < modes)) ++keep;

    Matrix coeffs(static_cast<Eigen::Index>(keep), n);
    for (std::size_t k = 0; k < keep; ++k) {
        const double sigma = std::sqrt(lambda[k]);
        coeffs.row(static_cast<Eigen::Index>(k)) = eig.eigenvectors().col(n - 1 - static_cast<Eigen::Index>(k)).transpose() / sigma;
        result.singular_values.push_back(sigma);
    }
    auto raw = A.lincomb(coeffs);
    auto gs = gram_schmidt(*raw, product, 0, 0.0, 1e-10);
    if (!gs.dropped.empty()) {
        // keep singular values aligned with the surviving modes
        std::vector<double> kept;
        for (std::size_t k = 0; k < result.singular_values.size(); ++k)
            if (!std::binary_search(gs.dropped.begin(), gs.dropped.end(), k)) kept.push_back(result.singular_values[k]);
        result.singular_values = std::move(kept);
    }
    result.modes = std::move(gs.basis);
    return result;
}

std::unique_ptr<VectorArray> riesz(const Operator& product, const VectorArray& F, const SolverOptions& options)
{
    return product.apply_inverse(F, {}, options);
}

Vector dual_norms(const Operator& product, const VectorArray& F, const SolverOptions& options)
{
    auto r = riesz(product, F, options);
    Vector n = r->pairwise_inner(F);
    for (Eigen::Index i = 0; i < n.size(); ++i) n[i] = std::sqrt(std::max(n[i], 0.0));
    return n;
}

NewtonResult newton(const Operator& op, const VectorArray& rhs, const Parameter& mu, const VectorArray& initial,
                    double rel_tol, std::size_t max_iter)
{
    if (initial.len() != 1 || rhs.len() != 1) throw InvalidArgument("newton: expects single vectors");
    NewtonResult result;
    result.solution = initial.copy();

    auto residual = rhs.copy();
    residual->axpy(-1.0, *op.apply(*result.solution, mu));
    const double r0 = residual->norms()[0];
    result.residual_norms.push_back(r0);
    if (r0 == 0.0) return result;

    while (result.residual_norms.back() > rel_tol * r0) {
        if (result.iterations == max_iter)
            throw SolverError("newton: no convergence after " + std::to_string(max_iter) + " iterations",
                              result.residual_norms.back());
        auto jac = op.jacobian(*result.solution, mu);
        auto update = jac->apply_inverse(*residual, mu);
        result.solution->axpy(1.0, *update);
        ++result.iterations;

        residual = rhs.copy();
        residual->axpy(-1.0, *op.apply(*result.solution, mu));
        const double r = residual->norms()[0];
        if (!std::isfinite(r)) throw SolverError("newton: residual is not finite", r);
        result.residual_norms.push_back(r);
    }
    return result;
}

}  // namespace morkit
