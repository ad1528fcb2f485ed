#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "morkit/operators.hpp"
#include "morkit/vector_array.hpp"

namespace morkit
{

struct GramSchmidtResult
{
    std::unique_ptr<VectorArray> basis;
    /// positions (in the input array) of vectors dropped as linearly dependent
    std::vector<std::size_t> dropped;
};

/// Modified Gram-Schmidt w.r.t. `product` (Euclidean if null).
///
/// The first `offset` vectors are taken as already orthonormal. Each further
/// vector is projected twice; a further pass follows while a pass shrinks
/// the norm below 0.1 of its value before that pass. Vectors whose final
/// norm is below atol + rtol * (original norm) are dropped.
GramSchmidtResult gram_schmidt(const VectorArray& A, const Operator* product = nullptr, std::size_t offset = 0,
                               double atol = 1e-13, double rtol = 1e-13);

struct PodResult
{
    std::unique_ptr<VectorArray> modes;
    std::vector<double> singular_values;
};

/// POD by the method of snapshots: eigendecomposition of the Gramian of A,
/// sigma_k = sqrt(lambda_k), modes = A v_k / sigma_k, followed by a
/// Gram-Schmidt pass to restore orthonormality lost for small sigma_k.
/// Keeps at most `modes` modes (0 = no limit) with sigma_k > rtol * sigma_1.
PodResult pod(const VectorArray& A, std::size_t modes = 0, const Operator* product = nullptr, double rtol = 1e-7);

/// Riesz representatives product^{-1} F[i].
std::unique_ptr<VectorArray> riesz(const Operator& product, const VectorArray& F, const SolverOptions& options = {});

/// Dual norms ||F[i]||_{-1} w.r.t. `product`.
Vector dual_norms(const Operator& product, const VectorArray& F, const SolverOptions& options = {});

struct NewtonResult
{
    std::unique_ptr<VectorArray> solution;
    std::size_t iterations = 0;
    std::vector<double> residual_norms;
};

/// Solves op(u) = rhs starting from `initial` until the residual falls
/// below rel_tol times the initial residual. Throws SolverError when
/// max_iter is exceeded or a Jacobian solve fails.
NewtonResult newton(const Operator& op, const VectorArray& rhs, const Parameter& mu, const VectorArray& initial,
                    double rel_tol = 1e-12, std::size_t max_iter = 50);

}  // namespace morkit
