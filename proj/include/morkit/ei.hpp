#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "morkit/operators.hpp"
#include "morkit/vector_array.hpp"

namespace morkit
{

/// Collateral basis c_1..c_M (range vectors), interpolation DOFs x_1..x_M and
/// the interpolation matrix I(i, j) = c_j[x_i].
///
/// The DOFs play the role of point-evaluation functionals: interpolating
/// means matching the coefficient of each selected DOF exactly.
struct EIData
{
    std::shared_ptr<const VectorArray> collateral_basis;
    std::vector<std::size_t> interpolation_dofs;
    Matrix interpolation_matrix;
    /// ei_greedy: max sup-norm interpolation error before each extension and
    /// after the last one (length M + 1). Empty for DEIM.
    std::vector<double> max_errors;

    std::size_t size() const { return interpolation_dofs.size(); }
    double condition_number() const;

    /// First m interpolation points and collateral vectors. Valid for
    /// ei_greedy output (nested by construction).
    EIData truncated(std::size_t m) const;
};

/// EI-Greedy: repeatedly picks the evaluation with the largest sup-norm
/// interpolation error, adds its DOF of largest magnitude (lowest index on
/// ties) and the error vector scaled to 1 there. Stops after max_dofs points
/// or when the max error is <= rtol * (initial max error) (or <= atol).
/// The resulting interpolation matrix is unit lower triangular.
EIData ei_greedy(const VectorArray& evaluations, std::size_t max_dofs, double rtol = 0.0, double atol = 0.0);

/// DEIM: collateral basis = first M POD modes of the evaluations, points
/// chosen greedily from the mode residuals. Throws InvalidArgument when M
/// exceeds the numerical rank (relative singular value cutoff `rank_rtol`).
EIData deim(const VectorArray& evaluations, std::size_t modes, double rank_rtol = 1e-10);

/// Restriction of `op` to the range DOFs `dofs`. Throws NotSupported when the
/// operator has no locality information.
RestrictedOperator restricted(const Operator& op, std::span<const std::size_t> dofs);

/// I_M(op)(v) = C * I^{-1} * op(v)[dofs]
class EmpiricalInterpolatedOperator final : public Operator
{
   public:
    EmpiricalInterpolatedOperator(OperatorPtr op, EIData data);

    bool linear() const override { return operator_->linear(); }
    bool parametric() const override { return operator_->parametric(); }
    std::string kind() const override { return "empirical_interpolation"; }

    const OperatorPtr& interpolated_operator() const { return operator_; }
    const EIData& data() const { return data_; }
    /// nullopt if the operator could not be restricted (full evaluation used)
    const std::optional<RestrictedOperator>& restricted_operator() const { return restricted_; }

    /// op(U)[dofs], len(U) x M
    Matrix evaluate_at_dofs(const VectorArray& U, const Parameter& mu) const;

    /// I^{-1} applied to rows of `values` (len x M)
    Matrix interpolation_coefficients(const Matrix& values) const;

    std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu = {}) const override;

   private:
    OperatorPtr operator_;
    EIData data_;
    std::optional<RestrictedOperator> restricted_;
    Eigen::PartialPivLU<Matrix> lu_;
};

OperatorPtr interpolate_operator(OperatorPtr op, EIData data);

/// Reduced EI operator: u (dim N_V) -> W^T C I^{-1} op_restricted(V[src] u).
/// Online cost depends only on N_V, N_W, M and the number of source DOFs.
class ProjectedEIOperator final : public Operator
{
   public:
    ProjectedEIOperator(Matrix projected_collateral, RestrictedOperator restricted, Matrix source_basis_values,
                        bool linear, bool parametric);

    bool linear() const override { return linear_; }
    bool parametric() const override { return parametric_; }
    std::string kind() const override { return "projected_empirical_interpolation"; }

    std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu = {}) const override;

    /// W^T C I^{-1}, N_W x M
    const Matrix& projected_collateral() const { return projected_collateral_; }
    /// rows of V at the source DOFs, |src| x N_V
    const Matrix& source_basis_values() const { return source_basis_values_; }
    const RestrictedOperator& restricted_operator() const { return restricted_; }

    /// Multiply-adds of the dense parts per applied vector.
    std::uint64_t flops_per_vector() const;
    /// Accumulated multiply-add counter over all apply calls.
    std::uint64_t flop_count() const { return flops_.load(); }

   private:
    Matrix projected_collateral_;
    RestrictedOperator restricted_;
    Matrix source_basis_values_;
    bool linear_;
    bool parametric_;
    mutable std::atomic<std::uint64_t> flops_{0};
};

/// Precomputes W^T C I^{-1}, the restricted operator and V at its source
/// DOFs. Throws NotSupported if the interpolated operator cannot be
/// restricted.
OperatorPtr project_ei_operator(const EmpiricalInterpolatedOperator& ei_op, const VectorArray& W, const VectorArray& V);

}  // namespace morkit
