#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "morkit/models.hpp"
#include "morkit/operators.hpp"
#include "morkit/parameters.hpp"
#include "morkit/vector_array.hpp"

namespace morkit
{

/// Offline data of the residual dual-norm estimator.
///
/// The residual of a reduced solution u is
///   R(u) = sum_f phi_f(mu) F_f - sum_q theta_q(mu) sum_n u_n B_q b_n.
/// Its Riesz representative lies in the span of the representatives of F_f
/// and B_q b_n. In the `orthonormalized` variant those are orthonormalized
/// offline and only their coefficients are kept, so the online dual norm is a
/// Euclidean norm of a short coefficient vector. The `gramian` variant keeps
/// the Gramian of the raw representatives instead (cheaper offline, loses
/// accuracy through cancellation when the residual is small).
struct EstimatorData
{
    enum class Variant
    {
        orthonormalized,
        gramian
    };

    Variant variant = Variant::orthonormalized;
    std::vector<ParameterFunctional> rhs_coefficients;
    std::vector<ParameterFunctional> operator_coefficients;
    /// orthonormalized: K x F
    Matrix rhs_coeffs;
    /// orthonormalized: Q blocks of K x N
    std::vector<Matrix> operator_coeffs;
    /// gramian: (F + Q N) square
    Matrix gramian;
    ParameterFunctional coercivity = ParameterFunctional::constant(1.0);
    std::size_t basis_size = 0;

    double residual_norm(const Vector& u, const Parameter& mu) const;
};

class ReducedStationaryModel
{
   public:
    ReducedStationaryModel(std::vector<ParameterFunctional> operator_coefficients, std::vector<Matrix> operator_matrices,
                           std::vector<ParameterFunctional> rhs_coefficients, std::vector<Vector> rhs_vectors,
                           EstimatorData estimator, ParameterSpace parameter_space);

    std::size_t basis_size() const { return n_; }
    const std::vector<ParameterFunctional>& operator_coefficients() const { return operator_coefficients_; }
    const std::vector<Matrix>& operator_matrices() const { return operator_matrices_; }
    const std::vector<ParameterFunctional>& rhs_coefficients() const { return rhs_coefficients_; }
    const std::vector<Vector>& rhs_vectors() const { return rhs_vectors_; }
    const EstimatorData& estimator() const { return estimator_; }
    const ParameterSpace& parameter_space() const { return parameter_space_; }

    Matrix assemble_operator(const Parameter& mu) const;
    Vector assemble_rhs(const Parameter& mu) const;

    /// Dense LU solve of the N x N system. Throws SolverError if singular.
    Vector solve(const Parameter& mu) const;

    /// ||R_mu(u)||_{-1} / alpha_mu. Throws InvalidArgument if alpha_mu <= 0.
    double estimate(const Vector& u, const Parameter& mu) const;

    /// The same reduced system expressed through the generic interfaces.
    std::shared_ptr<StationaryModel> as_model() const;

   private:
    std::size_t n_;
    std::vector<ParameterFunctional> operator_coefficients_;
    std::vector<Matrix> operator_matrices_;
    std::vector<ParameterFunctional> rhs_coefficients_;
    std::vector<Vector> rhs_vectors_;
    EstimatorData estimator_;
    ParameterSpace parameter_space_;
};

class Reconstructor
{
   public:
    explicit Reconstructor(std::shared_ptr<const VectorArray> basis) : basis_(std::move(basis)) {}

    const VectorArray& basis() const { return *basis_; }
    std::shared_ptr<const VectorArray> basis_ptr() const { return basis_; }

    /// sum_n u[n] b_n (length-1 array)
    std::unique_ptr<VectorArray> reconstruct(const Vector& u) const;

    /// Row k of `coefficients` -> k-th vector of the result.
    std::unique_ptr<VectorArray> reconstruct(const VectorArray& coefficients) const;

   private:
    std::shared_ptr<const VectorArray> basis_;
};

/// W^T op V for every affine leaf, preserving lincomb structure.
/// Empirically interpolated operators are projected online-efficiently.
/// Throws NotSupported for other nonlinear leaves.
OperatorPtr project_operator(const OperatorPtr& op, const VectorArray& W, const VectorArray& V);

struct StationaryReduction
{
    std::shared_ptr<const ReducedStationaryModel> model;
    Reconstructor reconstructor;
};

/// Galerkin projection onto span(basis) plus estimator assembly.
/// The basis must be orthonormal w.r.t. error_product (checked, tol 1e-8).
StationaryReduction reduce_stationary_coercive(const StationaryModel& model, std::shared_ptr<const VectorArray> basis,
                                               const Operator& error_product,
                                               const ParameterFunctional& coercivity_estimator,
                                               EstimatorData::Variant variant = EstimatorData::Variant::orthonormalized);

struct InstationaryReduction
{
    std::shared_ptr<const InstationaryModel> model;
    Reconstructor reconstructor;
};

/// Galerkin projection of an explicit-Euler model. With a product P the
/// basis must be P-orthonormal and the test space is P * basis.
InstationaryReduction reduce_instationary(const InstationaryModel& model, std::shared_ptr<const VectorArray> basis,
                                          const Operator* product = nullptr);

/// max |<b_i, P b_j> - delta_ij|
double orthonormality_defect(const VectorArray& basis, const Operator* product = nullptr);

}  // namespace morkit
