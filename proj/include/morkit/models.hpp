#pragma once

#include <map>
#include <memory>
#include <string>

#include "morkit/operators.hpp"
#include "morkit/parameters.hpp"
#include "morkit/vector_array.hpp"

namespace morkit
{

/// B_mu(u, .) = F for a parametric (typically affinely decomposed) operator.
class StationaryModel
{
   public:
    StationaryModel(OperatorPtr op, OperatorPtr rhs, std::map<std::string, OperatorPtr> products,
                    ParameterSpace parameter_space, SolverOptions solver_options = {});
    virtual ~StationaryModel() = default;

    const OperatorPtr& op() const { return operator_; }
    const OperatorPtr& rhs() const { return rhs_; }
    const std::map<std::string, OperatorPtr>& products() const { return products_; }
    OperatorPtr product(const std::string& name) const;
    const ParameterSpace& parameter_space() const { return parameter_space_; }
    const SolverOptions& solver_options() const { return solver_options_; }
    std::size_t dim() const { return operator_->source_dim(); }

    /// op.apply_inverse(rhs vector); returns an array of length 1.
    virtual std::unique_ptr<VectorArray> solve(const Parameter& mu) const;

   private:
    OperatorPtr operator_;
    OperatorPtr rhs_;
    std::map<std::string, OperatorPtr> products_;
    ParameterSpace parameter_space_;
    SolverOptions solver_options_;
};

/// d/dt u + A_mu(u) = f, u(0) = u0, integrated with explicit Euler.
class InstationaryModel
{
   public:
    InstationaryModel(OperatorPtr op, OperatorPtr rhs, std::shared_ptr<const VectorArray> initial_data, double T,
                      std::size_t nt, std::map<std::string, OperatorPtr> products, ParameterSpace parameter_space);
    virtual ~InstationaryModel() = default;

    const OperatorPtr& op() const { return operator_; }
    /// may be null (zero right-hand side)
    const OperatorPtr& rhs() const { return rhs_; }
    const VectorArray& initial_data() const { return *initial_data_; }
    const std::shared_ptr<const VectorArray>& initial_data_ptr() const { return initial_data_; }
    double T() const { return T_; }
    std::size_t nt() const { return nt_; }
    const std::map<std::string, OperatorPtr>& products() const { return products_; }
    OperatorPtr product(const std::string& name) const;
    const ParameterSpace& parameter_space() const { return parameter_space_; }
    std::size_t dim() const { return operator_->source_dim(); }

    /// Trajectory with nt + 1 vectors.
    virtual std::unique_ptr<VectorArray> solve(const Parameter& mu) const;

   private:
    OperatorPtr operator_;
    OperatorPtr rhs_;
    std::shared_ptr<const VectorArray> initial_data_;
    double T_;
    std::size_t nt_;
    std::map<std::string, OperatorPtr> products_;
    ParameterSpace parameter_space_;
};

/// u_{k+1} = u_k - dt (A(u_k) - f), dt = T / nt. `rhs` may be null.
/// Throws SolverError naming the step if a non-finite value appears.
std::unique_ptr<VectorArray> explicit_euler(const Operator& op, const VectorArray* rhs, const VectorArray& u0,
                                            double T, std::size_t nt, const Parameter& mu = {});

}  // namespace morkit
