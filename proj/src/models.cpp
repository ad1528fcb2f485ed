#include "morkit/models.hpp"

#include <cmath>

#include "morkit/errors.hpp"

namespace morkit
{

StationaryModel::StationaryModel(OperatorPtr op, OperatorPtr rhs, std::map<std::string, OperatorPtr> products,
                                 ParameterSpace parameter_space, SolverOptions solver_options)
    : operator_(std::move(op)),
      rhs_(std::move(rhs)),
      products_(std::move(products)),
      parameter_space_(std::move(parameter_space)),
      solver_options_(solver_options)
{
    if (!operator_ || !rhs_) throw InvalidArgument("stationary model needs operator and rhs");
    if (rhs_->range_dim() != operator_->range_dim()) throw DimensionMismatch("rhs dimension != operator range");
    for (const auto& [name, p] : products_)
        if (p->source_dim() != operator_->source_dim())
            throw DimensionMismatch("product '" + name + "' has wrong dimension");
}

OperatorPtr StationaryModel::product(const std::string& name) const
{
    auto it = products_.find(name);
    if (it == products_.end()) throw InvalidArgument("model has no product '" + name + "'");
    return it->second;
}

std::unique_ptr<VectorArray> StationaryModel::solve(const Parameter& mu) const
{
    auto f = rhs_->as_range_array(mu);
    return operator_->apply_inverse(*f, mu, solver_options_);
}

InstationaryModel::InstationaryModel(OperatorPtr op, OperatorPtr rhs, std::shared_ptr<const VectorArray> initial_data,
                                     double T, std::size_t nt, std::map<std::string, OperatorPtr> products,
                                     ParameterSpace parameter_space)
    : operator_(std::move(op)),
      rhs_(std::move(rhs)),
      initial_data_(std::move(initial_data)),
      T_(T),
      nt_(nt),
      products_(std::move(products)),
      parameter_space_(std::move(parameter_space))
{
    if (nt_ < 1) throw InvalidArgument("instationary model needs nt >= 1");
    if (!initial_data_ || initial_data_->len() != 1) throw InvalidArgument("initial data must hold one vector");
    if (initial_data_->dim() != operator_->source_dim()) throw DimensionMismatch("initial data dimension mismatch");
}

OperatorPtr InstationaryModel::product(const std::string& name) const
{
    auto it = products_.find(name);
    if (it == products_.end()) throw InvalidArgument("model has no product '" + name + "'");
    return it->second;
}

std::unique_ptr<VectorArray> InstationaryModel::solve(const Parameter& mu) const
{
    std::unique_ptr<VectorArray> f;
    if (rhs_) f = rhs_->as_range_array(mu);
    return explicit_euler(*operator_, f.get(), *initial_data_, T_, nt_, mu);
}

std::unique_ptr<VectorArray> explicit_euler(const Operator& op, const VectorArray* rhs, const VectorArray& u0,
                                            double T, std::size_t nt, const Parameter& mu)
{
    if (nt < 1) throw InvalidArgument("explicit_euler: nt must be >= 1");
    if (u0.len() != 1) throw InvalidArgument("explicit_euler: initial data must hold one vector");
    const double dt = T / static_cast<double>(nt);
    auto trajectory = u0.copy();
    auto u = u0.copy();
    for (std::size_t k = 0; k < nt; ++k) {
        auto update = op.apply(*u, mu);
        if (rhs) update->axpy(-1.0, *rhs);
        u->axpy(-dt, *update);
        const double n = u->norms()[0];
        if (!std::isfinite(n))
            throw SolverError("explicit_euler: non-finite state at step " + std::to_string(k + 1));
        trajectory->append(*u);
    }
    return trajectory;
}

}  // namespace morkit
