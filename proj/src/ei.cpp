#include "morkit/ei.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "morkit/algorithms.hpp"
#include "morkit/errors.hpp"

namespace morkit
{

namespace
{
Matrix all_values(const VectorArray& a)
{
    std::vector<std::size_t> all(a.dim());
    std::iota(all.begin(), all.end(), 0);
    return a.dofs(all);
}

// index of max |x|, lowest index on ties
std::size_t argmax_abs(const Eigen::Ref<const Vector>& x)
{
    std::size_t best = 0;
    double best_value = -1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) > best_value) {
            best_value = std::abs(x[i]);
            best = static_cast<std::size_t>(i);
        }
    return best;
}

void check_interpolation_matrix(const Matrix& m)
{
    if (m.size() == 0) return;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (!(s[s.size() - 1] > 1e-13 * s[0])) throw SolverError("interpolation matrix is singular");
}
}  // namespace

double EIData::condition_number() const
{
    if (interpolation_matrix.size() == 0) return 1.0;
    Eigen::JacobiSVD<Matrix> svd(interpolation_matrix);
    const auto& s = svd.singularValues();
    return s[0] / s[s.size() - 1];
}

EIData EIData::truncated(std::size_t m) const
{
    if (m > size()) throw InvalidArgument("EIData::truncated: m exceeds number of interpolation points");
    EIData t;
    t.collateral_basis = collateral_basis->select_range(0, m);
    t.interpolation_dofs.assign(interpolation_dofs.begin(), interpolation_dofs.begin() + static_cast<std::ptrdiff_t>(m));
    t.interpolation_matrix = interpolation_matrix.topLeftCorner(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    if (!max_errors.empty())
        t.max_errors.assign(max_errors.begin(), max_errors.begin() + static_cast<std::ptrdiff_t>(m + 1));
    return t;
}

EIData ei_greedy(const VectorArray& evaluations, std::size_t max_dofs, double rtol, double atol)
{
    if (evaluations.len() == 0) throw InvalidArgument("ei_greedy: no evaluations");
    // rows: current interpolation errors of every evaluation
    Matrix errors = all_values(evaluations);
    const Eigen::Index dim = errors.cols();

    EIData data;
    std::vector<Vector> collateral;
    double initial = -1.0;
    while (true) {
        Eigen::Index worst = 0;
        double max_error = -1.0;
        for (Eigen::Index k = 0; k < errors.rows(); ++k) {
            const double e = errors.row(k).cwiseAbs().maxCoeff();
            if (e > max_error) {
                max_error = e;
                worst = k;
            }
        }
        if (initial < 0.0) {
            initial = max_error;
            if (initial == 0.0) throw InvalidArgument("ei_greedy: all evaluations are zero");
        }
        data.max_errors.push_back(max_error);
        if (collateral.size() >= max_dofs || max_error <= rtol * initial || max_error <= atol) break;

        const Vector e = errors.row(worst).transpose();
        const std::size_t dof = argmax_abs(e);
        const Vector c = e / e[static_cast<Eigen::Index>(dof)];
        // Newton-form update: the new interpolant adds c * (error at dof)
        const Vector at_dof = errors.col(static_cast<Eigen::Index>(dof));
        errors.noalias() -= at_dof * c.transpose();
        for (Eigen::Index k = 0; k < errors.rows(); ++k) errors(k, static_cast<Eigen::Index>(dof)) = 0.0;

        collateral.push_back(c);
        data.interpolation_dofs.push_back(dof);
    }

    const auto m = static_cast<Eigen::Index>(collateral.size());
    Matrix basis(m, dim);
    for (Eigen::Index j = 0; j < m; ++j) basis.row(j) = collateral[static_cast<std::size_t>(j)].transpose();
    data.interpolation_matrix.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            data.interpolation_matrix(i, j) = basis(j, static_cast<Eigen::Index>(data.interpolation_dofs[static_cast<std::size_t>(i)]));
    data.collateral_basis = std::make_shared<DenseVectorArray>(DenseVectorArray::from_rows(basis));
    check_interpolation_matrix(data.interpolation_matrix);
    return data;
}

EIData deim(const VectorArray& evaluations, std::size_t modes, double rank_rtol)
{
    if (evaluations.len() == 0) throw InvalidArgument("deim: no evaluations");
    auto p = pod(evaluations, modes, nullptr, rank_rtol);
    if (p.modes->len() < modes)
        throw InvalidArgument("deim: requested " + std::to_string(modes) + " modes but numerical rank is " +
                              std::to_string(p.modes->len()));
    const Matrix u = all_values(*p.modes);  // modes x dim

    EIData data;
    for (std::size_t k = 0; k < modes; ++k) {
        Vector r = u.row(static_cast<Eigen::Index>(k)).transpose();
        if (k > 0) {
            const auto kk = static_cast<Eigen::Index>(k);
            Matrix pm(kk, kk);
            Vector rhs(kk);
            for (Eigen::Index i = 0; i < kk; ++i) {
                const auto dof = static_cast<Eigen::Index>(data.interpolation_dofs[static_cast<std::size_t>(i)]);
                for (Eigen::Index j = 0; j < kk; ++j) pm(i, j) = u(j, dof);
                rhs[i] = r[dof];
            }
            const Vector c = pm.partialPivLu().solve(rhs);
            r -= u.topRows(kk).transpose() * c;
        }
        data.interpolation_dofs.push_back(argmax_abs(r));
    }
    const auto m = static_cast<Eigen::Index>(modes);
    data.interpolation_matrix.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            data.interpolation_matrix(i, j) = u(j, static_cast<Eigen::Index>(data.interpolation_dofs[static_cast<std::size_t>(i)]));
    check_interpolation_matrix(data.interpolation_matrix);
    data.collateral_basis = std::shared_ptr<const VectorArray>(std::move(p.modes));
    return data;
}

RestrictedOperator restricted(const Operator& op, std::span<const std::size_t> dofs)
{
    auto r = op.restricted(dofs);
    if (!r) throw NotSupported("operator kind '" + op.kind() + "' does not support restricted evaluation");
    return std::move(*r);
}

// ---------------------------------------------------------------------------

EmpiricalInterpolatedOperator::EmpiricalInterpolatedOperator(OperatorPtr op, EIData data)
    : Operator(op->source_dim(), op->range_dim()), operator_(std::move(op)), data_(std::move(data))
{
    if (!data_.collateral_basis || data_.collateral_basis->dim() != range_dim())
        throw DimensionMismatch("interpolate_operator: collateral basis dimension != operator range");
    if (data_.collateral_basis->len() != data_.size() ||
        static_cast<std::size_t>(data_.interpolation_matrix.rows()) != data_.size())
        throw InvalidArgument("interpolate_operator: inconsistent EI data");
    restricted_ = operator_->restricted(data_.interpolation_dofs);
    if (data_.size() > 0) lu_.compute(data_.interpolation_matrix);
}

Matrix EmpiricalInterpolatedOperator::evaluate_at_dofs(const VectorArray& U, const Parameter& mu) const
{
    check_source(U, "apply");
    if (restricted_) {
        auto local = DenseVectorArray::from_rows(U.dofs(restricted_->source_dofs));
        auto values = restricted_->op->apply(local, mu);
        std::vector<std::size_t> all(values->dim());
        std::iota(all.begin(), all.end(), 0);
        return values->dofs(all);
    }
    return operator_->apply(U, mu)->dofs(data_.interpolation_dofs);
}

Matrix EmpiricalInterpolatedOperator::interpolation_coefficients(const Matrix& values) const
{
    if (data_.size() == 0) return Matrix(values.rows(), 0);
    return lu_.solve(values.transpose()).transpose();
}

std::unique_ptr<VectorArray> EmpiricalInterpolatedOperator::apply(const VectorArray& U, const Parameter& mu) const
{
    const Matrix coeffs = interpolation_coefficients(evaluate_at_dofs(U, mu));
    if (data_.size() == 0) return data_.collateral_basis->zeros(U.len());
    return data_.collateral_basis->lincomb(coeffs);
}

OperatorPtr interpolate_operator(OperatorPtr op, EIData data)
{
    return std::make_shared<EmpiricalInterpolatedOperator>(std::move(op), std::move(data));
}

// ---------------------------------------------------------------------------

ProjectedEIOperator::ProjectedEIOperator(Matrix projected_collateral, RestrictedOperator restricted,
                                         Matrix source_basis_values, bool linear, bool parametric)
    : Operator(static_cast<std::size_t>(source_basis_values.cols()),
               static_cast<std::size_t>(projected_collateral.rows())),
      projected_collateral_(std::move(projected_collateral)),
      restricted_(std::move(restricted)),
      source_basis_values_(std::move(source_basis_values)),
      linear_(linear),
      parametric_(parametric)
{
}

std::uint64_t ProjectedEIOperator::flops_per_vector() const
{
    return static_cast<std::uint64_t>(source_basis_values_.size()) + static_cast<std::uint64_t>(projected_collateral_.size());
}

std::unique_ptr<VectorArray> ProjectedEIOperator::apply(const VectorArray& U, const Parameter& mu) const
{
    check_source(U, "apply");
    std::vector<std::size_t> all(U.dim());
    std::iota(all.begin(), all.end(), 0);
    const Matrix coeffs = U.dofs(all);                                  // len x N_V
    const Matrix local = coeffs * source_basis_values_.transpose();     // len x |src|
    auto values = restricted_.op->apply(DenseVectorArray::from_rows(local), mu);
    std::vector<std::size_t> m_all(values->dim());
    std::iota(m_all.begin(), m_all.end(), 0);
    const Matrix out = values->dofs(m_all) * projected_collateral_.transpose();  // len x N_W
    flops_ += flops_per_vector() * U.len();
    return std::make_unique<DenseVectorArray>(DenseVectorArray::from_rows(out));
}

OperatorPtr project_ei_operator(const EmpiricalInterpolatedOperator& ei_op, const VectorArray& W, const VectorArray& V)
{
    if (W.dim() != ei_op.range_dim() || V.dim() != ei_op.source_dim())
        throw DimensionMismatch("project_ei_operator: basis dimension mismatch");
    const auto& r = ei_op.restricted_operator();
    if (!r) throw NotSupported("project_ei_operator: interpolated operator cannot be restricted");
    const auto& data = ei_op.data();

    // W^T C I^{-1}: (N_W x M) = (W^T C) * I^{-1}
    const Matrix wc = W.inner(*data.collateral_basis);
    Matrix projected = data.size() == 0 ? Matrix(static_cast<Eigen::Index>(W.len()), 0)
                                        : Matrix(data.interpolation_matrix.transpose().partialPivLu().solve(wc.transpose()).transpose());
    const Matrix source_values = V.dofs(r->source_dofs).transpose();  // |src| x N_V
    return std::make_shared<ProjectedEIOperator>(std::move(projected), *r, source_values, ei_op.linear(),
                                                 ei_op.parametric());
}

}  // namespace morkit
