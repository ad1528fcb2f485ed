#include "morkit/reduction.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/LU>

#include "morkit/algorithms.hpp"
#include "morkit/ei.hpp"
#include "morkit/errors.hpp"

namespace morkit
{

namespace
{
Vector evaluate_all(const std::vector<ParameterFunctional>& fs, const Parameter& mu)
{
    Vector v(static_cast<Eigen::Index>(fs.size()));
    for (std::size_t i = 0; i < fs.size(); ++i) v[static_cast<Eigen::Index>(i)] = fs[i].evaluate(mu);
    return v;
}

std::shared_ptr<const VectorArray> as_array(const Vector& v)
{
    return std::make_shared<DenseVectorArray>(dense_from_vector(v));
}

struct RhsTerm
{
    ParameterFunctional coefficient;
    std::unique_ptr<VectorArray> vector;  // len 1, functional vector in range space
};

std::vector<RhsTerm> rhs_terms(const OperatorPtr& rhs)
{
    std::vector<RhsTerm> terms;
    for (auto& t : affine_terms(rhs)) {
        if (t.op->parametric()) throw NotSupported("right-hand side leaf is parametric");
        if (t.op->source_dim() != 1) throw InvalidArgument("right-hand side must map R^1 to the range space");
        terms.push_back({t.coefficient, t.op->as_range_array()});
    }
    return terms;
}
}  // namespace

double EstimatorData::residual_norm(const Vector& u, const Parameter& mu) const
{
    if (static_cast<std::size_t>(u.size()) != basis_size) throw DimensionMismatch("estimate: coefficient length != N");
    const Vector phi = evaluate_all(rhs_coefficients, mu);
    const Vector theta = evaluate_all(operator_coefficients, mu);

    if (variant == Variant::orthonormalized) {
        Vector r = rhs_coeffs * phi;
        for (std::size_t q = 0; q < operator_coeffs.size(); ++q) r.noalias() -= theta[static_cast<Eigen::Index>(q)] * (operator_coeffs[q] * u);
        return r.norm();
    }

    const auto F = phi.size();
    const auto N = static_cast<Eigen::Index>(basis_size);
    Vector c(F + theta.size() * N);
    c.head(F) = phi;
    for (Eigen::Index q = 0; q < theta.size(); ++q) c.segment(F + q * N, N) = -theta[q] * u;
    return std::sqrt(std::max(c.dot(gramian * c), 0.0));
}

// ---------------------------------------------------------------------------

ReducedStationaryModel::ReducedStationaryModel(std::vector<ParameterFunctional> operator_coefficients,
                                               std::vector<Matrix> operator_matrices,
                                               std::vector<ParameterFunctional> rhs_coefficients,
                                               std::vector<Vector> rhs_vectors, EstimatorData estimator,
                                               ParameterSpace parameter_space)
    : n_(estimator.basis_size),
      operator_coefficients_(std::move(operator_coefficients)),
      operator_matrices_(std::move(operator_matrices)),
      rhs_coefficients_(std::move(rhs_coefficients)),
      rhs_vectors_(std::move(rhs_vectors)),
      estimator_(std::move(estimator)),
      parameter_space_(std::move(parameter_space))
{
    if (operator_coefficients_.size() != operator_matrices_.size() || rhs_coefficients_.size() != rhs_vectors_.size())
        throw InvalidArgument("ReducedStationaryModel: coefficient/term count mismatch");
    if (n_ > 10'000) throw InvalidArgument("ReducedStationaryModel: N exceeds 10000");
    for (const auto& m : operator_matrices_)
        if (static_cast<std::size_t>(m.rows()) != n_ || static_cast<std::size_t>(m.cols()) != n_)
            throw DimensionMismatch("ReducedStationaryModel: operator matrix is not N x N");
    for (const auto& v : rhs_vectors_)
        if (static_cast<std::size_t>(v.size()) != n_) throw DimensionMismatch("ReducedStationaryModel: rhs length != N");
}

Matrix ReducedStationaryModel::assemble_operator(const Parameter& mu) const
{
    const auto n = static_cast<Eigen::Index>(n_);
    Matrix a = Matrix::Zero(n, n);
    for (std::size_t q = 0; q < operator_matrices_.size(); ++q) a += operator_coefficients_[q].evaluate(mu) * operator_matrices_[q];
    return a;
}

Vector ReducedStationaryModel::assemble_rhs(const Parameter& mu) const
{
    Vector f = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (std::size_t k = 0; k < rhs_vectors_.size(); ++k) f += rhs_coefficients_[k].evaluate(mu) * rhs_vectors_[k];
    return f;
}

Vector ReducedStationaryModel::solve(const Parameter& mu) const
{
    if (n_ == 0) return Vector(0);
    const Matrix a = assemble_operator(mu);
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-15)) throw SolverError("reduced system is singular (rcond " + std::to_string(rcond) + ")");
    return lu.solve(assemble_rhs(mu));
}

double ReducedStationaryModel::estimate(const Vector& u, const Parameter& mu) const
{
    const double alpha = estimator_.coercivity.evaluate(mu);
    if (!(alpha > 0.0)) throw InvalidArgument("estimate: coercivity estimate must be positive");
    return estimator_.residual_norm(u, mu) / alpha;
}

std::shared_ptr<StationaryModel> ReducedStationaryModel::as_model() const
{
    std::vector<OperatorPtr> ops;
    for (const auto& m : operator_matrices_) ops.push_back(std::make_shared<MatrixOperator>(m));
    std::vector<OperatorPtr> rhs;
    for (const auto& v : rhs_vectors_) rhs.push_back(std::make_shared<VectorOperator>(as_array(v)));
    OperatorPtr op = ops.empty() ? OperatorPtr(std::make_shared<ZeroOperator>(n_, n_))
                                 : make_lincomb(std::move(ops), operator_coefficients_);
    OperatorPtr f = rhs.empty() ? OperatorPtr(std::make_shared<ZeroOperator>(1, n_))
                                : make_lincomb(std::move(rhs), rhs_coefficients_);
    return std::make_shared<StationaryModel>(op, f, std::map<std::string, OperatorPtr>{}, parameter_space_);
}

// ---------------------------------------------------------------------------

std::unique_ptr<VectorArray> Reconstructor::reconstruct(const Vector& u) const
{
    if (static_cast<std::size_t>(u.size()) != basis_->len()) throw DimensionMismatch("reconstruct: coefficient length != N");
    return basis_->lincomb(u.transpose());
}

std::unique_ptr<VectorArray> Reconstructor::reconstruct(const VectorArray& coefficients) const
{
    if (coefficients.dim() != basis_->len()) throw DimensionMismatch("reconstruct: coefficient dim != N");
    std::vector<std::size_t> all(coefficients.dim());
    std::iota(all.begin(), all.end(), 0);
    return basis_->lincomb(coefficients.dofs(all));
}

// ---------------------------------------------------------------------------

OperatorPtr project_operator(const OperatorPtr& op, const VectorArray& W, const VectorArray& V)
{
    if (W.dim() != op->range_dim()) throw DimensionMismatch("project_operator: range basis dimension mismatch");

    if (auto lc = std::dynamic_pointer_cast<const LincombOperator>(op)) {
        std::vector<OperatorPtr> children;
        for (const auto& c : lc->operators()) children.push_back(project_operator(c, W, V));
        return make_lincomb(std::move(children), lc->coefficients());
    }
    if (auto vo = std::dynamic_pointer_cast<const VectorOperator>(op)) {
        const Matrix coeffs = vo->vectors().inner(W);  // len(vectors) x N_W
        return std::make_shared<VectorOperator>(std::make_shared<DenseVectorArray>(DenseVectorArray::from_rows(coeffs)));
    }
    if (V.dim() != op->source_dim()) throw DimensionMismatch("project_operator: source basis dimension mismatch");
    if (auto ei = std::dynamic_pointer_cast<const EmpiricalInterpolatedOperator>(op)) return project_ei_operator(*ei, W, V);
    if (std::dynamic_pointer_cast<const ZeroOperator>(op))
        return std::make_shared<ZeroOperator>(V.len(), W.len());
    if (!op->linear())
        throw NotSupported("project_operator: nonlinear operator '" + op->kind() + "' needs empirical interpolation");
    if (op->parametric()) throw NotSupported("project_operator: parametric leaf '" + op->kind() + "' is not affine");
    return std::make_shared<MatrixOperator>(op->apply2(W, V));
}

StationaryReduction reduce_stationary_coercive(const StationaryModel& model, std::shared_ptr<const VectorArray> basis,
                                               const Operator& error_product,
                                               const ParameterFunctional& coercivity_estimator,
                                               EstimatorData::Variant variant)
{
    if (basis->dim() != model.dim()) throw DimensionMismatch("reduce_stationary_coercive: basis dimension != model dim");
    if (basis->len() > 0) {
        const double defect = orthonormality_defect(*basis, &error_product);
        if (!(defect <= 1e-8))
            throw InvalidArgument("reduce_stationary_coercive: basis not orthonormal w.r.t. error product (defect " +
                                  std::to_string(defect) + ")");
    }
    const std::size_t N = basis->len();
    const auto n = static_cast<Eigen::Index>(N);

    std::vector<ParameterFunctional> op_coeffs;
    std::vector<Matrix> op_mats;
    std::vector<std::unique_ptr<VectorArray>> applied;  // B_q b_n
    for (auto& t : affine_terms(model.op())) {
        if (!t.op->linear() || t.op->parametric())
            throw NotSupported("reduce_stationary_coercive: operator is not affinely decomposed into linear leaves");
        auto bb = t.op->apply(*basis);
        op_mats.push_back(N == 0 ? Matrix(0, 0) : basis->inner(*bb));
        op_coeffs.push_back(t.coefficient);
        applied.push_back(std::move(bb));
    }

    std::vector<ParameterFunctional> rhs_coeffs;
    std::vector<Vector> rhs_vecs;
    auto rhs_stack = basis->zeros(0);
    for (auto& t : rhs_terms(model.rhs())) {
        rhs_vecs.push_back(N == 0 ? Vector(0) : Vector(basis->inner(*t.vector).col(0)));
        rhs_coeffs.push_back(t.coefficient);
        rhs_stack->append(*t.vector);
    }

    // Riesz representatives in the order F_1..F_F, B_1 b_1..B_1 b_N, ..., B_Q b_N
    auto functionals = rhs_stack->copy();
    for (const auto& a : applied) functionals->append(*a);
    auto reps = riesz(error_product, *functionals, model.solver_options());

    EstimatorData est;
    est.variant = variant;
    est.rhs_coefficients = rhs_coeffs;
    est.operator_coefficients = op_coeffs;
    est.coercivity = coercivity_estimator;
    est.basis_size = N;
    const auto F = static_cast<Eigen::Index>(rhs_coeffs.size());
    if (variant == EstimatorData::Variant::orthonormalized) {
        auto gs = gram_schmidt(*reps, &error_product, 0);
        // <e_k, P r_j> = <e_k, functional_j>
        const Matrix c = gs.basis->inner(*functionals);  // K x (F + Q N)
        est.rhs_coeffs = c.leftCols(F);
        for (std::size_t q = 0; q < op_coeffs.size(); ++q)
            est.operator_coeffs.push_back(c.middleCols(F + static_cast<Eigen::Index>(q) * n, n));
    } else {
        const Matrix g = reps->inner(*functionals);
        est.gramian = 0.5 * (g + g.transpose());
    }

    auto rm = std::make_shared<ReducedStationaryModel>(std::move(op_coeffs), std::move(op_mats), std::move(rhs_coeffs),
                                                       std::move(rhs_vecs), std::move(est), model.parameter_space());
    return {rm, Reconstructor(std::move(basis))};
}

InstationaryReduction reduce_instationary(const InstationaryModel& model, std::shared_ptr<const VectorArray> basis,
                                          const Operator* product)
{
    if (basis->dim() != model.dim()) throw DimensionMismatch("reduce_instationary: basis dimension != model dim");
    if (basis->len() > 0) {
        const double defect = orthonormality_defect(*basis, product);
        if (!(defect <= 1e-8))
            throw InvalidArgument("reduce_instationary: basis not orthonormal (defect " + std::to_string(defect) + ")");
    }
    std::shared_ptr<const VectorArray> W = basis;
    if (product) W = product->apply(*basis);

    OperatorPtr op = project_operator(model.op(), *W, *basis);
    OperatorPtr rhs = model.rhs() ? project_operator(model.rhs(), *W, *basis) : nullptr;

    const Matrix u0 = inner(*basis, model.initial_data(), product);  // N x 1
    auto initial = std::make_shared<DenseVectorArray>(DenseVectorArray::from_rows(u0.transpose()));

    std::map<std::string, OperatorPtr> products;
    for (const auto& [name, p] : model.products()) products[name] = project_operator(p, *basis, *basis);

    auto rm = std::make_shared<InstationaryModel>(op, rhs, std::move(initial), model.T(), model.nt(), std::move(products),
                                                  model.parameter_space());
    return {rm, Reconstructor(std::move(basis))};
}

double orthonormality_defect(const VectorArray& basis, const Operator* product)
{
    if (basis.len() == 0) return 0.0;
    const Matrix g = inner(basis, basis, product);
    return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace morkit
