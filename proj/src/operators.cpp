#include "morkit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/SparseLU>

#include "morkit/errors.hpp"

namespace morkit
{

namespace
{
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

const LocalVectorArray& local_array(const VectorArray& a, const char* what)
{
    const auto* l = dynamic_cast<const LocalVectorArray*>(&a);
    if (!l) throw NotSupported(std::string(what) + ": operator requires an in-process array, got '" + a.backend() + "'");
    return *l;
}

void check_finite(const LocalVectorArray& a, const char* what)
{
    for (std::size_t i = 0; i < a.len(); ++i)
        for (double x : a.vec(i))
            if (!std::isfinite(x)) throw SolverError(std::string(what) + ": solution is not finite");
}

/// Applies `inner` to the entries `indices` of its input.
class ReindexedOperator final : public Operator
{
   public:
    ReindexedOperator(OperatorPtr inner, std::vector<std::size_t> indices, std::size_t source_dim)
        : Operator(source_dim, inner->range_dim()), inner_(std::move(inner)), indices_(std::move(indices))
    {
    }

    bool linear() const override { return inner_->linear(); }
    std::string kind() const override { return "reindexed"; }

    std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu) const override
    {
        check_source(U, "apply");
        return inner_->apply(DenseVectorArray::from_rows(U.dofs(indices_)), mu);
    }

   private:
    OperatorPtr inner_;
    std::vector<std::size_t> indices_;
};
}  // namespace

// ---------------------------------------------------------------------------
// Operator defaults

Matrix Operator::apply2(const VectorArray& V, const VectorArray& U, const Parameter& mu) const
{
    check_range(V, "apply2");
    return V.inner(*apply(U, mu));
}

std::unique_ptr<VectorArray> Operator::apply_inverse(const VectorArray& V, const Parameter& mu,
                                                     const SolverOptions& options) const
{
    auto assembled = assemble(mu);
    if (assembled.get() == this) throw NotSupported("apply_inverse not supported by operator kind '" + kind() + "'");
    return assembled->apply_inverse(V, mu, options);
}

OperatorPtr Operator::jacobian(const VectorArray&, const Parameter& mu) const
{
    if (!linear()) throw NotSupported("jacobian not supported by operator kind '" + kind() + "'");
    return assemble(mu);
}

OperatorPtr Operator::assemble(const Parameter&) const { return shared_from_this(); }

std::optional<RestrictedOperator> Operator::restricted(std::span<const std::size_t>) const { return std::nullopt; }

std::unique_ptr<VectorArray> Operator::as_range_array(const Parameter&) const
{
    throw NotSupported("operator kind '" + kind() + "' is not vector-like");
}

void Operator::check_source(const VectorArray& U, const char* what) const
{
    if (U.dim() != source_dim_)
        throw DimensionMismatch(std::string(what) + ": source dimension " + std::to_string(source_dim_) +
                                " != array dimension " + std::to_string(U.dim()));
}

void Operator::check_range(const VectorArray& V, const char* what) const
{
    if (V.dim() != range_dim_)
        throw DimensionMismatch(std::string(what) + ": range dimension " + std::to_string(range_dim_) +
                                " != array dimension " + std::to_string(V.dim()));
}

// ---------------------------------------------------------------------------
// MatrixOperator

struct MatrixOperator::Factorization
{
    std::unique_ptr<Eigen::PartialPivLU<Matrix>> dense;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> sparse;
    bool singular = false;
};

MatrixOperator::MatrixOperator(Matrix m)
    : Operator(static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.rows())), matrix_(std::move(m))
{
}

MatrixOperator::MatrixOperator(CsrMatrix m) : Operator(m.cols(), m.rows()), matrix_(std::move(m)) {}

Matrix MatrixOperator::to_dense() const { return is_sparse() ? sparse().to_dense() : dense(); }

std::unique_ptr<VectorArray> MatrixOperator::apply(const VectorArray& U, const Parameter&) const
{
    check_source(U, "apply");
    const auto& u = local_array(U, "apply");
    auto out = u.make(range_dim(), U.len());
    if (is_sparse()) {
        const auto& m = sparse();
        if (auto* du = dynamic_cast<const DenseVectorArray*>(&u)) {
            auto* dout = static_cast<DenseVectorArray*>(out.get());
            kernels::omp::spmv(m.view(), du->data(), dout->data(), U.len());
        } else {
            for (std::size_t i = 0; i < U.len(); ++i) kernels::serial::spmv(m.view(), u.vec(i), out->vec(i), 1);
        }
        return out;
    }
    const auto& m = dense();
    for (std::size_t i = 0; i < U.len(); ++i) {
        Eigen::Map<const Vector> x(u.vec(i).data(), m.cols());
        Eigen::Map<Vector> y(out->vec(i).data(), m.rows());
        y.noalias() = m * x;
    }
    return out;
}

const MatrixOperator::Factorization& MatrixOperator::factorization() const
{
    std::call_once(factor_once_, [this] {
        auto f = std::make_shared<Factorization>();
        if (is_sparse()) {
            f->sparse = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
            auto m = sparse().to_eigen();
            m.makeCompressed();
            f->sparse->compute(m);
            f->singular = f->sparse->info() != Eigen::Success;
        } else {
            f->dense = std::make_unique<Eigen::PartialPivLU<Matrix>>(dense());
            f->singular = dense().size() > 0 && !(f->dense->rcond() > 1e-15);
        }
        factor_ = std::move(f);
    });
    return *factor_;
}

std::unique_ptr<VectorArray> MatrixOperator::apply_inverse(const VectorArray& V, const Parameter&,
                                                           const SolverOptions& options) const
{
    check_range(V, "apply_inverse");
    if (source_dim() != range_dim()) throw NotSupported("apply_inverse of a non-square matrix");
    const auto& v = local_array(V, "apply_inverse");
    const std::size_t n = source_dim();
    auto out = v.make(n, V.len());
    if (V.len() == 0) return out;

    const bool use_cg = is_sparse() && (options.method == SolverOptions::Method::cg ||
                                        (options.method == SolverOptions::Method::automatic && n > options.direct_limit));
    if (use_cg) {
        const std::size_t max_iter = options.max_iter ? options.max_iter : 10 * n;
        for (std::size_t i = 0; i < V.len(); ++i) pcg_solve(sparse(), v.vec(i), out->vec(i), options.rel_tol, max_iter);
        return out;
    }

    const auto& f = factorization();
    if (f.singular) throw SolverError("apply_inverse: matrix is singular");
    for (std::size_t i = 0; i < V.len(); ++i) {
        Eigen::Map<const Vector> b(v.vec(i).data(), static_cast<Eigen::Index>(n));
        Eigen::Map<Vector> x(out->vec(i).data(), static_cast<Eigen::Index>(n));
        if (f.sparse)
            x = f.sparse->solve(b);
        else
            x = f.dense->solve(b);
    }
    check_finite(*out, "apply_inverse");
    return out;
}

OperatorPtr MatrixOperator::jacobian(const VectorArray& U, const Parameter&) const
{
    check_source(U, "jacobian");
    return shared_from_this();
}

std::optional<RestrictedOperator> MatrixOperator::restricted(std::span<const std::size_t> dofs) const
{
    for (auto d : dofs)
        if (d >= range_dim()) throw IndexOutOfRange("restricted: dof out of range");
    RestrictedOperator r;
    r.range_dofs.assign(dofs.begin(), dofs.end());
    if (!is_sparse()) {
        r.source_dofs.resize(source_dim());
        std::iota(r.source_dofs.begin(), r.source_dofs.end(), 0);
        Matrix sub(static_cast<Eigen::Index>(dofs.size()), dense().cols());
        for (std::size_t k = 0; k < dofs.size(); ++k) sub.row(static_cast<Eigen::Index>(k)) = dense().row(static_cast<Eigen::Index>(dofs[k]));
        r.op = std::make_shared<MatrixOperator>(std::move(sub));
        return r;
    }
    const auto& m = sparse();
    std::set<std::size_t> cols;
    for (auto d : dofs)
        for (std::size_t p = m.row_ptr()[d]; p < m.row_ptr()[d + 1]; ++p) cols.insert(m.col_idx()[p]);
    r.source_dofs.assign(cols.begin(), cols.end());
    std::vector<Triplet> t;
    for (std::size_t k = 0; k < dofs.size(); ++k)
        for (std::size_t p = m.row_ptr()[dofs[k]]; p < m.row_ptr()[dofs[k] + 1]; ++p) {
            const auto local = static_cast<std::size_t>(
                std::lower_bound(r.source_dofs.begin(), r.source_dofs.end(), m.col_idx()[p]) - r.source_dofs.begin());
            t.push_back({k, local, m.values()[p]});
        }
    r.op = std::make_shared<MatrixOperator>(CsrMatrix::from_triplets(dofs.size(), r.source_dofs.size(), std::move(t)));
    return r;
}

// ---------------------------------------------------------------------------
// Identity / zero / vector

std::unique_ptr<VectorArray> IdentityOperator::apply(const VectorArray& U, const Parameter&) const
{
    check_source(U, "apply");
    return U.copy();
}

std::unique_ptr<VectorArray> IdentityOperator::apply_inverse(const VectorArray& V, const Parameter&,
                                                             const SolverOptions&) const
{
    check_range(V, "apply_inverse");
    return V.copy();
}

std::optional<RestrictedOperator> IdentityOperator::restricted(std::span<const std::size_t> dofs) const
{
    for (auto d : dofs)
        if (d >= range_dim()) throw IndexOutOfRange("restricted: dof out of range");
    RestrictedOperator r;
    r.range_dofs.assign(dofs.begin(), dofs.end());
    std::vector<std::size_t> sorted(dofs.begin(), dofs.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    r.source_dofs = sorted;
    std::vector<Triplet> t;
    for (std::size_t k = 0; k < dofs.size(); ++k) {
        const auto local =
            static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), dofs[k]) - sorted.begin());
        t.push_back({k, local, 1.0});
    }
    r.op = std::make_shared<MatrixOperator>(CsrMatrix::from_triplets(dofs.size(), sorted.size(), std::move(t)));
    return r;
}

std::unique_ptr<VectorArray> ZeroOperator::apply(const VectorArray& U, const Parameter&) const
{
    check_source(U, "apply");
    if (source_dim() == range_dim()) return U.zeros(U.len());
    const auto& u = local_array(U, "apply");
    return u.make(range_dim(), U.len());
}

std::unique_ptr<VectorArray> ZeroOperator::apply_inverse(const VectorArray&, const Parameter&,
                                                         const SolverOptions&) const
{
    throw SolverError("apply_inverse: zero operator is singular");
}

VectorOperator::VectorOperator(std::shared_ptr<const VectorArray> vectors)
    : Operator(vectors->len(), vectors->dim()), vectors_(std::move(vectors))
{
}

std::unique_ptr<VectorArray> VectorOperator::apply(const VectorArray& U, const Parameter&) const
{
    check_source(U, "apply");
    std::vector<std::size_t> all(source_dim());
    std::iota(all.begin(), all.end(), 0);
    return vectors_->lincomb(U.dofs(all));
}

std::unique_ptr<VectorArray> VectorOperator::as_range_array(const Parameter&) const { return vectors_->copy(); }

// ---------------------------------------------------------------------------
// LincombOperator

LincombOperator::LincombOperator(std::vector<OperatorPtr> operators, std::vector<ParameterFunctional> coefficients)
    : Operator(operators.empty() ? 0 : operators.front()->source_dim(),
               operators.empty() ? 0 : operators.front()->range_dim()),
      operators_(std::move(operators)),
      coefficients_(std::move(coefficients))
{
    if (operators_.empty()) throw InvalidArgument("lincomb needs at least one operator");
    if (operators_.size() != coefficients_.size()) throw InvalidArgument("lincomb: operator/coefficient count mismatch");
    for (const auto& op : operators_)
        if (op->source_dim() != source_dim() || op->range_dim() != range_dim())
            throw DimensionMismatch("lincomb: operators have different shapes");
}

bool LincombOperator::linear() const
{
    return std::all_of(operators_.begin(), operators_.end(), [](const auto& o) { return o->linear(); });
}

bool LincombOperator::parametric() const
{
    return std::any_of(coefficients_.begin(), coefficients_.end(), [](const auto& c) { return c.is_parametric(); }) ||
           std::any_of(operators_.begin(), operators_.end(), [](const auto& o) { return o->parametric(); });
}

std::vector<double> LincombOperator::evaluate_coefficients(const Parameter& mu) const
{
    std::vector<double> theta;
    theta.reserve(coefficients_.size());
    for (const auto& c : coefficients_) theta.push_back(c.evaluate(mu));
    return theta;
}

std::unique_ptr<VectorArray> LincombOperator::apply(const VectorArray& U, const Parameter& mu) const
{
    check_source(U, "apply");
    const auto theta = evaluate_coefficients(mu);
    auto result = operators_[0]->apply(U, mu);
    result->scal(theta[0]);
    for (std::size_t q = 1; q < operators_.size(); ++q) result->axpy(theta[q], *operators_[q]->apply(U, mu));
    return result;
}

OperatorPtr LincombOperator::jacobian(const VectorArray& U, const Parameter& mu) const
{
    const auto theta = evaluate_coefficients(mu);
    std::vector<OperatorPtr> jacs;
    std::vector<ParameterFunctional> coeffs;
    for (std::size_t q = 0; q < operators_.size(); ++q) {
        jacs.push_back(operators_[q]->jacobian(U, mu));
        coeffs.push_back(ParameterFunctional::constant(theta[q]));
    }
    return LincombOperator(std::move(jacs), std::move(coeffs)).assemble(mu);
}

OperatorPtr LincombOperator::assemble(const Parameter& mu) const
{
    const auto terms = affine_terms(shared_from_this());
    std::vector<double> theta;
    std::vector<OperatorPtr> assembled;
    for (const auto& t : terms) {
        theta.push_back(t.coefficient.evaluate(mu));
        assembled.push_back(t.op->assemble(mu));
    }

    const bool all_matrices = std::all_of(assembled.begin(), assembled.end(), [](const auto& o) {
        return dynamic_cast<const MatrixOperator*>(o.get()) != nullptr;
    });
    if (all_matrices) {
        const bool all_sparse = std::all_of(assembled.begin(), assembled.end(), [](const auto& o) {
            return static_cast<const MatrixOperator*>(o.get())->is_sparse();
        });
        if (all_sparse) {
            CsrMatrix sum = static_cast<const MatrixOperator*>(assembled[0].get())->sparse().scaled(theta[0]);
            for (std::size_t q = 1; q < assembled.size(); ++q)
                sum = sum.add(static_cast<const MatrixOperator*>(assembled[q].get())->sparse(), theta[q]);
            return std::make_shared<MatrixOperator>(std::move(sum));
        }
        Matrix sum = theta[0] * static_cast<const MatrixOperator*>(assembled[0].get())->to_dense();
        for (std::size_t q = 1; q < assembled.size(); ++q)
            sum += theta[q] * static_cast<const MatrixOperator*>(assembled[q].get())->to_dense();
        return std::make_shared<MatrixOperator>(std::move(sum));
    }

    const bool all_vectors = std::all_of(assembled.begin(), assembled.end(), [](const auto& o) {
        return dynamic_cast<const VectorOperator*>(o.get()) != nullptr;
    });
    if (all_vectors) {
        auto sum = static_cast<const VectorOperator*>(assembled[0].get())->vectors().copy();
        sum->scal(theta[0]);
        for (std::size_t q = 1; q < assembled.size(); ++q)
            sum->axpy(theta[q], static_cast<const VectorOperator*>(assembled[q].get())->vectors());
        return std::make_shared<VectorOperator>(std::shared_ptr<const VectorArray>(std::move(sum)));
    }

    std::vector<ParameterFunctional> coeffs;
    for (double t : theta) coeffs.push_back(ParameterFunctional::constant(t));
    return std::make_shared<LincombOperator>(std::move(assembled), std::move(coeffs));
}

std::unique_ptr<VectorArray> LincombOperator::as_range_array(const Parameter& mu) const
{
    const auto theta = evaluate_coefficients(mu);
    auto result = operators_[0]->as_range_array(mu);
    result->scal(theta[0]);
    for (std::size_t q = 1; q < operators_.size(); ++q) result->axpy(theta[q], *operators_[q]->as_range_array(mu));
    return result;
}

std::optional<RestrictedOperator> LincombOperator::restricted(std::span<const std::size_t> dofs) const
{
    std::vector<RestrictedOperator> parts;
    std::set<std::size_t> source;
    for (const auto& op : operators_) {
        auto r = op->restricted(dofs);
        if (!r) return std::nullopt;
        source.insert(r->source_dofs.begin(), r->source_dofs.end());
        parts.push_back(std::move(*r));
    }
    RestrictedOperator result;
    result.range_dofs.assign(dofs.begin(), dofs.end());
    result.source_dofs.assign(source.begin(), source.end());
    std::vector<OperatorPtr> ops;
    for (auto& p : parts) {
        std::vector<std::size_t> local;
        for (auto s : p.source_dofs)
            local.push_back(static_cast<std::size_t>(
                std::lower_bound(result.source_dofs.begin(), result.source_dofs.end(), s) - result.source_dofs.begin()));
        ops.push_back(std::make_shared<ReindexedOperator>(p.op, std::move(local), result.source_dofs.size()));
    }
    result.op = std::make_shared<LincombOperator>(std::move(ops), coefficients_);
    return result;
}

// ---------------------------------------------------------------------------
// free functions

std::vector<AffineTerm> affine_terms(const OperatorPtr& op)
{
    const auto* lc = dynamic_cast<const LincombOperator*>(op.get());
    if (!lc) return {AffineTerm{ParameterFunctional::constant(1.0), op}};
    std::vector<AffineTerm> terms;
    for (std::size_t q = 0; q < lc->operators().size(); ++q) {
        const auto& outer = lc->coefficients()[q];
        for (auto& t : affine_terms(lc->operators()[q])) {
            const bool unit = t.coefficient.kind() == ParameterFunctional::Kind::constant &&
                              t.coefficient.evaluate(Parameter{}) == 1.0;
            terms.push_back({unit ? outer : ParameterFunctional::product({outer, t.coefficient}), t.op});
        }
    }
    return terms;
}

Matrix inner(const VectorArray& A, const VectorArray& B, const Operator* product)
{
    if (product) return product->apply2(A, B);
    return A.inner(B);
}

Vector norms(const VectorArray& A, const Operator* product)
{
    if (!product) return A.norms();
    Vector n = product->apply(A)->pairwise_inner(A);
    for (Eigen::Index i = 0; i < n.size(); ++i) n[i] = std::sqrt(std::max(n[i], 0.0));
    return n;
}

std::shared_ptr<const MatrixOperator> lincomb_assemble(const OperatorPtr& op, const Parameter& mu)
{
    auto assembled = op->assemble(mu);
    auto m = std::dynamic_pointer_cast<const MatrixOperator>(assembled);
    if (!m) throw NotSupported("lincomb_assemble: operator has non-matrix leaves");
    return m;
}

OperatorPtr make_lincomb(std::vector<OperatorPtr> operators, std::vector<ParameterFunctional> coefficients)
{
    return std::make_shared<LincombOperator>(std::move(operators), std::move(coefficients));
}

std::size_t pcg_solve(const CsrMatrix& A, std::span<const double> b, std::span<double> x, double rel_tol,
                      std::size_t max_iter)
{
    const std::size_t n = A.rows();
    const auto diag = A.diagonal();
    for (double d : diag)
        if (!(d > 0.0)) throw SolverError("pcg: Jacobi preconditioner needs a positive diagonal");

    std::fill(x.begin(), x.end(), 0.0);
    std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n);
    auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
        return s;
    };
    const double b_norm = std::sqrt(dot(r, r));
    if (b_norm == 0.0) return 0;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = dot(r, z);
    double res = 1.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        A.multiply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) throw SolverError("pcg: breakdown (matrix not SPD?)", res);
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        res = std::sqrt(dot(r, r)) / b_norm;
        if (res <= rel_tol) return it;
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw SolverError("pcg: no convergence after " + std::to_string(max_iter) + " iterations", res);
}

}  // namespace morkit
