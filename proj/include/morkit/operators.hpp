#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "morkit/parameters.hpp"
#include "morkit/sparse.hpp"
#include "morkit/vector_array.hpp"

namespace morkit
{

struct SolverOptions
{
    enum class Method
    {
        automatic,  ///< direct up to `direct_limit` unknowns, Jacobi-PCG above
        direct,
        cg
    };

    Method method = Method::automatic;
    double rel_tol = 1e-12;
    std::size_t max_iter = 0;  ///< 0 means 10 * dim
    std::size_t direct_limit = 50'000;
};

class Operator;
using OperatorPtr = std::shared_ptr<const Operator>;

/// Evaluates only the range DOFs `range_dofs` of some operator, reading only
/// the source DOFs `source_dofs`. `op` maps arrays of dimension
/// source_dofs.size() to arrays of dimension range_dofs.size().
struct RestrictedOperator
{
    std::vector<std::size_t> range_dofs;
    std::vector<std::size_t> source_dofs;
    OperatorPtr op;
};

/// Parametric, possibly nonlinear map between vector arrays.
///
/// Operators are immutable after construction and may be shared between
/// threads. Lazily computed factorizations are guarded internally.
/// jacobian/assemble may return the operator itself, so instances must be
/// owned by a shared_ptr.
class Operator : public std::enable_shared_from_this<Operator>
{
   public:
    virtual ~Operator() = default;

    std::size_t source_dim() const { return source_dim_; }
    std::size_t range_dim() const { return range_dim_; }

    virtual bool linear() const = 0;
    virtual bool parametric() const { return false; }
    virtual std::string kind() const = 0;

    virtual std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu = {}) const = 0;

    /// M[i, j] = <V[i], apply(U[j])>
    virtual Matrix apply2(const VectorArray& V, const VectorArray& U, const Parameter& mu = {}) const;

    /// Default: assemble for `mu` and, if that yields a different operator,
    /// delegate to it.
    virtual std::unique_ptr<VectorArray> apply_inverse(const VectorArray& V, const Parameter& mu = {},
                                                       const SolverOptions& options = {}) const;

    /// Linear operators return their assembled self.
    virtual OperatorPtr jacobian(const VectorArray& U, const Parameter& mu = {}) const;

    virtual OperatorPtr assemble(const Parameter& mu = {}) const;

    /// nullopt when the operator has no locality structure to exploit.
    virtual std::optional<RestrictedOperator> restricted(std::span<const std::size_t> dofs) const;

    /// For operators mapping coefficients to vectors (right-hand sides):
    /// the range vectors for `mu`.
    virtual std::unique_ptr<VectorArray> as_range_array(const Parameter& mu = {}) const;

   protected:
    Operator(std::size_t source_dim, std::size_t range_dim) : source_dim_(source_dim), range_dim_(range_dim) {}

    void check_source(const VectorArray& U, const char* what) const;
    void check_range(const VectorArray& V, const char* what) const;

   private:
    std::size_t source_dim_;
    std::size_t range_dim_;
};

/// Dense or CSR matrix acting on in-process arrays.
class MatrixOperator final : public Operator
{
   public:
    explicit MatrixOperator(Matrix m);
    explicit MatrixOperator(CsrMatrix m);

    bool linear() const override { return true; }
    std::string kind() const override { return "matrix"; }

    bool is_sparse() const { return std::holds_alternative<CsrMatrix>(matrix_); }
    const Matrix& dense() const { return std::get<Matrix>(matrix_); }
    const CsrMatrix& sparse() const { return std::get<CsrMatrix>(matrix_); }
    Matrix to_dense() const;

    std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu = {}) const override;
    std::unique_ptr<VectorArray> apply_inverse(const VectorArray& V, const Parameter& mu = {},
                                               const SolverOptions& options = {}) const override;
    OperatorPtr jacobian(const VectorArray& U, const Parameter& mu = {}) const override;
    std::optional<RestrictedOperator> restricted(std::span<const std::size_t> dofs) const override;

   private:
    struct Factorization;

    const Factorization& factorization() const;

    std::variant<Matrix, CsrMatrix> matrix_;
    mutable std::once_flag factor_once_;
    mutable std::shared_ptr<Factorization> factor_;
};

class IdentityOperator final : public Operator
{
   public:
    explicit IdentityOperator(std::size_t dim) : Operator(dim, dim) {}
    bool linear() const override { return true; }
    std::string kind() const override { return "identity"; }
    std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu = {}) const override;
    std::unique_ptr<VectorArray> apply_inverse(const VectorArray& V, const Parameter& mu = {},
                                               const SolverOptions& options = {}) const override;
    std::optional<RestrictedOperator> restricted(std::span<const std::size_t> dofs) const override;
};

class ZeroOperator final : public Operator
{
   public:
    ZeroOperator(std::size_t source_dim, std::size_t range_dim) : Operator(source_dim, range_dim) {}
    bool linear() const override { return true; }
    std::string kind() const override { return "zero"; }
    std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu = {}) const override;
    std::unique_ptr<VectorArray> apply_inverse(const VectorArray& V, const Parameter& mu = {},
                                               const SolverOptions& options = {}) const override;
};

/// Maps coefficient vectors c (dim = number of stored vectors) to
/// sum_k c_k * vectors[k]. With one stored vector this is the usual
/// right-hand-side / vector-functional operator.
class VectorOperator final : public Operator
{
   public:
    explicit VectorOperator(std::shared_ptr<const VectorArray> vectors);

    bool linear() const override { return true; }
    std::string kind() const override { return "vector"; }
    const VectorArray& vectors() const { return *vectors_; }

    std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu = {}) const override;
    std::unique_ptr<VectorArray> as_range_array(const Parameter& mu = {}) const override;

   private:
    std::shared_ptr<const VectorArray> vectors_;
};

/// sum_q theta_q(mu) * ops[q]; children may themselves be lincombs.
class LincombOperator final : public Operator
{
   public:
    LincombOperator(std::vector<OperatorPtr> operators, std::vector<ParameterFunctional> coefficients);

    bool linear() const override;
    bool parametric() const override;
    std::string kind() const override { return "lincomb"; }

    const std::vector<OperatorPtr>& operators() const { return operators_; }
    const std::vector<ParameterFunctional>& coefficients() const { return coefficients_; }
    std::vector<double> evaluate_coefficients(const Parameter& mu) const;

    std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu = {}) const override;
    OperatorPtr jacobian(const VectorArray& U, const Parameter& mu = {}) const override;

    /// Flattens nested lincombs and sums matrix (or vector) leaves into a
    /// single operator; otherwise returns a lincomb of assembled children.
    OperatorPtr assemble(const Parameter& mu = {}) const override;

    std::unique_ptr<VectorArray> as_range_array(const Parameter& mu = {}) const override;
    std::optional<RestrictedOperator> restricted(std::span<const std::size_t> dofs) const override;

   private:
    std::vector<OperatorPtr> operators_;
    std::vector<ParameterFunctional> coefficients_;
};

struct AffineTerm
{
    ParameterFunctional coefficient;
    OperatorPtr op;
};

/// Flattened affine decomposition: nested lincombs are expanded with product
/// coefficients; any other operator is a single term with coefficient 1.
std::vector<AffineTerm> affine_terms(const OperatorPtr& op);

/// <A[i], P B[j]>, with P the identity when `product` is null.
Matrix inner(const VectorArray& A, const VectorArray& B, const Operator* product = nullptr);

/// Product norms sqrt(<A[i], P A[i]>).
Vector norms(const VectorArray& A, const Operator* product = nullptr);

/// Sum of theta_q(mu) B_q as a single matrix. Throws NotSupported if a leaf is
/// not a matrix.
std::shared_ptr<const MatrixOperator> lincomb_assemble(const OperatorPtr& op, const Parameter& mu = {});

OperatorPtr make_lincomb(std::vector<OperatorPtr> operators, std::vector<ParameterFunctional> coefficients);

/// Solves A x = b with Jacobi-preconditioned CG. Returns the iteration count;
/// throws SolverError carrying the final relative residual on failure.
std::size_t pcg_solve(const CsrMatrix& A, std::span<const double> b, std::span<double> x, double rel_tol,
                      std::size_t max_iter);

}  // namespace morkit
