#include <doctest.h>

#include <cmath>

#include "morkit/errors.hpp"
#include "morkit/models.hpp"
#include "morkit/operators.hpp"
#include "morkit/parameters.hpp"
#include "morkit/vector_array.hpp"

using namespace morkit;

namespace
{
DenseVectorArray rows(std::initializer_list<std::vector<double>> r)
{
    std::vector<std::vector<double>> v(r);
    return DenseVectorArray::from_vectors(v, v.empty() ? 0 : v.front().size());
}

ParameterSpace unit_space(std::size_t n)
{
    return ParameterSpace({{"mu", ParameterRange{{n}, 0.1, 1.0}}});
}
}  // namespace

TEST_CASE("sample_uniformly grid and ordering")
{
    auto s1 = ParameterSpace({{"a", ParameterRange{{1}, 0.1, 1.0}}});
    auto two = s1.sample_uniformly(2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].at("a")[0] == 0.1);
    CHECK(two[1].at("a")[0] == 1.0);

    auto three = s1.sample_uniformly(3);
    CHECK(three[1].at("a")[0] == doctest::Approx(0.55).epsilon(1e-15));

    auto one = s1.sample_uniformly(1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].at("a")[0] == 0.1);

    auto grid = unit_space(2).sample_uniformly(3);
    REQUIRE(grid.size() == 9);
    // first dimension slowest
    CHECK(grid[0].at("mu") == std::vector<double>{0.1, 0.1});
    CHECK(grid[1].at("mu") == std::vector<double>{0.1, 0.55});
    CHECK(grid[3].at("mu") == std::vector<double>{0.55, 0.1});
}

TEST_CASE("sample_randomly determinism and containment")
{
    auto space = unit_space(2);
    CHECK(space.sample_randomly(0, 1).empty());
    auto a = space.sample_randomly(10, 77);
    auto b = space.sample_randomly(10, 77);
    CHECK(a == b);
    for (const auto& mu : a) CHECK(space.contains(mu));
    CHECK(space.sample_randomly(10, 78) != a);
}

TEST_CASE("parameter rejects non-finite values")
{
    CHECK_THROWS_AS(Parameter({{"x", {std::nan("")}}}), InvalidArgument);
    CHECK_THROWS_AS(Parameter({{"x", {INFINITY}}}), InvalidArgument);
}

TEST_CASE("parameter functionals")
{
    Parameter mu({{"d", {0.5, 0.2, 0.9}}});
    CHECK(ParameterFunctional::projection("d", 1).evaluate(mu) == 0.2);
    CHECK(ParameterFunctional::min_of("d").evaluate(mu) == 0.2);
    CHECK(ParameterFunctional::max_of("d").evaluate(mu) == 0.9);
    CHECK(ParameterFunctional::constant(3.0).evaluate(mu) == 3.0);
    auto prod = ParameterFunctional::product({ParameterFunctional::constant(2.0), ParameterFunctional::projection("d", 0)});
    CHECK(prod.evaluate(mu) == 1.0);
    CHECK_THROWS_AS(ParameterFunctional::projection("e", 0).evaluate(mu), MissingParameter);
    auto back = ParameterFunctional::from_json(prod.to_json());
    CHECK(back.evaluate(mu) == 1.0);
}

TEST_CASE("va_lincomb")
{
    auto A = rows({{1, 0}, {0, 1}});
    Matrix c(1, 2);
    c << 2, 3;
    auto r = A.lincomb(c);
    CHECK(r->dofs(std::vector<std::size_t>{0, 1}) == (Matrix(1, 2) << 2, 3).finished());
    auto copy = A.lincomb(Matrix::Identity(2, 2));
    CHECK(copy->dofs(std::vector<std::size_t>{0, 1}) == A.to_matrix());
    auto zero = A.lincomb(Matrix::Zero(1, 2));
    CHECK(zero->norms()[0] == 0.0);
    CHECK_THROWS_AS(A.lincomb(Matrix::Zero(1, 3)), DimensionMismatch);
}

TEST_CASE("va_axpy")
{
    auto A = rows({{1, 1}});
    auto X = rows({{3, 4}});
    A.axpy(2.0, X);
    CHECK(A.to_matrix() == (Matrix(1, 2) << 7, 9).finished());
    A.axpy(0.0, X);
    CHECK(A.to_matrix() == (Matrix(1, 2) << 7, 9).finished());
    auto B = A.copy();
    A.axpy(-1.0, *B);
    CHECK(A.norms()[0] == 0.0);

    auto many = rows({{1, 0}, {0, 1}});
    many.axpy(1.0, X);  // broadcast
    CHECK(many.to_matrix() == (Matrix(2, 2) << 4, 4, 3, 5).finished());
    CHECK_THROWS_AS(many.axpy(1.0, rows({{1, 0}, {0, 1}, {1, 1}})), DimensionMismatch);
}

TEST_CASE("va_inner and va_dofs")
{
    auto A = rows({{1, 0}, {1, 1}});
    CHECK(A.inner(A) == (Matrix(2, 2) << 1, 1, 1, 2).finished());
    auto empty = A.zeros(0);
    CHECK(A.inner(*empty).cols() == 0);
    auto B = rows({{5, 7}});
    CHECK(B.dofs(std::vector<std::size_t>{1})(0, 0) == 7.0);
    CHECK(B.dofs(std::vector<std::size_t>{}).cols() == 0);
    CHECK_THROWS_AS(B.dofs(std::vector<std::size_t>{2}), IndexOutOfRange);

    ListVectorArray L = ListVectorArray::from_dense(A);
    CHECK(L.inner(L) == A.inner(A));
}

TEST_CASE("operators apply, apply2, inverse")
{
    auto diag = std::make_shared<MatrixOperator>(Matrix((Matrix(2, 2) << 2, 0, 0, 3).finished()));
    auto U = rows({{1, 1}});
    CHECK(diag->apply(U)->dofs(std::vector<std::size_t>{0, 1}) == (Matrix(1, 2) << 2, 3).finished());

    auto id = std::make_shared<IdentityOperator>(2);
    auto lc = make_lincomb({id, id}, {ParameterFunctional::constant(1.0), ParameterFunctional::constant(2.0)});
    CHECK(lc->apply(U)->dofs(std::vector<std::size_t>{0, 1}) == (Matrix(1, 2) << 3, 3).finished());

    auto two_i = std::make_shared<MatrixOperator>(CsrMatrix::identity(2).scaled(2.0));
    auto inv = two_i->apply_inverse(rows({{4, 6}}));
    CHECK(inv->dofs(std::vector<std::size_t>{0, 1}) == (Matrix(1, 2) << 2, 3).finished());

    Matrix M = (Matrix(2, 2) << 1, 2, 3, 4).finished();
    auto mop = std::make_shared<MatrixOperator>(M);
    auto V = rows({{1, 2}, {0, 1}});
    auto W = rows({{1, -1}, {2, 0}});
    const Matrix oracle = V.to_matrix() * M * W.to_matrix().transpose();
    CHECK((mop->apply2(V, W) - oracle).norm() < 1e-14);
    CHECK(std::make_shared<ZeroOperator>(2, 2)->apply2(V, W).norm() == 0.0);
}

TEST_CASE("nested lincomb assembles to flat sum")
{
    Matrix B1 = Matrix::Random(4, 4), B2 = Matrix::Random(4, 4), B3 = Matrix::Random(4, 4);
    auto o1 = std::make_shared<MatrixOperator>(B1);
    auto o2 = std::make_shared<MatrixOperator>(B2);
    auto o3 = std::make_shared<MatrixOperator>(B3);
    auto inner_lc = make_lincomb({o1, o2}, {ParameterFunctional::constant(1.0), ParameterFunctional::constant(1.0)});
    auto outer = make_lincomb({inner_lc, o3}, {ParameterFunctional::projection("t", 0), ParameterFunctional::constant(1.0)});
    Parameter mu({{"t", {2.0}}});
    auto assembled = lincomb_assemble(outer, mu);
    CHECK((assembled->to_dense() - (2 * B1 + 2 * B2 + B3)).cwiseAbs().maxCoeff() < 1e-14);

    auto U = DenseVectorArray::from_rows(Matrix::Random(3, 4));
    const Matrix a = outer->apply(U, mu)->dofs(std::vector<std::size_t>{0, 1, 2, 3});
    const Matrix b = assembled->apply(U)->dofs(std::vector<std::size_t>{0, 1, 2, 3});
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * b.cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(outer->apply(U), MissingParameter);
}

TEST_CASE("inner with product is symmetric PSD")
{
    Matrix R = Matrix::Random(6, 6);
    Matrix P = R * R.transpose() + Matrix::Identity(6, 6);
    MatrixOperator prod(P);
    auto A = DenseVectorArray::from_rows(Matrix::Random(4, 6));
    const Matrix G = inner(A, A, &prod);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * G.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
}

TEST_CASE("sparse direct and PCG inverses agree")
{
    std::vector<Triplet> t;
    const std::size_t n = 50;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back({i, i, 2.5});
        if (i > 0) t.push_back({i, i - 1, -1.0});
        if (i + 1 < n) t.push_back({i, i + 1, -1.0});
    }
    auto op = std::make_shared<MatrixOperator>(CsrMatrix::from_triplets(n, n, t));
    auto V = DenseVectorArray::from_rows(Matrix::Random(2, static_cast<Eigen::Index>(n)));
    SolverOptions cg;
    cg.method = SolverOptions::Method::cg;
    auto x1 = op->apply_inverse(V);
    auto x2 = op->apply_inverse(V, {}, cg);
    auto r = op->apply(*x1);
    r->axpy(-1.0, V);
    CHECK(r->norms().maxCoeff() <= 1e-12 * V.norms().maxCoeff());
    x2->axpy(-1.0, *x1);
    CHECK(x2->norms().maxCoeff() <= 1e-9);

    auto singular = std::make_shared<MatrixOperator>(Matrix(Matrix::Zero(2, 2)));
    CHECK_THROWS_AS(singular->apply_inverse(rows({{1, 1}})), SolverError);
}

TEST_CASE("model_solve consistency with known solution")
{
    Matrix M = (Matrix(3, 3) << 4, 1, 0, 1, 3, 1, 0, 1, 2).finished();
    auto op = std::make_shared<MatrixOperator>(M);
    Vector w(3);
    w << 1, -2, 0.5;
    auto rhs = std::make_shared<VectorOperator>(std::make_shared<DenseVectorArray>(dense_from_vector(M * w)));
    StationaryModel model(op, rhs, {}, ParameterSpace{});
    auto u = model.solve({});
    CHECK((Vector(u->dofs(std::vector<std::size_t>{0, 1, 2}).row(0).transpose()) - w).norm() < 1e-13);
}

TEST_CASE("explicit_euler basics")
{
    auto zero = std::make_shared<ZeroOperator>(3, 3);
    auto u0 = rows({{1, 2, 3}});
    auto traj = explicit_euler(*zero, nullptr, u0, 1.0, 4);
    REQUIRE(traj->len() == 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK(traj->dofs(std::vector<std::size_t>{2})(static_cast<Eigen::Index>(k), 0) == 3.0);

    auto lam = std::make_shared<MatrixOperator>(CsrMatrix::identity(3).scaled(2.0));
    auto one = explicit_euler(*lam, nullptr, u0, 0.1, 1);
    CHECK(one->dofs(std::vector<std::size_t>{1})(1, 0) == doctest::Approx((1 - 0.1 * 2.0) * 2.0).epsilon(1e-15));

    auto blow = std::make_shared<MatrixOperator>(CsrMatrix::identity(3).scaled(-1e308));
    CHECK_THROWS_AS(explicit_euler(*blow, nullptr, u0, 10.0, 10), SolverError);
}
