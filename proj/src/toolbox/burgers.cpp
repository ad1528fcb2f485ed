#include "morkit/toolbox/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "morkit/errors.hpp"

namespace morkit::toolbox
{

namespace
{
double flux(double u, double mu) { return std::copysign(std::pow(std::abs(u), mu), u); }

double flux_derivative(double u, double mu) { return u == 0.0 && mu > 1.0 ? 0.0 : mu * std::pow(std::abs(u), mu - 1.0); }

double exponent_of(const Parameter& mu)
{
    const auto& e = mu.at("exponent");
    if (e.size() != 1) throw InvalidArgument("burgers: parameter 'exponent' must be scalar");
    return e[0];
}
}  // namespace

BurgersOperator::BurgersOperator(std::size_t source_dim, std::vector<FvStencil> stencils, std::size_t axes,
                                 std::array<double, 2> v, std::array<double, 2> lambda, std::array<double, 2> widths)
    : Operator(source_dim, stencils.size()),
      stencils_(std::move(stencils)),
      axes_(axes),
      v_(v),
      lambda_(lambda),
      widths_(widths)
{
    if (axes_ < 1 || axes_ > 2) throw InvalidArgument("burgers: 1 or 2 axes supported");
    for (const auto& s : stencils_) {
        bool ok = s.center < source_dim;
        for (std::size_t a = 0; a < axes_; ++a) ok = ok && s.lower[a] < source_dim && s.upper[a] < source_dim;
        if (!ok) throw IndexOutOfRange("burgers: stencil index out of range");
    }
}

double BurgersOperator::divergence(const double* u, const FvStencil& s, double mu) const
{
    double value = 0.0;
    for (std::size_t a = 0; a < axes_; ++a) {
        const double uc = u[s.center], ul = u[s.lower[a]], uh = u[s.upper[a]];
        // both faces use the same operand order so neighbouring cells see bitwise equal fluxes
        const double f_upper = 0.5 * v_[a] * (flux(uc, mu) + flux(uh, mu)) - 0.5 * lambda_[a] * (uh - uc);
        const double f_lower = 0.5 * v_[a] * (flux(ul, mu) + flux(uc, mu)) - 0.5 * lambda_[a] * (uc - ul);
        value += (f_upper - f_lower) / widths_[a];
    }
    return value;
}

std::unique_ptr<VectorArray> BurgersOperator::apply(const VectorArray& U, const Parameter& mu) const
{
    check_source(U, "apply");
    const double e = exponent_of(mu);
    const auto* local = dynamic_cast<const LocalVectorArray*>(&U);
    if (!local) throw NotSupported("burgers: operator requires an in-process vector array");
    auto out = std::make_unique<DenseVectorArray>(range_dim(), U.len());
    const auto n = static_cast<std::ptrdiff_t>(stencils_.size());
    for (std::size_t k = 0; k < U.len(); ++k) {
        const double* u = local->vec(k).data();
        double* y = out->vec(k).data();
#pragma omp parallel for schedule(static) if (n > 4096)
        for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = divergence(u, stencils_[static_cast<std::size_t>(i)], e);
    }
    return out;
}

OperatorPtr BurgersOperator::jacobian(const VectorArray& U, const Parameter& mu) const
{
    check_source(U, "jacobian");
    if (U.len() != 1) throw InvalidArgument("burgers: jacobian needs a single vector");
    const double e = exponent_of(mu);
    const auto row = U.dofs([&] {
        std::vector<std::size_t> all(source_dim());
        std::iota(all.begin(), all.end(), 0);
        return all;
    }());
    std::vector<Triplet> t;
    for (std::size_t k = 0; k < stencils_.size(); ++k) {
        const auto& s = stencils_[k];
        for (std::size_t a = 0; a < axes_; ++a) {
            const double w = widths_[a];
            t.push_back({k, s.center, lambda_[a] / w});
            t.push_back({k, s.upper[a], (0.5 * v_[a] * flux_derivative(row(0, static_cast<Eigen::Index>(s.upper[a])), e) - 0.5 * lambda_[a]) / w});
            t.push_back({k, s.lower[a], (-0.5 * v_[a] * flux_derivative(row(0, static_cast<Eigen::Index>(s.lower[a])), e) - 0.5 * lambda_[a]) / w});
        }
    }
    return std::make_shared<MatrixOperator>(CsrMatrix::from_triplets(range_dim(), source_dim(), std::move(t)));
}

std::optional<RestrictedOperator> BurgersOperator::restricted(std::span<const std::size_t> dofs) const
{
    RestrictedOperator r;
    r.range_dofs.assign(dofs.begin(), dofs.end());
    for (auto d : dofs) {
        if (d >= range_dim()) throw IndexOutOfRange("restricted: dof out of range");
        const auto& s = stencils_[d];
        r.source_dofs.push_back(s.center);
        for (std::size_t a = 0; a < axes_; ++a) {
            r.source_dofs.push_back(s.lower[a]);
            r.source_dofs.push_back(s.upper[a]);
        }
    }
    std::sort(r.source_dofs.begin(), r.source_dofs.end());
    r.source_dofs.erase(std::unique(r.source_dofs.begin(), r.source_dofs.end()), r.source_dofs.end());
    auto local = [&](std::size_t g) {
        return static_cast<std::size_t>(std::lower_bound(r.source_dofs.begin(), r.source_dofs.end(), g) - r.source_dofs.begin());
    };
    std::vector<FvStencil> sub;
    for (auto d : dofs) {
        const auto& s = stencils_[d];
        FvStencil l{local(s.center), {0, 0}, {0, 0}};
        for (std::size_t a = 0; a < axes_; ++a) {
            l.lower[a] = local(s.lower[a]);
            l.upper[a] = local(s.upper[a]);
        }
        sub.push_back(l);
    }
    r.op = std::make_shared<BurgersOperator>(r.source_dofs.size(), std::move(sub), axes_, v_, lambda_, widths_);
    return r;
}

BurgersDiscretization discretize_burgers(const BurgersProblem& problem)
{
    if (problem.dim != 1 && problem.dim != 2) throw InvalidArgument("burgers: dim must be 1 or 2");
    if (problem.cells_x < 2 || (problem.dim == 2 && problem.cells_y < 2))
        throw InvalidArgument("burgers: at least 2 cells per axis required");
    if (problem.nt < 1 || !(problem.T > 0.0)) throw InvalidArgument("burgers: T > 0 and nt >= 1 required");
    if (!(problem.exponent_low <= problem.exponent_high)) throw InvalidArgument("burgers: empty exponent range");

    const std::size_t nx = problem.cells_x;
    const std::size_t ny = problem.dim == 2 ? problem.cells_y : 1;
    const std::array<double, 2> widths{2.0 / static_cast<double>(nx), 1.0 / static_cast<double>(ny)};
    std::array<double, 2> lambda{2.0 * std::abs(problem.v[0]), 2.0 * std::abs(problem.v[1])};
    if (problem.lambda) lambda = *problem.lambda;

    std::vector<FvStencil> stencils;
    BurgersDiscretization result;
    std::vector<double> u0;
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            FvStencil s{j * nx + i, {j * nx + (i + nx - 1) % nx, 0}, {j * nx + (i + 1) % nx, 0}};
            if (problem.dim == 2) {
                s.lower[1] = ((j + ny - 1) % ny) * nx + i;
                s.upper[1] = ((j + 1) % ny) * nx + i;
            }
            stencils.push_back(s);
            const double x = (static_cast<double>(i) + 0.5) * widths[0];
            const double y = (static_cast<double>(j) + 0.5) * widths[1];
            result.centers.push_back({x, y});
            double prod = std::sin(2.0 * std::numbers::pi * x);
            if (problem.dim == 2) prod *= std::sin(2.0 * std::numbers::pi * y);
            u0.push_back(0.5 * (1.0 + prod));
        }
    const std::size_t n = nx * ny;
    result.cell_volume = problem.dim == 2 ? widths[0] * widths[1] : widths[0];
    result.problem = problem;
    result.op = std::make_shared<BurgersOperator>(n, std::move(stencils), problem.dim, problem.v, lambda, widths);
    result.l2 = std::make_shared<MatrixOperator>(CsrMatrix::identity(n).scaled(result.cell_volume));

    ParameterSpace space({{"exponent", ParameterRange{{1}, problem.exponent_low, problem.exponent_high}}});
    auto initial = std::make_shared<DenseVectorArray>(n, std::move(u0));
    result.model = std::make_shared<InstationaryModel>(result.op, nullptr, std::move(initial), problem.T, problem.nt,
                                                       std::map<std::string, OperatorPtr>{{"l2", result.l2}},
                                                       std::move(space));
    return result;
}

double total_mass(std::span<const double> u, double cell_volume)
{
    double sum = 0.0;
    for (double x : u) sum += x;
    return sum * cell_volume;
}

}  // namespace morkit::toolbox
