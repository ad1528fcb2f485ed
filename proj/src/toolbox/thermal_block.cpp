#include "morkit/toolbox/thermal_block.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "morkit/errors.hpp"

namespace morkit::toolbox
{

long StructuredMesh::dof(std::size_t i, std::size_t j) const
{
    if (i == 0 || j == 0 || i >= n || j >= n) return -1;
    return static_cast<long>((j - 1) * (n - 1) + (i - 1));
}

double StructuredMesh::evaluate(std::span<const double> u, double x, double y) const
{
    if (u.size() != dofs()) throw DimensionMismatch("evaluate: vector length != number of DOFs");
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) throw InvalidArgument("evaluate: point outside the unit square");
    const double nd = static_cast<double>(n);
    const auto i = std::min(static_cast<std::size_t>(x * nd), n - 1);
    const auto j = std::min(static_cast<std::size_t>(y * nd), n - 1);
    const double s = x * nd - static_cast<double>(i);
    const double t = y * nd - static_cast<double>(j);
    auto value = [&](std::size_t a, std::size_t b) {
        const long d = dof(a, b);
        return d < 0 ? 0.0 : u[static_cast<std::size_t>(d)];
    };
    const double u00 = value(i, j), u10 = value(i + 1, j), u11 = value(i + 1, j + 1), u01 = value(i, j + 1);
    if (s >= t) return u00 + s * (u10 - u00) + t * (u11 - u10);  // lower triangle
    return u00 + t * (u01 - u00) + s * (u11 - u01);
}

ThermalBlockDiscretization discretize_thermal_block(const ThermalBlockProblem& problem)
{
    if (problem.blocks_x == 0 || problem.blocks_y == 0) throw InvalidArgument("thermal block: block counts must be >= 1");
    if (!(problem.diameter > 0.0) || !std::isfinite(problem.diameter))
        throw InvalidArgument("thermal block: diameter must be positive");
    if (!(problem.low <= problem.high)) throw InvalidArgument("thermal block: low > high");

    StructuredMesh mesh;
    mesh.n = static_cast<std::size_t>(std::ceil(std::numbers::sqrt2 / problem.diameter - 1e-12));
    if (mesh.n < 2) throw InvalidArgument("thermal block: mesh too coarse, no interior nodes");
    const std::size_t n = mesh.n;
    const std::size_t dofs = mesh.dofs();
    const double h = mesh.h();
    const std::size_t Q = problem.blocks_x * problem.blocks_y;

    std::vector<std::vector<Triplet>> stiffness(Q);
    std::vector<Triplet> mass;
    std::vector<double> load(dofs, 0.0);

    const double area = 0.5 * h * h;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const std::array<std::array<std::array<std::size_t, 2>, 3>, 2> triangles{{
                {{{i, j}, {i + 1, j}, {i + 1, j + 1}}},
                {{{i, j}, {i + 1, j + 1}, {i, j + 1}}},
            }};
            for (const auto& tri : triangles) {
                double bx = 0.0, by = 0.0;
                std::array<double, 3> px{}, py{};
                std::array<long, 3> d{};
                for (int a = 0; a < 3; ++a) {
                    px[a] = static_cast<double>(tri[a][0]) * h;
                    py[a] = static_cast<double>(tri[a][1]) * h;
                    bx += px[a] / 3.0;
                    by += py[a] / 3.0;
                    d[a] = mesh.dof(tri[a][0], tri[a][1]);
                }
                const auto qi = std::min(static_cast<std::size_t>(bx * static_cast<double>(problem.blocks_x)), problem.blocks_x - 1);
                const auto qj = std::min(static_cast<std::size_t>(by * static_cast<double>(problem.blocks_y)), problem.blocks_y - 1);
                const std::size_t q = qi * problem.blocks_y + qj;

                // grad phi_a = (y_b - y_c, x_c - x_b) / (2 area), (a, b, c) cyclic
                std::array<double, 3> gx{}, gy{};
                for (int a = 0; a < 3; ++a) {
                    const int b = (a + 1) % 3, c = (a + 2) % 3;
                    gx[a] = (py[b] - py[c]) / (2.0 * area);
                    gy[a] = (px[c] - px[b]) / (2.0 * area);
                }
                for (int a = 0; a < 3; ++a) {
                    if (d[a] < 0) continue;
                    const auto ra = static_cast<std::size_t>(d[a]);
                    load[ra] += area / 3.0;
                    for (int b = 0; b < 3; ++b) {
                        if (d[b] < 0) continue;
                        const auto cb = static_cast<std::size_t>(d[b]);
                        stiffness[q].push_back({ra, cb, area * (gx[a] * gx[b] + gy[a] * gy[b])});
                        mass.push_back({ra, cb, area / 12.0 * (a == b ? 2.0 : 1.0)});
                    }
                }
            }
        }

    std::vector<OperatorPtr> ops;
    std::vector<ParameterFunctional> coeffs;
    CsrMatrix semi = CsrMatrix::from_triplets(dofs, dofs, {});
    for (std::size_t q = 0; q < Q; ++q) {
        auto m = CsrMatrix::from_triplets(dofs, dofs, std::move(stiffness[q]));
        semi = semi.add(m);
        ops.push_back(std::make_shared<MatrixOperator>(std::move(m)));
        coeffs.push_back(ParameterFunctional::projection("diffusion", q));
    }
    auto mass_matrix = CsrMatrix::from_triplets(dofs, dofs, std::move(mass));
    auto h1 = semi.add(mass_matrix);

    ThermalBlockDiscretization result;
    result.mesh = mesh;
    result.problem = problem;
    result.h1_0_semi = std::make_shared<MatrixOperator>(std::move(semi));
    result.l2 = std::make_shared<MatrixOperator>(std::move(mass_matrix));

    auto rhs = std::make_shared<VectorOperator>(std::make_shared<DenseVectorArray>(dofs, std::move(load)));
    std::map<std::string, OperatorPtr> products{
        {"h1_0_semi", result.h1_0_semi}, {"l2", result.l2}, {"h1", std::make_shared<MatrixOperator>(std::move(h1))}};
    ParameterSpace space({{"diffusion", ParameterRange{{problem.blocks_x, problem.blocks_y}, problem.low, problem.high}}});
    result.model = std::make_shared<StationaryModel>(make_lincomb(std::move(ops), std::move(coeffs)), rhs,
                                                     std::move(products), std::move(space));
    return result;
}

double poisson_center_value(std::size_t terms)
{
    // u(x,y) = sum_{m,n odd} 16 / (pi^4 m n (m^2 + n^2)) sin(m pi x) sin(n pi y)
    const double pi4 = std::pow(std::numbers::pi, 4);
    double sum = 0.0;
    for (std::size_t m = 1; m <= 2 * terms; m += 2)
        for (std::size_t k = 1; k <= 2 * terms; k += 2) {
            const double md = static_cast<double>(m), kd = static_cast<double>(k);
            const double sign = (((m - 1) / 2 + (k - 1) / 2) % 2 == 0) ? 1.0 : -1.0;  // sin(m pi/2) sin(k pi/2)
            sum += sign * 16.0 / (pi4 * md * kd * (md * md + kd * kd));
        }
    return sum;
}

}  // namespace morkit::toolbox
