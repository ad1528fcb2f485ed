#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "morkit/models.hpp"
#include "morkit/operators.hpp"

namespace morkit::toolbox
{

/// -div(a_mu grad u) = 1 on the unit square, u = 0 on the boundary, with
/// a_mu = sum_q mu_q * chi_q over blocks_x x blocks_y rectangular blocks.
struct ThermalBlockProblem
{
    std::size_t blocks_x = 2;
    std::size_t blocks_y = 2;
    /// maximal triangle diameter
    double diameter = 1.0 / 32.0;
    double low = 0.1;
    double high = 1.0;
};

/// Structured P1 mesh: n x n squares, each split along the (i,j)-(i+1,j+1)
/// diagonal. Interior node (i, j), 1 <= i, j < n, is DOF (j-1)(n-1) + (i-1).
struct StructuredMesh
{
    std::size_t n = 0;

    std::size_t dofs() const { return (n - 1) * (n - 1); }
    double h() const { return 1.0 / static_cast<double>(n); }

    /// DOF of node (i, j) or -1 for boundary nodes.
    long dof(std::size_t i, std::size_t j) const;

    /// P1 interpolant of the DOF vector `u` at (x, y).
    double evaluate(std::span<const double> u, double x, double y) const;
};

struct ThermalBlockDiscretization
{
    std::shared_ptr<const StationaryModel> model;
    /// sum of the block stiffness matrices (H^1_0 seminorm)
    OperatorPtr h1_0_semi;
    /// P1 mass matrix
    OperatorPtr l2;
    StructuredMesh mesh;
    ThermalBlockProblem problem;
};

/// Parameter component "diffusion" with shape {blocks_x, blocks_y}; block
/// (i, j) (i along x) has flat index i * blocks_y + j. Elements are assigned
/// to blocks by their barycenter. Products: "h1_0_semi", "l2", "h1".
ThermalBlockDiscretization discretize_thermal_block(const ThermalBlockProblem& problem);

/// u(1/2, 1/2) for -laplace u = 1 on the unit square (Fourier series).
double poisson_center_value(std::size_t terms = 200);

}  // namespace morkit::toolbox
