#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "morkit/models.hpp"
#include "morkit/operators.hpp"

namespace morkit::toolbox
{

/// u_t + div(v * u^mu) = 0 on a periodic box ([0,2] in 1D, [0,2] x [0,1] in
/// 2D), u(0) = (1 + prod_i sin(2 pi x_i)) / 2, mu in [1, 2].
struct BurgersProblem
{
    std::size_t dim = 1;
    std::size_t cells_x = 500;
    std::size_t cells_y = 60;
    std::array<double, 2> v = {1.0, 1.0};
    double exponent_low = 1.0;
    double exponent_high = 2.0;
    double T = 0.3;
    std::size_t nt = 600;
    /// Lax-Friedrichs viscosity per axis; default 2 |v_axis|, the bound of
    /// |f'(u)| for u in [0, 1] and mu <= 2
    std::optional<std::array<double, 2>> lambda;
};

/// Cell k and its lower/upper neighbours per axis.
struct FvStencil
{
    std::size_t center;
    std::array<std::size_t, 2> lower;
    std::array<std::size_t, 2> upper;
};

/// Lax-Friedrichs FV divergence of the flux v * sign(u)|u|^mu. The flux
/// uses the odd extension so slightly negative (reduced) states stay finite.
///
/// One instance covers both the full operator and its restrictions: the
/// stencil indices refer to the operator's own source space.
class BurgersOperator final : public Operator
{
   public:
    BurgersOperator(std::size_t source_dim, std::vector<FvStencil> stencils, std::size_t axes,
                    std::array<double, 2> v, std::array<double, 2> lambda, std::array<double, 2> widths);

    bool linear() const override { return false; }
    bool parametric() const override { return true; }
    std::string kind() const override { return "burgers_fv"; }

    std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu = {}) const override;
    OperatorPtr jacobian(const VectorArray& U, const Parameter& mu = {}) const override;
    std::optional<RestrictedOperator> restricted(std::span<const std::size_t> dofs) const override;

    const std::vector<FvStencil>& stencils() const { return stencils_; }

   private:
    double divergence(const double* u, const FvStencil& s, double mu) const;

    std::vector<FvStencil> stencils_;
    std::size_t axes_;
    std::array<double, 2> v_;
    std::array<double, 2> lambda_;
    std::array<double, 2> widths_;
};

struct BurgersDiscretization
{
    std::shared_ptr<const InstationaryModel> model;
    std::shared_ptr<const BurgersOperator> op;
    /// cell volume times identity
    OperatorPtr l2;
    BurgersProblem problem;
    double cell_volume = 0.0;
    std::vector<std::array<double, 2>> centers;
};

/// Parameter component "exponent" with shape {1}. Cell (i, j) is DOF
/// j * cells_x + i.
BurgersDiscretization discretize_burgers(const BurgersProblem& problem);

/// sum_i u_i |cell|
double total_mass(std::span<const double> u, double cell_volume);

}  // namespace morkit::toolbox
