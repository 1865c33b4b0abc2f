#pragma once

#include <vector>

#include "sts/core.hpp"
#include "sts/propagator.hpp"

namespace sts {

/// Complex Lagrangian density per (t, x), x-major.
struct LagrangianDensityField {
  TimeGrid tgrid;
  SpaceGrid xgrid;
  std::vector<cplx> values;

  const cplx& at(std::size_t it, std::size_t ix) const { return values[ix * tgrid.size() + it]; }
};

enum class Stencil { second_order, fourth_order };

/// L = phi^dagger [sigma_z sqrt(2m(eps - V)) + (q/c) A + i hbar d/dx] phi, with
/// the bracket applied mode by mode in the energy representation and summed
/// back to time. d/dx uses the chosen centred stencil, dropping to second
/// order next to the edges and one-sided at the edges. Needs >= 5 uniform
/// space points.
LagrangianDensityField lagrangian_density(const ScField& field, const PotentialSpec& v, const EnergyGrid& egrid,
                                          const PhysicalConstants& constants = {},
                                          Stencil stencil = Stencil::fourth_order);
LagrangianDensityField lagrangian_density(const ScField& field, const EMFieldSpec& em, const EnergyGrid& egrid,
                                          Stencil stencil = Stencil::fourth_order);

/// sup |L| over positions at least `edge` cells from either end.
double interior_sup(const LagrangianDensityField& l, std::size_t edge = 2);

/// Residual of the Euler-Lagrange equation i hbar d(phi^dagger)/dx - phi^dagger sigma_z p = 0,
/// conjugated back to the SC equation. The x-derivative is taken directly on
/// the time-domain field before transforming, so this is an independent route
/// to the same quantity sc_residual computes.
ResidualReport euler_lagrange_residual(const ScField& field, const PotentialSpec& v, const EnergyGrid& egrid,
                                       const PhysicalConstants& constants = {});
ResidualReport euler_lagrange_residual(const ScField& field, const EMFieldSpec& em, const EnergyGrid& egrid);

}  // namespace sts
