#pragma once

#include <vector>

#include "sts/core.hpp"
#include "sts/energy_rep.hpp"
#include "sts/propagator.hpp"

namespace sts::detail {

// Potential energy and (q/c) A sampled on the space grid.
struct LocalTerms {
  std::vector<double> v;
  std::vector<double> a_term;
  double mass = 1.0;
  double hbar = 1.0;
};

LocalTerms local_terms(const PotentialSpec& v, const SpaceGrid& xgrid, const PhysicalConstants& constants);
LocalTerms local_terms(const EMFieldSpec& em, const SpaceGrid& xgrid);

// Energy representation of every x slice, x-major (ix * n + j).
std::vector<SpinorAmplitude> energy_columns(const ScField& field, const SpectralTransform& transform);

// sigma_z p C + a_term C for one mode.
inline SpinorAmplitude pamiltonian_apply(double eps, double v, double a_term, double mass,
                                         const SpinorAmplitude& c) {
  const cplx p = local_momentum(eps, v, mass);
  return {(p + a_term) * c.plus, (-p + a_term) * c.minus};
}

// Throws ValidationError unless the x grid is uniform with at least `min_points`.
double require_uniform_spacing(const SpaceGrid& xgrid, std::size_t min_points, const char* what);

}  // namespace sts::detail
