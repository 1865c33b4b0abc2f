#pragma once

#include <functional>
#include <optional>

#include "sts/core.hpp"
#include "sts/propagator.hpp"

namespace sts {

/// Gauge function F(x, t) = f(x) + alpha t.
///
/// Only this family keeps the transformed scalar potential time independent.
/// alpha is quantized: q alpha / c must be an integer number of energy bins.
class GaugeFunction {
 public:
  // `fd_step` is the central-difference step used for f' when no analytic
  // derivative is given (typically the local space-grid spacing).
  GaugeFunction(std::function<double(double)> f, std::optional<std::function<double(double)>> df,
                double alpha, double fd_step, const EnergyGrid& egrid, const PhysicalConstants& constants);

  static GaugeFunction constant(double c0, const EnergyGrid& egrid, const PhysicalConstants& constants = {});
  // f(x) = c0 + c1 x + c2 x^2, analytic derivative.
  static GaugeFunction polynomial(double c0, double c1, double c2, double alpha, const EnergyGrid& egrid,
                                  const PhysicalConstants& constants = {});

  double f(double x) const { return f_(x); }
  double df(double x) const;
  double alpha() const { return alpha_; }
  double operator()(double x, double t) const { return f_(x) + alpha_ * t; }
  // q alpha / (c d_eps), an integer.
  long energy_shift_bins() const { return shift_bins_; }
  const EnergyGrid& egrid() const { return egrid_; }

  // F1 + F2, for the group property.
  friend GaugeFunction compose(const GaugeFunction& g1, const GaugeFunction& g2);

 private:
  std::function<double(double)> f_;
  std::optional<std::function<double(double)>> df_;
  double alpha_;
  double fd_step_;
  EnergyGrid egrid_;
  PhysicalConstants constants_;
  long shift_bins_ = 0;
};

/// Phi' = Phi - (1/c) dF/dt, A' = A + dF/dx.
EMFieldSpec transform_potentials(const EMFieldSpec& em, const GaugeFunction& g);

/// phi' = exp(i q F(x, t) / (hbar c)) phi, pointwise on both components.
ScField apply_unitary(const ScField& field, const GaugeFunction& g, const PhysicalConstants& constants = {});

/// Energy translation realizing multiplication by exp(i q alpha t / (hbar c)):
/// C'(eps_j) = C(eps_{j+k}) with k = q alpha / (c d_eps). Throws
/// ValidationError when the mass leaving the grid is >= 1e-10.
EnergySpectrum shift_spectrum(const EnergySpectrum& spec, const GaugeFunction& g,
                              const PhysicalConstants& constants = {});

struct GaugeScenario {
  EnergySpectrum boundary;  // at the space-grid anchor, under (Phi, A)
  EMFieldSpec em;
  GaugeFunction gauge;
  TimeGrid tgrid;
  SpaceGrid xgrid;
  PropagateOptions propagate{};
  PhaseOptions phase{};
};

struct GaugeReport {
  double max_density_diff = 0.0;     // max |rho' - rho|
  double max_covariance_diff = 0.0;  // max |phi' - U phi|
  double max_density = 0.0;
};

/// Propagates under (Phi, A) and under the gauge-transformed potentials from
/// boundary data U(x0, t) b, then compares densities and wave functions.
GaugeReport check_gauge_invariance(const GaugeScenario& scenario);

}  // namespace sts
