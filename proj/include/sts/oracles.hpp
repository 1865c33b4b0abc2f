#pragma once

#include <functional>

#include "sts/core.hpp"

namespace sts {

/// Momentum amplitudes A_p supported on one side of p = 0.
class MomentumSpectrum {
 public:
  // Support must stay at least `margin` away from p = 0.
  MomentumSpectrum(std::function<cplx(double)> sampler, double p_min, double p_max, double margin = 1e-6);

  // A_p = (2 pi sigma^2)^{-1/4} exp(-(p - p0)^2 / (4 sigma^2)) on p0 +- support_sigmas * sigma,
  // so |A_p|^2 is a unit-mass Gaussian of standard deviation sigma.
  static MomentumSpectrum gaussian(double p0, double sigma, double support_sigmas = 8.0);
  // Constant amplitude on [p_min, p_max].
  static MomentumSpectrum box(double p_min, double p_max, cplx amplitude = 1.0);

  cplx operator()(double p) const;
  double p_min() const { return p_min_; }
  double p_max() const { return p_max_; }
  bool right_moving() const { return p_min_ > 0.0; }

 private:
  std::function<cplx(double)> sampler_;
  double p_min_;
  double p_max_;
};

struct OracleOptions {
  double abs_tol = 1e-9;
  int max_depth = 40;
};

/// psi(x|t) = (2 pi hbar)^{-1/2} int A_p exp(i (p x - p^2 t / 2m) / hbar) dp by
/// adaptive Gauss-Kronrod quadrature. Throws NumericalError on non-convergence.
cplx free_particle_oracle(const MomentumSpectrum& a, double x, double t,
                          const PhysicalConstants& constants = {}, const OracleOptions& opts = {});

/// Energy coefficients equivalent to `a` for a free particle anchored at
/// `anchor`: C(eps) = A(p) (m / |p|) exp(i p anchor / hbar) with eps = p^2 / 2m.
/// Right movers fill C+, left movers C-; bins outside the support are zero.
EnergySpectrum spectrum_from_momentum(const MomentumSpectrum& a, const EnergyGrid& egrid,
                                      const PhysicalConstants& constants = {}, double anchor = 0.0);

/// Schrodinger solution for a potential depending only on time,
/// (2 pi hbar)^{-1/2} int A_p exp(-(i/hbar)[p^2 t/2m + int_0^t v] + i p x / hbar) dp.
cplx uniform_time_potential_solution(const MomentumSpectrum& a, const std::function<double(double)>& v_of_t,
                                     double x, double t, const PhysicalConstants& constants = {},
                                     const OracleOptions& opts = {});

/// Stationary-phase arrival time t = int_{x0}^{x} m / sqrt(2m(eps - V)) dx'.
/// Requires eps - V >= margin along the path; otherwise throws ValidationError
/// naming the first offending position.
double classical_arrival_time(double eps, const PotentialSpec& v, double x0, double x,
                              const PhysicalConstants& constants = {}, double margin = 1e-6);

}  // namespace sts
