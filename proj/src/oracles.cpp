#include "sts/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

namespace sts {

MomentumSpectrum::MomentumSpectrum(std::function<cplx(double)> sampler, double p_min, double p_max, double margin)
    : sampler_(std::move(sampler)), p_min_(p_min), p_max_(p_max) {
  if (!sampler_) throw ValidationError("momentum sampler must be callable");
  if (!(p_max > p_min) || !std::isfinite(p_min) || !std::isfinite(p_max)) {
    throw ValidationError(fmt::format("momentum support [{}, {}] is empty or not finite", p_min, p_max));
  }
  if (!(margin > 0.0)) throw ValidationError("momentum margin must be positive");
  if (!(p_min >= margin || p_max <= -margin)) {
    throw ValidationError(fmt::format(
        "momentum support [{}, {}] must stay at least {} away from p = 0 (the energy Jacobian m/p is "
        "singular there)",
        p_min, p_max, margin));
  }
}

MomentumSpectrum MomentumSpectrum::gaussian(double p0, double sigma, double support_sigmas) {
  if (!(sigma > 0.0)) throw ValidationError("momentum width must be positive");
  const double norm = std::pow(two_pi * sigma * sigma, -0.25);
  return MomentumSpectrum(
      [=](double p) {
        const double d = p - p0;
        return cplx(norm * std::exp(-d * d / (4.0 * sigma * sigma)));
      },
      p0 - support_sigmas * sigma, p0 + support_sigmas * sigma);
}

MomentumSpectrum MomentumSpectrum::box(double p_min, double p_max, cplx amplitude) {
  return MomentumSpectrum([amplitude](double) { return amplitude; }, p_min, p_max);
}

cplx MomentumSpectrum::operator()(double p) const {
  if (p < p_min_ || p > p_max_) return 0.0;
  return sampler_(p);
}

namespace {

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

constexpr std::size_t workspace_limit = 4096;

gsl_integration_workspace* workspace() {
  thread_local std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
      gsl_integration_workspace_alloc(workspace_limit));
  return ws.get();
}

struct GslGuard {
  GslGuard() : previous(gsl_set_error_handler_off()) {}
  ~GslGuard() { gsl_set_error_handler(previous); }
  gsl_error_handler_t* previous;
};

// Globally adaptive 21-point Gauss-Kronrod to an absolute tolerance.
template <class F>
double integrate_real(F&& f, double a, double b, double abs_tol, const char* what) {
  if (a == b) return 0.0;
  GslGuard guard;
  gsl_function fn;
  using Fn = std::remove_reference_t<F>;
  fn.function = [](double x, void* p) { return (*static_cast<Fn*>(p))(x); };
  fn.params = const_cast<void*>(static_cast<const void*>(&f));
  double result = 0.0;
  double error = 0.0;
  const int status = gsl_integration_qag(&fn, a, b, abs_tol, 0.0, workspace_limit, GSL_INTEG_GAUSS21,
                                         workspace(), &result, &error);
  if (status != GSL_SUCCESS || !(error <= abs_tol)) {
    throw NumericalError(fmt::format("{} quadrature on [{}, {}] did not converge: {} (error estimate {:.3e}, "
                                     "tolerance {:.3e})",
                                     what, a, b, gsl_strerror(status), error, abs_tol));
  }
  return result;
}

template <class F>
cplx integrate_complex(F&& f, double a, double b, double abs_tol, const char* what) {
  const double half = abs_tol / std::sqrt(2.0);
  const double re = integrate_real([&](double p) { return f(p).real(); }, a, b, half, what);
  const double im = integrate_real([&](double p) { return f(p).imag(); }, a, b, half, what);
  return {re, im};
}

}  // namespace

cplx free_particle_oracle(const MomentumSpectrum& a, double x, double t, const PhysicalConstants& constants,
                          const OracleOptions& opts) {
  const double hbar = constants.hbar();
  const double m = constants.mass();
  auto integrand = [&](double p) {
    return a(p) * std::polar(1.0, (p * x - p * p * t / (2.0 * m)) / hbar);
  };
  return integrate_complex(integrand, a.p_min(), a.p_max(), opts.abs_tol, "free-particle") /
         std::sqrt(two_pi * hbar);
}

EnergySpectrum spectrum_from_momentum(const MomentumSpectrum& a, const EnergyGrid& egrid,
                                      const PhysicalConstants& constants, double anchor) {
  if (a.p_min() <= 0.0 && a.p_max() >= 0.0) {
    throw ValidationError("momentum support touches p = 0; the energy Jacobian is singular");
  }
  const double m = constants.mass();
  const double hbar = constants.hbar();
  std::vector<SpinorAmplitude> values(egrid.size());
  for (std::size_t j = 0; j < egrid.size(); ++j) {
    const double eps = egrid.at(j);
    if (!(eps > 0.0)) continue;
    const double speed_p = std::sqrt(2.0 * m * eps);
    const double p = a.right_moving() ? speed_p : -speed_p;
    if (p < a.p_min() || p > a.p_max()) continue;
    const cplx c = a(p) * (m / speed_p) * std::polar(1.0, p * anchor / hbar);
    if (a.right_moving()) {
      values[j].plus = c;
    } else {
      values[j].minus = c;
    }
  }
  return EnergySpectrum(egrid, std::move(values));
}

cplx uniform_time_potential_solution(const MomentumSpectrum& a, const std::function<double(double)>& v_of_t,
                                     double x, double t, const PhysicalConstants& constants,
                                     const OracleOptions& opts) {
  const double hbar = constants.hbar();
  const double m = constants.mass();
  const double lo = std::min(0.0, t);
  const double hi = std::max(0.0, t);
  double w = integrate_real(v_of_t, lo, hi, 1e-3 * opts.abs_tol, "time-potential");
  if (t < 0.0) w = -w;
  auto integrand = [&](double p) {
    return a(p) * std::polar(1.0, (p * x - p * p * t / (2.0 * m) - w) / hbar);
  };
  return integrate_complex(integrand, a.p_min(), a.p_max(), opts.abs_tol, "time-potential") /
         std::sqrt(two_pi * hbar);
}

namespace {

// First position, walking from `from` toward `to`, where eps - V drops below
// margin. Narrows with the potential's reported maxima.
double first_violation(const PotentialSpec& v, double eps, double margin, double from, double to) {
  double near = from;
  double far = to;
  for (int i = 0; i < 200 && std::abs(far - near) > 1e-12 * std::max(1.0, std::abs(near)); ++i) {
    const double mid = 0.5 * (near + far);
    const double lo = std::min(near, mid);
    const double hi = std::max(near, mid);
    if (eps - v.max_on(lo, hi) < margin) {
      far = mid;
    } else {
      near = mid;
    }
  }
  return far;
}

}  // namespace

double classical_arrival_time(double eps, const PotentialSpec& v, double x0, double x,
                              const PhysicalConstants& constants, double margin) {
  if (x == x0) return 0.0;
  const double lo = std::min(x0, x);
  const double hi = std::max(x0, x);
  if (eps - v.max_on(lo, hi) < margin) {
    const double bad = first_violation(v, eps, margin, x0, x);
    throw ValidationError(fmt::format(
        "classical arrival time needs eps - V >= {} along the path; violated at x' = {} (eps = {})", margin,
        bad, eps));
  }
  const double m = constants.mass();
  std::vector<double> ends{lo};
  for (double bp : v.breakpoints()) {
    if (bp > lo && bp < hi) ends.push_back(bp);
  }
  ends.push_back(hi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    const double l = ends[k];
    const double r = ends[k + 1];
    const double nudge = 1e-13 * std::max(1.0, std::abs(r));
    auto integrand = [&](double xp) {
      const double xs = std::clamp(xp, l + (k > 0 ? nudge : 0.0), r - (k + 2 < ends.size() ? nudge : 0.0));
      return m / std::sqrt(2.0 * m * (eps - v(xs)));
    };
    total += integrate_real(integrand, l, r, 1e-9 / static_cast<double>(ends.size() - 1), "arrival-time");
  }
  return x > x0 ? total : -total;
}

}  // namespace sts
