#include "sts/gauge.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace sts {

GaugeFunction::GaugeFunction(std::function<double(double)> f,
                             std::optional<std::function<double(double)>> df, double alpha,
                             double fd_step, const EnergyGrid& egrid, const PhysicalConstants& constants)
    : f_(std::move(f)),
      df_(std::move(df)),
      alpha_(alpha),
      fd_step_(fd_step),
      egrid_(egrid),
      constants_(constants) {
  if (!f_) throw ValidationError("gauge function f must be callable");
  if (!std::isfinite(alpha)) throw ValidationError("gauge alpha must be finite");
  if (!df_ && !(fd_step > 0.0)) {
    throw ValidationError("gauge function needs an analytic derivative or a positive difference step");
  }
  const double shift = constants.charge() * alpha / constants.light_speed();
  const double bins = shift / egrid.d_eps();
  const double nearest = std::round(bins);
  if (std::abs(bins - nearest) > 1e-9) {
    const double unit = egrid.d_eps() * constants.light_speed() / constants.charge();
    throw ValidationError(fmt::format(
        "gauge alpha = {} gives q*alpha/c = {} = {} energy bins; it must be an integer multiple of "
        "d_eps = {}, i.e. alpha must be a multiple of c*d_eps/q = {} (nearest: {} or {})",
        alpha, shift, bins, egrid.d_eps(), unit, std::floor(bins) * unit, std::ceil(bins) * unit));
  }
  shift_bins_ = static_cast<long>(nearest);
}

GaugeFunction GaugeFunction::constant(double c0, const EnergyGrid& egrid, const PhysicalConstants& constants) {
  return polynomial(c0, 0.0, 0.0, 0.0, egrid, constants);
}

GaugeFunction GaugeFunction::polynomial(double c0, double c1, double c2, double alpha, const EnergyGrid& egrid,
                                        const PhysicalConstants& constants) {
  return GaugeFunction([=](double x) { return c0 + x * (c1 + x * c2); },
                       std::function<double(double)>([=](double x) { return c1 + 2.0 * c2 * x; }), alpha, 0.0,
                       egrid, constants);
}

double GaugeFunction::df(double x) const {
  if (df_) return (*df_)(x);
  const double h = fd_step_;
  return (f_(x - 2.0 * h) - 8.0 * f_(x - h) + 8.0 * f_(x + h) - f_(x + 2.0 * h)) / (12.0 * h);
}

GaugeFunction compose(const GaugeFunction& g1, const GaugeFunction& g2) {
  auto f1 = g1.f_;
  auto f2 = g2.f_;
  std::optional<std::function<double(double)>> df;
  if (g1.df_ && g2.df_) {
    auto d1 = *g1.df_;
    auto d2 = *g2.df_;
    df = [d1, d2](double x) { return d1(x) + d2(x); };
  }
  const double step = g1.fd_step_ > 0.0 ? g1.fd_step_ : g2.fd_step_;
  return GaugeFunction([f1, f2](double x) { return f1(x) + f2(x); }, std::move(df), g1.alpha_ + g2.alpha_,
                       step, g1.egrid_, g1.constants_);
}

EMFieldSpec transform_potentials(const EMFieldSpec& em, const GaugeFunction& g) {
  const double shift = g.alpha() / em.constants.light_speed();
  auto phi = em.phi;
  auto a = em.a;
  return {[phi, shift](double x) { return phi(x) - shift; }, [a, g](double x) { return a(x) + g.df(x); },
          em.constants, em.phi_breakpoints};
}

ScField apply_unitary(const ScField& field, const GaugeFunction& g, const PhysicalConstants& constants) {
  const double k = constants.charge() / (constants.hbar() * constants.light_speed());
  ScField out = field;
  const auto& tg = field.tgrid();
  const auto& xg = field.xgrid();
  for (std::size_t ix = 0; ix < xg.size(); ++ix) {
    const double fx = g.f(xg.at(ix));
    for (std::size_t it = 0; it < tg.size(); ++it) {
      out.at(it, ix) *= std::polar(1.0, k * (fx + g.alpha() * tg.at(it)));
    }
  }
  return out;
}

EnergySpectrum shift_spectrum(const EnergySpectrum& spec, const GaugeFunction& g,
                              const PhysicalConstants& constants) {
  const auto& grid = spec.grid();
  const double bins = constants.charge() * g.alpha() / (constants.light_speed() * grid.d_eps());
  const double nearest = std::round(bins);
  if (std::abs(bins - nearest) > 1e-9) {
    throw ValidationError(
        fmt::format("energy shift of {} bins is not an integer; alpha must be bin-quantized", bins));
  }
  const long k = static_cast<long>(nearest);
  const long n = static_cast<long>(grid.size());
  double departing = 0.0;
  std::vector<SpinorAmplitude> out(grid.size());
  for (long j = 0; j < n; ++j) {
    const long src = j + k;
    if (src >= 0 && src < n) out[static_cast<std::size_t>(j)] = spec[static_cast<std::size_t>(src)];
  }
  for (long j = 0; j < n; ++j) {
    const long dst = j - k;
    if (dst < 0 || dst >= n) departing += spec[static_cast<std::size_t>(j)].norm2();
  }
  departing *= grid.d_eps();
  if (departing >= 1e-10) {
    throw ValidationError(fmt::format(
        "energy shift of {} bins pushes spectral mass {:.3e} off the grid edge (limit 1e-10)", k, departing));
  }
  return EnergySpectrum(grid, std::move(out), false);
}

GaugeReport check_gauge_invariance(const GaugeScenario& s) {
  const auto& constants = s.em.constants;
  const auto table = build_em_phase(s.em, s.boundary.grid(), s.xgrid, s.phase);
  const auto phi = propagate(s.boundary, table, s.tgrid, s.propagate);

  const auto em_prime = transform_potentials(s.em, s.gauge);
  const auto table_prime = build_em_phase(em_prime, s.boundary.grid(), s.xgrid, s.phase);
  const double k = constants.charge() / (constants.hbar() * constants.light_speed());
  const auto boundary_prime =
      shift_spectrum(s.boundary, s.gauge, constants).scaled(std::polar(1.0, k * s.gauge.f(s.xgrid.anchor())));
  const auto phi_prime = propagate(boundary_prime, table_prime, s.tgrid, s.propagate);

  const auto u_phi = apply_unitary(phi, s.gauge, constants);
  GaugeReport rep;
  const auto a = phi.values();
  const auto b = phi_prime.values();
  const auto c = u_phi.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    rep.max_density = std::max(rep.max_density, a[i].norm2());
    rep.max_density_diff = std::max(rep.max_density_diff, std::abs(b[i].norm2() - a[i].norm2()));
    rep.max_covariance_diff = std::max(rep.max_covariance_diff, std::sqrt((b[i] - c[i]).norm2()));
  }
  return rep;
}

}  // namespace sts
