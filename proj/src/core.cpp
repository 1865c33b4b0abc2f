#include "sts/core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace sts {

PhysicalConstants::PhysicalConstants(double hbar, double mass, double charge, double light_speed)
    : hbar_(hbar), mass_(mass), charge_(charge), light_speed_(light_speed) {
  if (!(hbar > 0.0) || !(mass > 0.0) || !(light_speed > 0.0) || !std::isfinite(hbar) ||
      !std::isfinite(mass) || !std::isfinite(light_speed) || !std::isfinite(charge)) {
    throw ValidationError(fmt::format(
        "physical constants must be finite with hbar, mass, light_speed > 0 "
        "(got hbar={}, mass={}, charge={}, light_speed={})",
        hbar, mass, charge, light_speed));
  }
}

TimeGrid::TimeGrid(double t0, double dt, std::size_t n) : t0_(t0), dt_(dt), n_(n) {
  if (!std::isfinite(t0) || !(dt > 0.0) || !std::isfinite(dt)) {
    throw ValidationError(fmt::format("time grid needs finite t0 and dt > 0 (got t0={}, dt={})", t0, dt));
  }
  if (n < 2) {
    throw ValidationError(fmt::format("time grid needs at least 2 samples (got {})", n));
  }
}

EnergyGrid::EnergyGrid(double eps0, double d_eps, std::size_t n) : eps0_(eps0), d_eps_(d_eps), n_(n) {
  if (!std::isfinite(eps0) || !(d_eps > 0.0) || !std::isfinite(d_eps)) {
    throw ValidationError(
        fmt::format("energy grid needs finite eps0 and d_eps > 0 (got eps0={}, d_eps={})", eps0, d_eps));
  }
  if (n < 2) {
    throw ValidationError(fmt::format("energy grid needs at least 2 samples (got {})", n));
  }
}

EnergyGrid make_dual_energy_grid(const TimeGrid& tgrid, double eps0, const PhysicalConstants& constants) {
  const double d_eps = two_pi * constants.hbar() / (static_cast<double>(tgrid.size()) * tgrid.dt());
  return EnergyGrid(eps0, d_eps, tgrid.size());
}

bool are_dual(const TimeGrid& tgrid, const EnergyGrid& egrid, const PhysicalConstants& constants,
              double rel_tol) {
  if (tgrid.size() != egrid.size()) return false;
  const double product = static_cast<double>(tgrid.size()) * tgrid.dt() * egrid.d_eps();
  const double target = two_pi * constants.hbar();
  return std::abs(product - target) <= rel_tol * target;
}

void require_dual(const TimeGrid& tgrid, const EnergyGrid& egrid, const PhysicalConstants& constants) {
  if (tgrid.size() != egrid.size()) {
    throw ValidationError(fmt::format("time grid has {} samples but energy grid has {}",
                                      tgrid.size(), egrid.size()));
  }
  if (!are_dual(tgrid, egrid, constants)) {
    const double product = static_cast<double>(tgrid.size()) * tgrid.dt() * egrid.d_eps();
    throw ValidationError(fmt::format(
        "grids are not Fourier dual: n*dt*d_eps = {}*{:.17g}*{:.17g} = {:.17g}, expected 2*pi*hbar = {:.17g}",
        tgrid.size(), tgrid.dt(), egrid.d_eps(), product, two_pi * constants.hbar()));
  }
}

SpaceGrid::SpaceGrid(std::vector<double> points, std::size_t anchor_index)
    : points_(std::move(points)), anchor_(anchor_index) {
  if (points_.empty()) throw ValidationError("space grid is empty");
  if (anchor_ >= points_.size()) {
    throw ValidationError(
        fmt::format("anchor index {} out of range for {} space points", anchor_, points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) {
      throw ValidationError(fmt::format("space point {} is not finite", i));
    }
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      throw ValidationError(fmt::format("space points must be strictly increasing (index {}: {} after {})",
                                        i, points_[i], points_[i - 1]));
    }
  }
}

SpaceGrid SpaceGrid::uniform(double x_min, double x_max, std::size_t count, std::size_t anchor_index) {
  if (count < 2 || !(x_max > x_min)) {
    throw ValidationError(
        fmt::format("uniform space grid needs count >= 2 and x_max > x_min (got {} on [{}, {}])", count,
                    x_min, x_max));
  }
  std::vector<double> pts(count);
  const double h = (x_max - x_min) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) pts[i] = x_min + static_cast<double>(i) * h;
  pts.back() = x_max;
  return SpaceGrid(std::move(pts), anchor_index);
}

SpaceGrid SpaceGrid::with_anchor(std::size_t anchor_index) const { return SpaceGrid(points_, anchor_index); }

std::size_t SpaceGrid::index_of(double x, double tol) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), x);
  std::size_t best = points_.size();
  double best_d = tol;
  for (auto cand : {it, it == points_.begin() ? it : std::prev(it)}) {
    if (cand == points_.end()) continue;
    const double d = std::abs(*cand - x);
    if (d <= best_d) {
      best_d = d;
      best = static_cast<std::size_t>(cand - points_.begin());
    }
  }
  if (best == points_.size()) {
    throw ValidationError(fmt::format("position {} is not a space grid point (tolerance {})", x, tol));
  }
  return best;
}

double SpaceGrid::uniform_spacing() const {
  if (points_.size() < 2) return 0.0;
  const double h = (points_.back() - points_.front()) / static_cast<double>(points_.size() - 1);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (std::abs((points_[i] - points_[i - 1]) - h) > 1e-9 * h) return 0.0;
  }
  return h;
}

EnergySpectrum::EnergySpectrum(EnergyGrid grid, std::vector<SpinorAmplitude> values, bool normalized)
    : grid_(grid), values_(std::move(values)), normalized_(normalized) {
  if (values_.size() != grid_.size()) {
    throw ValidationError(fmt::format("spectrum has {} values for an energy grid of {} points",
                                      values_.size(), grid_.size()));
  }
  if (normalized_) {
    const double m = mass();
    if (std::abs(m - 1.0) > 1e-10) {
      throw ValidationError(fmt::format("spectrum flagged normalized but has mass {:.17g}", m));
    }
  }
}

EnergySpectrum EnergySpectrum::zeros(EnergyGrid grid) {
  return EnergySpectrum(grid, std::vector<SpinorAmplitude>(grid.size()));
}

double EnergySpectrum::mass() const {
  double s = 0.0;
  for (const auto& c : values_) s += c.norm2();
  return s * grid_.d_eps();
}

EnergySpectrum EnergySpectrum::normalized_copy() const {
  const double m = mass();
  if (!(m > 0.0)) throw ValidationError("cannot normalize a spectrum with zero mass");
  auto out = values_;
  const double s = 1.0 / std::sqrt(m);
  for (auto& c : out) c *= s;
  return EnergySpectrum(grid_, std::move(out), true);
}

EnergySpectrum EnergySpectrum::scaled(cplx factor) const {
  auto out = values_;
  for (auto& c : out) c *= factor;
  return EnergySpectrum(grid_, std::move(out), false);
}

ScField::ScField(TimeGrid tgrid, SpaceGrid xgrid, std::vector<SpinorAmplitude> values)
    : tgrid_(tgrid), xgrid_(std::move(xgrid)), values_(std::move(values)) {
  if (values_.size() != tgrid_.size() * xgrid_.size()) {
    throw ValidationError(fmt::format("field has {} values for a {}x{} (t,x) grid", values_.size(),
                                      tgrid_.size(), xgrid_.size()));
  }
}

ScField::ScField(TimeGrid tgrid, SpaceGrid xgrid)
    : tgrid_(tgrid), xgrid_(std::move(xgrid)), values_(tgrid_.size() * xgrid_.size()) {}

PotentialSpec::PotentialSpec(Evaluator v, Extremum v_max_on, Extremum v_min_on,
                             std::vector<double> breakpoints)
    : v_(std::move(v)), v_max_(std::move(v_max_on)), v_min_(std::move(v_min_on)),
      breakpoints_(std::move(breakpoints)) {
  if (!v_ || !v_max_ || !v_min_) throw ValidationError("potential evaluator and extrema must be callable");
  std::sort(breakpoints_.begin(), breakpoints_.end());
}

PotentialSpec PotentialSpec::free() { return constant(0.0); }

PotentialSpec PotentialSpec::constant(double v0) {
  return PotentialSpec([v0](double) { return v0; }, [v0](double, double) { return v0; },
                       [v0](double, double) { return v0; });
}

PotentialSpec PotentialSpec::linear(double slope, double offset) {
  auto v = [slope, offset](double x) { return offset + slope * x; };
  return PotentialSpec(
      v, [v](double a, double b) { return std::max(v(a), v(b)); },
      [v](double a, double b) { return std::min(v(a), v(b)); });
}

PotentialSpec PotentialSpec::step(double x_step, double height) {
  auto v = [x_step, height](double x) { return x >= x_step ? height : 0.0; };
  auto covers_high = [x_step](double, double b) { return b >= x_step; };
  auto covers_low = [x_step](double a, double) { return a < x_step; };
  return PotentialSpec(
      v,
      [=](double a, double b) {
        double m = covers_low(a, b) ? 0.0 : height;
        if (covers_high(a, b)) m = std::max(m, height);
        return m;
      },
      [=](double a, double b) {
        double m = covers_high(a, b) ? height : 0.0;
        if (covers_low(a, b)) m = std::min(m, 0.0);
        return m;
      },
      {x_step});
}

PotentialSpec PotentialSpec::from_function(Evaluator v, std::vector<double> breakpoints) {
  auto scan = [v](double a, double b, bool want_max) {
    constexpr int samples = 4096;
    double best = v(a);
    for (int i = 1; i <= samples; ++i) {
      const double x = a + (b - a) * static_cast<double>(i) / samples;
      const double y = v(x);
      best = want_max ? std::max(best, y) : std::min(best, y);
    }
    return best;
  };
  return PotentialSpec(
      v, [scan](double a, double b) { return scan(a, b, true); },
      [scan](double a, double b) { return scan(a, b, false); }, std::move(breakpoints));
}

std::vector<double> sample_potential(const PotentialSpec& p, const SpaceGrid& xgrid) {
  std::vector<double> out(xgrid.size());
  for (std::size_t i = 0; i < xgrid.size(); ++i) {
    out[i] = p(xgrid.at(i));
    if (!std::isfinite(out[i])) {
      throw ValidationError(fmt::format("potential is not finite at index {} (x = {})", i, xgrid.at(i)));
    }
  }
  const double hi = p.max_on(xgrid.front(), xgrid.back());
  const double lo = p.min_on(xgrid.front(), xgrid.back());
  const double slack = 1e-12 * std::max({1.0, std::abs(hi), std::abs(lo)});
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] > hi + slack || out[i] < lo - slack) {
      throw ValidationError(fmt::format(
          "potential sample {} at index {} lies outside the reported extrema [{}, {}]", out[i], i, lo, hi));
    }
  }
  return out;
}

}  // namespace sts
