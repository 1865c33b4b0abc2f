#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "sts/errors.hpp"

namespace sts {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Physical constants injected into every computation. Natural units by
/// default (hbar = mass = light_speed = charge = 1).
class PhysicalConstants {
 public:
  PhysicalConstants() = default;
  PhysicalConstants(double hbar, double mass, double charge, double light_speed);

  double hbar() const { return hbar_; }
  double mass() const { return mass_; }
  double charge() const { return charge_; }
  double light_speed() const { return light_speed_; }

 private:
  double hbar_ = 1.0;
  double mass_ = 1.0;
  double charge_ = 1.0;
  double light_speed_ = 1.0;
};

/// Uniform time samples t_k = t0 + k dt, k = 0..n-1.
class TimeGrid {
 public:
  TimeGrid(double t0, double dt, std::size_t n);

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  std::size_t size() const { return n_; }
  double at(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }
  double period() const { return static_cast<double>(n_) * dt_; }

 private:
  double t0_;
  double dt_;
  std::size_t n_;
};

/// Uniform energy samples eps_j = eps0 + j d_eps, j = 0..n-1.
class EnergyGrid {
 public:
  EnergyGrid(double eps0, double d_eps, std::size_t n);

  double eps0() const { return eps0_; }
  double d_eps() const { return d_eps_; }
  std::size_t size() const { return n_; }
  double at(std::size_t j) const { return eps0_ + static_cast<double>(j) * d_eps_; }
  double back() const { return at(n_ - 1); }

 private:
  double eps0_;
  double d_eps_;
  std::size_t n_;
};

/// Energy grid Fourier-dual to `tgrid`: d_eps = 2 pi hbar / (n dt).
EnergyGrid make_dual_energy_grid(const TimeGrid& tgrid, double eps0,
                                 const PhysicalConstants& constants = {});

/// True when n matches and n dt d_eps equals 2 pi hbar to relative `rel_tol`.
bool are_dual(const TimeGrid& tgrid, const EnergyGrid& egrid, const PhysicalConstants& constants,
              double rel_tol = 1e-12);

/// Throws ValidationError naming all three quantities if the grids are not dual.
void require_dual(const TimeGrid& tgrid, const EnergyGrid& egrid,
                  const PhysicalConstants& constants);

/// Strictly increasing positions with a distinguished anchor where boundary
/// data lives and the accumulated phase vanishes.
class SpaceGrid {
 public:
  SpaceGrid(std::vector<double> points, std::size_t anchor_index);

  static SpaceGrid uniform(double x_min, double x_max, std::size_t count,
                           std::size_t anchor_index = 0);

  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double at(std::size_t i) const { return points_[i]; }
  std::size_t anchor_index() const { return anchor_; }
  double anchor() const { return points_[anchor_]; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

  SpaceGrid with_anchor(std::size_t anchor_index) const;

  // Index of the point equal to `x` within `tol`; throws ValidationError otherwise.
  std::size_t index_of(double x, double tol = 1e-9) const;

  // Uniform spacing, or 0 if the grid is not uniform to relative 1e-9.
  double uniform_spacing() const;

 private:
  std::vector<double> points_;
  std::size_t anchor_;
};

/// Two-component amplitude in the sigma_z eigenbasis.
struct SpinorAmplitude {
  cplx plus{};
  cplx minus{};

  double norm2() const { return std::norm(plus) + std::norm(minus); }

  SpinorAmplitude& operator+=(const SpinorAmplitude& o) {
    plus += o.plus;
    minus += o.minus;
    return *this;
  }
  SpinorAmplitude& operator-=(const SpinorAmplitude& o) {
    plus -= o.plus;
    minus -= o.minus;
    return *this;
  }
  SpinorAmplitude& operator*=(cplx s) {
    plus *= s;
    minus *= s;
    return *this;
  }
  friend SpinorAmplitude operator+(SpinorAmplitude a, const SpinorAmplitude& b) { return a += b; }
  friend SpinorAmplitude operator-(SpinorAmplitude a, const SpinorAmplitude& b) { return a -= b; }
  friend SpinorAmplitude operator*(cplx s, SpinorAmplitude a) { return a *= s; }
  friend SpinorAmplitude operator*(SpinorAmplitude a, cplx s) { return a *= s; }
  friend bool operator==(const SpinorAmplitude&, const SpinorAmplitude&) = default;
};

enum class Component { plus, minus };

/// Two-component coefficients C_eps on an energy grid.
class EnergySpectrum {
 public:
  // With `normalized` set, the constructor checks sum |C|^2 d_eps == 1 within 1e-10.
  EnergySpectrum(EnergyGrid grid, std::vector<SpinorAmplitude> values, bool normalized = false);

  static EnergySpectrum zeros(EnergyGrid grid);

  const EnergyGrid& grid() const { return grid_; }
  std::span<const SpinorAmplitude> values() const { return values_; }
  const SpinorAmplitude& operator[](std::size_t j) const { return values_[j]; }
  std::size_t size() const { return values_.size(); }
  bool normalized() const { return normalized_; }

  // sum_j |C_j|^2 d_eps
  double mass() const;
  EnergySpectrum normalized_copy() const;
  EnergySpectrum scaled(cplx factor) const;

 private:
  EnergyGrid grid_;
  std::vector<SpinorAmplitude> values_;
  bool normalized_;
};

/// phi(t|x) on a time x space grid. Storage is x-major: every position owns a
/// contiguous time slice.
class ScField {
 public:
  ScField(TimeGrid tgrid, SpaceGrid xgrid, std::vector<SpinorAmplitude> values);
  ScField(TimeGrid tgrid, SpaceGrid xgrid);

  const TimeGrid& tgrid() const { return tgrid_; }
  const SpaceGrid& xgrid() const { return xgrid_; }

  const SpinorAmplitude& at(std::size_t it, std::size_t ix) const {
    return values_[ix * tgrid_.size() + it];
  }
  SpinorAmplitude& at(std::size_t it, std::size_t ix) { return values_[ix * tgrid_.size() + it]; }

  std::span<const SpinorAmplitude> slice(std::size_t ix) const {
    return std::span(values_).subspan(ix * tgrid_.size(), tgrid_.size());
  }
  std::span<SpinorAmplitude> slice(std::size_t ix) {
    return std::span(values_).subspan(ix * tgrid_.size(), tgrid_.size());
  }
  std::span<const SpinorAmplitude> values() const { return values_; }

 private:
  TimeGrid tgrid_;
  SpaceGrid xgrid_;
  std::vector<SpinorAmplitude> values_;
};

/// Time-independent potential V(x) with reported extrema on sub-intervals.
/// Positions listed in `breakpoints` are jump discontinuities; integrators
/// split there. Step potentials are right-continuous: step(0) = 1.
class PotentialSpec {
 public:
  using Evaluator = std::function<double(double)>;
  using Extremum = std::function<double(double, double)>;

  PotentialSpec(Evaluator v, Extremum v_max_on, Extremum v_min_on,
                std::vector<double> breakpoints = {});

  static PotentialSpec free();
  static PotentialSpec constant(double v0);
  static PotentialSpec linear(double slope, double offset = 0.0);
  static PotentialSpec step(double x_step, double height);
  // Extrema estimated by dense sampling (4097 points per query).
  static PotentialSpec from_function(Evaluator v, std::vector<double> breakpoints = {});

  double operator()(double x) const { return v_(x); }
  double max_on(double a, double b) const { return v_max_(a, b); }
  double min_on(double a, double b) const { return v_min_(a, b); }
  std::span<const double> breakpoints() const { return breakpoints_; }
  const Evaluator& evaluator() const { return v_; }

 private:
  Evaluator v_;
  Extremum v_max_;
  Extremum v_min_;
  std::vector<double> breakpoints_;
};

/// Pointwise samples of `p` on `xgrid`. Throws ValidationError naming the
/// first non-finite sample, or when the samples escape the reported extrema.
std::vector<double> sample_potential(const PotentialSpec& p, const SpaceGrid& xgrid);

}  // namespace sts
