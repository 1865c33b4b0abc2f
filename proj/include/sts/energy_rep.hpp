#pragma once

#include <span>
#include <vector>

#include "sts/core.hpp"

namespace sts {

/// phi(t|x0) sampled on a time grid at one position.
class BoundarySlice {
 public:
  BoundarySlice(TimeGrid tgrid, std::vector<SpinorAmplitude> values, double position = 0.0);

  const TimeGrid& tgrid() const { return tgrid_; }
  std::span<const SpinorAmplitude> values() const { return values_; }
  const SpinorAmplitude& operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }
  double position() const { return position_; }

 private:
  TimeGrid tgrid_;
  std::vector<SpinorAmplitude> values_;
  double position_;
};

/// Discrete transform pair between a time grid and its dual energy grid:
///
///   phi(t_k) = (2 pi hbar)^{-1/2} sum_j C(eps_j) exp(-i eps_j t_k / hbar) d_eps
///   C(eps_j) = (2 pi hbar)^{-1/2} sum_k phi(t_k) exp(+i eps_j t_k / hbar) dt
///
/// The offsets t0 and eps0 are carried by phase ramps around an unshifted FFT.
/// Components are transformed independently.
class SpectralTransform {
 public:
  SpectralTransform(const TimeGrid& tgrid, const EnergyGrid& egrid, const PhysicalConstants& constants);

  const TimeGrid& tgrid() const { return tgrid_; }
  const EnergyGrid& egrid() const { return egrid_; }

  void time_to_energy(std::span<const cplx> time_values, std::span<cplx> energy_values) const;
  void energy_to_time(std::span<const cplx> energy_values, std::span<cplx> time_values) const;

  std::vector<SpinorAmplitude> time_to_energy(std::span<const SpinorAmplitude> time_values) const;
  std::vector<SpinorAmplitude> energy_to_time(std::span<const SpinorAmplitude> energy_values) const;

 private:
  TimeGrid tgrid_;
  EnergyGrid egrid_;
  std::vector<cplx> to_time_pre_;
  std::vector<cplx> to_time_post_;
  std::vector<cplx> to_energy_pre_;
  std::vector<cplx> to_energy_post_;
};

EnergySpectrum to_energy(const BoundarySlice& slice, const EnergyGrid& egrid,
                         const PhysicalConstants& constants = {});

BoundarySlice to_time(const EnergySpectrum& spec, const TimeGrid& tgrid,
                      const PhysicalConstants& constants = {}, double position = 0.0);

// O(n^2) direct summation of the same pair, kept as an oracle for the ramps.
EnergySpectrum to_energy_direct(const BoundarySlice& slice, const EnergyGrid& egrid,
                                const PhysicalConstants& constants = {});
BoundarySlice to_time_direct(const EnergySpectrum& spec, const TimeGrid& tgrid,
                             const PhysicalConstants& constants = {}, double position = 0.0);

}  // namespace sts
