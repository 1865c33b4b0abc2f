#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sts/core.hpp"
#include "sts/quadrature.hpp"

namespace sts {

/// Time-independent electromagnetic potentials: scalar Phi(x) and vector A(x).
struct EMFieldSpec {
  std::function<double(double)> phi;
  std::function<double(double)> a;
  PhysicalConstants constants;
  std::vector<double> phi_breakpoints;

  static EMFieldSpec uniform(double phi0, double a0, const PhysicalConstants& constants = {});
};

/// Accumulated action per (energy, position), measured from the anchor:
///
///   action(eps, x) = int_{x0}^{x} Re sqrt(2m(eps - V)) dx'
///   decay(eps, x)  = int_{x0}^{x} Im sqrt(2m(eps - V)) dx'   (principal branch)
///   common(x)      = (q/c) int_{x0}^{x} A dx'                 (same for both components)
///
/// All three are signed integrals, so they are negative left of the anchor.
class PhaseTable {
 public:
  PhaseTable(EnergyGrid egrid, SpaceGrid xgrid, PhysicalConstants constants, std::vector<double> action,
             std::vector<double> decay, std::vector<std::uint8_t> crossed_forbidden,
             std::vector<double> common);

  const EnergyGrid& egrid() const { return egrid_; }
  const SpaceGrid& xgrid() const { return xgrid_; }
  const PhysicalConstants& constants() const { return constants_; }

  double action(std::size_t j, std::size_t ix) const { return action_[ix * egrid_.size() + j]; }
  double decay(std::size_t j, std::size_t ix) const { return decay_[ix * egrid_.size() + j]; }
  bool crossed_forbidden(std::size_t j, std::size_t ix) const {
    return crossed_[ix * egrid_.size() + j] != 0;
  }
  double common(std::size_t ix) const { return common_[ix]; }

 private:
  EnergyGrid egrid_;
  SpaceGrid xgrid_;
  PhysicalConstants constants_;
  std::vector<double> action_;
  std::vector<double> decay_;
  std::vector<std::uint8_t> crossed_;
  std::vector<double> common_;
};

struct PhaseOptions {
  SimpsonOptions quadrature{};
  unsigned threads = 1;
};

/// Throws QuadratureError naming the energy and x-interval that failed to converge.
PhaseTable accumulate_phase(const PotentialSpec& v, const EnergyGrid& egrid, const SpaceGrid& xgrid,
                            const PhysicalConstants& constants = {}, const PhaseOptions& opts = {});

/// Phase table for the electromagnetic Pamiltonian sigma_z sqrt(2m(h - q Phi)) + (q/c) A.
PhaseTable build_em_phase(const EMFieldSpec& em, const EnergyGrid& egrid, const SpaceGrid& xgrid,
                          const PhaseOptions& opts = {});

enum class ForbiddenMode {
  strict,  // abort with OverflowError when a growing factor exceeds the cap
  clamp,   // cap growing factors at the cap
};

struct PropagateOptions {
  ForbiddenMode mode = ForbiddenMode::strict;
  double growth_cap = 1e12;
  // Zero the exponentially growing component of every mode that crossed a
  // forbidden region instead of propagating it.
  bool drop_growing = false;
  unsigned threads = 1;
};

/// phi(t|x) from boundary coefficients C at the anchor:
///
///   phi+(t|x) = (2 pi hbar)^{-1/2} sum_j C+_j e^{+i S/hbar} e^{-K/hbar} e^{i common/hbar} e^{-i eps_j t/hbar} d_eps
///   phi-(t|x) = (2 pi hbar)^{-1/2} sum_j C-_j e^{-i S/hbar} e^{+K/hbar} e^{i common/hbar} e^{-i eps_j t/hbar} d_eps
ScField propagate(const EnergySpectrum& spec, const PhaseTable& table, const TimeGrid& tgrid,
                  const PropagateOptions& opts = {});

/// Per-(energy, x) norms of sigma_z p C + (q/c) A C + i hbar dC/dx, with C the
/// energy representation of the field at each x and dC/dx a second-order
/// centred difference. Edge positions carry no residual and are excluded.
struct ResidualReport {
  std::size_t n_energy = 0;
  std::size_t n_x = 0;
  std::vector<double> norms;  // x-major
  double max = 0.0;
  double mean = 0.0;
  std::size_t argmax_energy = 0;
  std::size_t argmax_x = 0;

  double at(std::size_t j, std::size_t ix) const { return norms[ix * n_energy + j]; }
};

ResidualReport sc_residual(const ScField& field, const PotentialSpec& v, const EnergyGrid& egrid,
                           const PhysicalConstants& constants = {});
ResidualReport sc_residual(const ScField& field, const EMFieldSpec& em, const EnergyGrid& egrid);

/// Principal branch: sqrt of a negative argument is +i sqrt(|.|).
inline cplx local_momentum(double eps, double v, double mass) {
  return std::sqrt(cplx(2.0 * mass * (eps - v), 0.0));
}

}  // namespace sts
