#include "sts/energy_rep.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "fft.hpp"

namespace sts {

BoundarySlice::BoundarySlice(TimeGrid tgrid, std::vector<SpinorAmplitude> values, double position)
    : tgrid_(tgrid), values_(std::move(values)), position_(position) {
  if (values_.size() != tgrid_.size()) {
    throw ValidationError(
        fmt::format("boundary slice has {} values for {} time samples", values_.size(), tgrid_.size()));
  }
}

SpectralTransform::SpectralTransform(const TimeGrid& tgrid, const EnergyGrid& egrid,
                                     const PhysicalConstants& constants)
    : tgrid_(tgrid), egrid_(egrid) {
  require_dual(tgrid, egrid, constants);
  const std::size_t n = tgrid.size();
  const double hbar = constants.hbar();
  const double norm = 1.0 / std::sqrt(two_pi * hbar);
  const double t0 = tgrid.t0();
  const double dt = tgrid.dt();
  const double eps0 = egrid.eps0();
  const double de = egrid.d_eps();

  to_time_pre_.resize(n);
  to_time_post_.resize(n);
  to_energy_pre_.resize(n);
  to_energy_post_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double idx = static_cast<double>(i);
    // exp(-i eps_j t_k / hbar) = exp(-i eps0 t0) exp(-i eps0 k dt) exp(-i j de t0) exp(-2 pi i jk/n)
    to_time_pre_[i] = std::polar(1.0, -idx * de * t0 / hbar);
    to_time_post_[i] = std::polar(de * norm, -(eps0 * t0 + eps0 * idx * dt) / hbar);
    to_energy_pre_[i] = std::polar(1.0, eps0 * idx * dt / hbar);
    to_energy_post_[i] = std::polar(dt * norm, (eps0 * t0 + idx * de * t0) / hbar);
  }
}

void SpectralTransform::time_to_energy(std::span<const cplx> time_values,
                                       std::span<cplx> energy_values) const {
  const std::size_t n = tgrid_.size();
  if (time_values.size() != n || energy_values.size() != n) {
    throw ValidationError("transform buffers do not match the grid size");
  }
  for (std::size_t k = 0; k < n; ++k) energy_values[k] = time_values[k] * to_energy_pre_[k];
  detail::fft_inplace(energy_values, detail::FftSign::positive);
  for (std::size_t j = 0; j < n; ++j) energy_values[j] *= to_energy_post_[j];
}

void SpectralTransform::energy_to_time(std::span<const cplx> energy_values,
                                       std::span<cplx> time_values) const {
  const std::size_t n = tgrid_.size();
  if (time_values.size() != n || energy_values.size() != n) {
    throw ValidationError("transform buffers do not match the grid size");
  }
  for (std::size_t j = 0; j < n; ++j) time_values[j] = energy_values[j] * to_time_pre_[j];
  detail::fft_inplace(time_values, detail::FftSign::negative);
  for (std::size_t k = 0; k < n; ++k) time_values[k] *= to_time_post_[k];
}

namespace {

template <class Fn>
std::vector<SpinorAmplitude> per_component(std::span<const SpinorAmplitude> in, Fn&& transform) {
  const std::size_t n = in.size();
  std::vector<cplx> plus(n), minus(n), plus_out(n), minus_out(n);
  for (std::size_t i = 0; i < n; ++i) {
    plus[i] = in[i].plus;
    minus[i] = in[i].minus;
  }
  transform(std::span<const cplx>(plus), std::span<cplx>(plus_out));
  transform(std::span<const cplx>(minus), std::span<cplx>(minus_out));
  std::vector<SpinorAmplitude> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {plus_out[i], minus_out[i]};
  return out;
}

}  // namespace

std::vector<SpinorAmplitude> SpectralTransform::time_to_energy(
    std::span<const SpinorAmplitude> time_values) const {
  return per_component(time_values,
                       [this](std::span<const cplx> a, std::span<cplx> b) { time_to_energy(a, b); });
}

std::vector<SpinorAmplitude> SpectralTransform::energy_to_time(
    std::span<const SpinorAmplitude> energy_values) const {
  return per_component(energy_values,
                       [this](std::span<const cplx> a, std::span<cplx> b) { energy_to_time(a, b); });
}

EnergySpectrum to_energy(const BoundarySlice& slice, const EnergyGrid& egrid,
                         const PhysicalConstants& constants) {
  const SpectralTransform tr(slice.tgrid(), egrid, constants);
  return EnergySpectrum(egrid, tr.time_to_energy(slice.values()));
}

BoundarySlice to_time(const EnergySpectrum& spec, const TimeGrid& tgrid, const PhysicalConstants& constants,
                      double position) {
  const SpectralTransform tr(tgrid, spec.grid(), constants);
  return BoundarySlice(tgrid, tr.energy_to_time(spec.values()), position);
}

EnergySpectrum to_energy_direct(const BoundarySlice& slice, const EnergyGrid& egrid,
                                const PhysicalConstants& constants) {
  const auto& tgrid = slice.tgrid();
  require_dual(tgrid, egrid, constants);
  const double hbar = constants.hbar();
  const double w = tgrid.dt() / std::sqrt(two_pi * hbar);
  std::vector<SpinorAmplitude> out(egrid.size());
  for (std::size_t j = 0; j < egrid.size(); ++j) {
    SpinorAmplitude acc;
    for (std::size_t k = 0; k < tgrid.size(); ++k) {
      acc += slice[k] * std::polar(1.0, egrid.at(j) * tgrid.at(k) / hbar);
    }
    out[j] = acc * cplx(w);
  }
  return EnergySpectrum(egrid, std::move(out));
}

BoundarySlice to_time_direct(const EnergySpectrum& spec, const TimeGrid& tgrid,
                             const PhysicalConstants& constants, double position) {
  const auto& egrid = spec.grid();
  require_dual(tgrid, egrid, constants);
  const double hbar = constants.hbar();
  const double w = egrid.d_eps() / std::sqrt(two_pi * hbar);
  std::vector<SpinorAmplitude> out(tgrid.size());
  for (std::size_t k = 0; k < tgrid.size(); ++k) {
    SpinorAmplitude acc;
    for (std::size_t j = 0; j < egrid.size(); ++j) {
      acc += spec[j] * std::polar(1.0, -egrid.at(j) * tgrid.at(k) / hbar);
    }
    out[k] = acc * cplx(w);
  }
  return BoundarySlice(tgrid, std::move(out), position);
}

}  // namespace sts
