#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sts/energy_rep.hpp"

using namespace sts;

namespace {

const TimeGrid tgrid(-3.2, 0.1, 64);
const EnergyGrid egrid = make_dual_energy_grid(tgrid, -7.5);

double max_diff(std::span<const SpinorAmplitude> a, std::span<const SpinorAmplitude> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::sqrt((a[i] - b[i]).norm2()));
  return m;
}

std::vector<SpinorAmplitude> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<SpinorAmplitude> v(n);
  for (auto& a : v) a = {cplx(d(rng), d(rng)), cplx(d(rng), d(rng))};
  return v;
}

}  // namespace

TEST(ToEnergy, SingleModeIsOneBin) {
  const std::size_t j1 = 23;
  std::vector<SpinorAmplitude> slice(tgrid.size());
  for (std::size_t k = 0; k < tgrid.size(); ++k) {
    slice[k].plus = std::polar(egrid.d_eps() / std::sqrt(two_pi), -egrid.at(j1) * tgrid.at(k));
  }
  const auto spec = to_energy(BoundarySlice(tgrid, slice), egrid);
  for (std::size_t j = 0; j < egrid.size(); ++j) {
    EXPECT_NEAR(std::abs(spec[j].plus), j == j1 ? 1.0 : 0.0, 1e-12) << j;
    EXPECT_EQ(spec[j].minus, cplx(0.0));
  }
}

TEST(ToEnergy, ZeroSliceGivesZeroSpectrum) {
  const auto spec = to_energy(BoundarySlice(tgrid, std::vector<SpinorAmplitude>(tgrid.size())), egrid);
  for (const auto& c : spec.values()) EXPECT_EQ(c.norm2(), 0.0);
}

TEST(ToEnergy, GaussianMatchesRiemannSum) {
  std::vector<SpinorAmplitude> slice(tgrid.size());
  for (std::size_t k = 0; k < tgrid.size(); ++k) {
    const double t = tgrid.at(k);
    slice[k] = {std::polar(std::exp(-t * t), 2.0 * t), std::exp(-0.5 * (t - 0.3) * (t - 0.3))};
  }
  const auto fast = to_energy(BoundarySlice(tgrid, slice), egrid);
  // Brute force sum written out here, independent of the library's direct path.
  for (std::size_t j = 0; j < egrid.size(); ++j) {
    SpinorAmplitude want;
    for (std::size_t k = 0; k < tgrid.size(); ++k) {
      want += slice[k] * std::polar(tgrid.dt() / std::sqrt(two_pi), egrid.at(j) * tgrid.at(k));
    }
    EXPECT_LT(std::sqrt((fast[j] - want).norm2()), 1e-10) << j;
  }
}

TEST(ToTime, SingleBinIsPlaneWave) {
  std::vector<SpinorAmplitude> c(egrid.size());
  c[5].minus = 1.0;
  const auto slice = to_time(EnergySpectrum(egrid, c), tgrid);
  for (std::size_t k = 0; k < tgrid.size(); ++k) {
    const cplx want = std::polar(egrid.d_eps() / std::sqrt(two_pi), -egrid.at(5) * tgrid.at(k));
    EXPECT_NEAR(std::abs(slice[k].minus - want), 0.0, 1e-13);
    EXPECT_EQ(slice[k].plus, cplx(0.0));
  }
}

TEST(ToTime, TwoBinBeatPeriod) {
  const TimeGrid t(0.0, 0.05, 512);
  const auto e = make_dual_energy_grid(t, 0.0);
  std::vector<SpinorAmplitude> c(e.size());
  c[10].plus = 1.0;
  c[14].plus = 1.0;
  const auto slice = to_time(EnergySpectrum(e, c), t);
  // phi e^{i eps_12 t} = 2 K cos((eps_14 - eps_10) t / 2) is real; the density vanishes at its zeros.
  auto beat = [&](std::size_t k) { return std::real(slice[k].plus * std::polar(1.0, e.at(12) * t.at(k))); };
  std::vector<double> zeros;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double r0 = beat(k);
    const double r1 = beat(k + 1);
    if ((r0 < 0.0) != (r1 < 0.0)) zeros.push_back(t.at(k) + t.dt() * r0 / (r0 - r1));
  }
  ASSERT_GE(zeros.size(), 3u);
  const double expected = two_pi / (e.at(14) - e.at(10));
  for (std::size_t i = 0; i + 1 < zeros.size(); ++i) EXPECT_NEAR(zeros[i + 1] - zeros[i], expected, 1e-3);
}

TEST(Transform, RoundTripRandomSeeds) {
  for (std::uint64_t seed : {1u, 7u, 12345u}) {
    const auto values = random_values(tgrid.size(), seed);
    const BoundarySlice slice(tgrid, values);
    const auto back = to_time(to_energy(slice, egrid), tgrid);
    EXPECT_LT(max_diff(back.values(), values), 1e-10) << "seed " << seed;
    const EnergySpectrum spec(egrid, random_values(egrid.size(), seed + 100));
    EXPECT_LT(max_diff(to_energy(to_time(spec, tgrid), egrid).values(), spec.values()), 1e-10) << "seed " << seed;
  }
}

TEST(Transform, FftMatchesDirect) {
  for (std::size_t n : {5u, 64u, 97u}) {
    const TimeGrid t(1.7, 0.3, n);
    const auto e = make_dual_energy_grid(t, 2.2);
    const EnergySpectrum spec(e, random_values(n, n));
    EXPECT_LT(max_diff(to_time(spec, t).values(), to_time_direct(spec, t).values()), 1e-11);
    const BoundarySlice slice(t, random_values(n, n + 1));
    EXPECT_LT(max_diff(to_energy(slice, e).values(), to_energy_direct(slice, e).values()), 1e-11);
  }
}

TEST(Transform, Parseval) {
  const EnergySpectrum spec(egrid, random_values(egrid.size(), 99));
  const auto slice = to_time(spec, tgrid);
  double time_mass = 0.0;
  for (const auto& a : slice.values()) time_mass += a.norm2() * tgrid.dt();
  EXPECT_NEAR(time_mass, spec.mass(), 1e-12 * spec.mass());
}

TEST(Transform, HbarScalesDuality) {
  const PhysicalConstants c(0.5, 1.0, 1.0, 1.0);
  const auto e = make_dual_energy_grid(tgrid, 0.0, c);
  const EnergySpectrum spec(e, random_values(e.size(), 3));
  EXPECT_LT(max_diff(to_energy(to_time(spec, tgrid, c), e, c).values(), spec.values()), 1e-10);
  EXPECT_LT(max_diff(to_time(spec, tgrid, c).values(), to_time_direct(spec, tgrid, c).values()), 1e-11);
}

TEST(Transform, RejectsNonDualGrids) {
  const EnergyGrid wrong(0.0, 1.0, tgrid.size());
  EXPECT_THROW(to_time(EnergySpectrum::zeros(wrong), tgrid), ValidationError);
}
