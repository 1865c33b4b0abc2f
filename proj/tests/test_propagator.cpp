#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sts/energy_rep.hpp"
#include "sts/propagator.hpp"

using namespace sts;

namespace {

const TimeGrid tgrid(-4.0, 0.125, 64);
const EnergyGrid egrid = make_dual_energy_grid(tgrid, 0.25);

EnergySpectrum single_mode(std::size_t j, Component comp, cplx value = 1.0) {
  std::vector<SpinorAmplitude> c(egrid.size());
  (comp == Component::plus ? c[j].plus : c[j].minus) = value;
  return EnergySpectrum(egrid, std::move(c));
}

EnergySpectrum gaussian(double center, double width, Component comp = Component::plus) {
  std::vector<SpinorAmplitude> c(egrid.size());
  for (std::size_t j = 0; j < egrid.size(); ++j) {
    const double d = egrid.at(j) - center;
    (comp == Component::plus ? c[j].plus : c[j].minus) = std::exp(-d * d / (4.0 * width * width));
  }
  return EnergySpectrum(egrid, std::move(c));
}

}  // namespace

TEST(AccumulatePhase, ConstantExamples) {
  const auto free = accumulate_phase(PotentialSpec::free(), EnergyGrid(2.0, 1.0, 2), SpaceGrid({0.0, 3.0}, 0));
  EXPECT_NEAR(free.action(0, 1), 6.0, 1e-10);
  EXPECT_EQ(free.decay(0, 1), 0.0);
  EXPECT_FALSE(free.crossed_forbidden(0, 1));
  const auto wall =
      accumulate_phase(PotentialSpec::constant(5.0), EnergyGrid(1.0, 1.0, 2), SpaceGrid({0.0, 2.0}, 0));
  EXPECT_NEAR(wall.action(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(wall.decay(0, 1), 5.656854249492381, 1e-10);
  EXPECT_TRUE(wall.crossed_forbidden(0, 1));
}

TEST(AccumulatePhase, LinearTurningPoint) {
  const auto t = accumulate_phase(PotentialSpec::linear(1.0), EnergyGrid(1.0, 1.0, 2), SpaceGrid({0.0, 1.0}, 0));
  boost::math::quadrature::tanh_sinh<double> q;
  const double oracle = q.integrate([](double x) { return std::sqrt(std::max(0.0, 2.0 * (1.0 - x))); }, 0.0, 1.0);
  EXPECT_NEAR(t.action(0, 1), oracle, 1e-9);
  EXPECT_NEAR(t.action(0, 1), 2.0 * std::sqrt(2.0) / 3.0, 1e-9);
}

TEST(AccumulatePhase, SignedLeftOfAnchor) {
  const auto t = accumulate_phase(PotentialSpec::constant(5.0), EnergyGrid(1.0, 1.0, 2),
                                  SpaceGrid::uniform(-2.0, 2.0, 5, 2));
  EXPECT_EQ(t.action(0, 2), 0.0);
  EXPECT_EQ(t.decay(0, 2), 0.0);
  EXPECT_NEAR(t.decay(0, 0), -2.0 * std::sqrt(8.0), 1e-10);
  EXPECT_NEAR(t.decay(0, 4), 2.0 * std::sqrt(8.0), 1e-10);
}

TEST(AccumulatePhase, ThreadCountDoesNotChangeBits) {
  const auto xg = SpaceGrid::uniform(0.0, 3.0, 31);
  const auto v = PotentialSpec::linear(1.5);
  const auto a = accumulate_phase(v, egrid, xg, {}, PhaseOptions{{}, 1});
  const auto b = accumulate_phase(v, egrid, xg, {}, PhaseOptions{{}, 3});
  for (std::size_t ix = 0; ix < xg.size(); ++ix) {
    for (std::size_t j = 0; j < egrid.size(); ++j) {
      EXPECT_EQ(a.action(j, ix), b.action(j, ix));
      EXPECT_EQ(a.decay(j, ix), b.decay(j, ix));
    }
  }
}

TEST(BuildEmPhase, UniformVectorPotentialIsCommonPhase) {
  const PhysicalConstants k(1.0, 1.0, 2.0, 4.0);
  const auto t = build_em_phase(EMFieldSpec::uniform(0.0, 0.7, k), egrid, SpaceGrid({0.0, 1.5}, 0));
  EXPECT_NEAR(t.common(1), 2.0 * 0.7 * 1.5 / 4.0, 1e-12);
}

TEST(BuildEmPhase, ScalarPotentialReducesToV) {
  const PhysicalConstants k(1.0, 1.0, 2.0, 1.0);
  const auto xg = SpaceGrid::uniform(0.0, 2.0, 9);
  const auto em = build_em_phase(EMFieldSpec::uniform(0.3, 0.0, k), egrid, xg);
  const auto v = accumulate_phase(PotentialSpec::constant(0.6), egrid, xg, k);
  for (std::size_t ix = 0; ix < xg.size(); ++ix) {
    for (std::size_t j = 0; j < egrid.size(); ++j) {
      EXPECT_NEAR(em.action(j, ix), v.action(j, ix), 1e-12);
      EXPECT_NEAR(em.decay(j, ix), v.decay(j, ix), 1e-12);
    }
  }
}

TEST(BuildEmPhase, NonUniformFieldsAgainstOracle) {
  EMFieldSpec em;
  em.phi = [](double x) { return x; };
  em.a = [](double x) { return std::sin(x); };
  const EnergyGrid e(3.0, 1.0, 2);
  const auto t = build_em_phase(em, e, SpaceGrid({0.0, 1.0}, 0));
  boost::math::quadrature::tanh_sinh<double> q;
  EXPECT_NEAR(t.action(0, 1), q.integrate([](double x) { return std::sqrt(2.0 * (3.0 - x)); }, 0.0, 1.0), 1e-9);
  EXPECT_NEAR(t.common(1), 1.0 - std::cos(1.0), 1e-9);
}

TEST(Propagate, FreeSingleModePlaneWave) {
  const std::size_t j = 20;
  const auto xg = SpaceGrid::uniform(-1.0, 2.0, 7, 2);
  const auto field = propagate(single_mode(j, Component::plus), accumulate_phase(PotentialSpec::free(), egrid, xg),
                               tgrid);
  const double p = std::sqrt(2.0 * egrid.at(j));
  for (std::size_t ix = 0; ix < xg.size(); ++ix) {
    for (std::size_t it = 0; it < tgrid.size(); ++it) {
      const cplx want = std::polar(egrid.d_eps() / std::sqrt(two_pi),
                                   p * (xg.at(ix) - xg.anchor()) - egrid.at(j) * tgrid.at(it));
      EXPECT_LT(std::abs(field.at(it, ix).plus - want), 1e-12);
      EXPECT_EQ(field.at(it, ix).minus, cplx(0.0));
    }
  }
}

TEST(Propagate, AnchorSliceIsBoundaryData) {
  const auto spec = gaussian(2.0, 0.3);
  const auto xg = SpaceGrid::uniform(0.0, 4.0, 9, 3);
  const auto field = propagate(spec, accumulate_phase(PotentialSpec::linear(0.2), egrid, xg), tgrid);
  const auto boundary = to_time(spec, tgrid);
  for (std::size_t it = 0; it < tgrid.size(); ++it) {
    EXPECT_LT(std::sqrt((field.at(it, 3) - boundary[it]).norm2()), 1e-13);
  }
}

TEST(Propagate, EvanescentAmplitudeRatio) {
  const EnergyGrid e = make_dual_energy_grid(tgrid, 1.0);
  std::vector<SpinorAmplitude> c(e.size());
  c[0].plus = 1.0;
  const auto xg = SpaceGrid::uniform(0.0, 2.0, 21);
  const auto field = propagate(EnergySpectrum(e, c), accumulate_phase(PotentialSpec::step(1.0, 5.0), e, xg), tgrid);
  const double ratio = std::abs(field.at(0, 17).plus) / std::abs(field.at(0, 12).plus);
  EXPECT_NEAR(ratio, std::exp(-std::sqrt(8.0) * (xg.at(17) - xg.at(12))), 1e-9);
}

TEST(Propagate, UnimodularInAllowedRegion) {
  const auto spec = gaussian(3.0, 0.4);
  const auto xg = SpaceGrid::uniform(0.0, 3.0, 13);
  const auto field = propagate(spec, accumulate_phase(PotentialSpec::linear(0.3), egrid, xg), tgrid);
  const SpectralTransform tr(tgrid, egrid, {});
  for (std::size_t ix = 0; ix < xg.size(); ++ix) {
    const auto modes = tr.time_to_energy(field.slice(ix));
    for (std::size_t j = 0; j < egrid.size(); ++j) {
      if (egrid.at(j) <= 0.9) continue;  // max V on the grid
      EXPECT_NEAR(std::abs(modes[j].plus), std::abs(spec[j].plus), 1e-10) << j << " " << ix;
    }
  }
}

TEST(Propagate, StrictOverflowNamesFirstCell) {
  const EnergyGrid e = make_dual_energy_grid(tgrid, 1.0);
  std::vector<SpinorAmplitude> c(e.size());
  c[0].minus = 1.0;
  const auto xg = SpaceGrid::uniform(0.0, 12.0, 49);
  const auto table = accumulate_phase(PotentialSpec::step(1.0, 5.0), e, xg);
  try {
    propagate(EnergySpectrum(e, c), table, tgrid, PropagateOptions{ForbiddenMode::strict, 1e12, false, 3});
    FAIL() << "expected OverflowError";
  } catch (const OverflowError& err) {
    // e^{sqrt(8)(x - 1)} first exceeds 1e12 past x = 1 + ln(1e12)/sqrt(8) = 10.77.
    EXPECT_EQ(err.energy_index(), 0u);
    EXPECT_EQ(err.x_index(), 44u);
    EXPECT_DOUBLE_EQ(err.x(), 11.0);
  }
}

TEST(Propagate, ClampCapsGrowthAndDecayNeverTrips) {
  const EnergyGrid e = make_dual_energy_grid(tgrid, 1.0);
  std::vector<SpinorAmplitude> c(e.size());
  c[0].minus = 1.0;
  c[1].plus = 1.0;
  const auto xg = SpaceGrid::uniform(0.0, 12.0, 49);
  const auto table = accumulate_phase(PotentialSpec::step(1.0, 5.0), e, xg);
  const auto field = propagate(EnergySpectrum(e, c), table, tgrid, PropagateOptions{ForbiddenMode::clamp});
  const double unit = e.d_eps() / std::sqrt(two_pi);
  for (std::size_t ix = 0; ix < xg.size(); ++ix) {
    EXPECT_LE(std::abs(field.at(0, ix).minus), 1e12 * unit * (1.0 + 1e-12));
  }
  EXPECT_NEAR(std::abs(field.at(0, 48).minus), 1e12 * unit, 1e-3 * unit);

  // Only decaying content: strict mode is fine.
  std::vector<SpinorAmplitude> d(e.size());
  d[0].plus = 1.0;
  EXPECT_NO_THROW(propagate(EnergySpectrum(e, d), table, tgrid));
}

TEST(Propagate, DropGrowingZeroesGrowingComponent) {
  const EnergyGrid e = make_dual_energy_grid(tgrid, 1.0);
  std::vector<SpinorAmplitude> c(e.size());
  c[0] = {1.0, 1.0};
  const auto xg = SpaceGrid::uniform(0.0, 12.0, 49);
  const auto table = accumulate_phase(PotentialSpec::step(1.0, 5.0), e, xg);
  const auto field =
      propagate(EnergySpectrum(e, c), table, tgrid, PropagateOptions{ForbiddenMode::strict, 1e12, true, 1});
  EXPECT_NE(field.at(0, 2).minus, cplx(0.0));  // still allowed at x = 0.5
  EXPECT_EQ(field.at(0, 40).minus, cplx(0.0));
  EXPECT_NE(field.at(0, 40).plus, cplx(0.0));
}

TEST(Propagate, ThreadCountDoesNotChangeBits) {
  const auto spec = gaussian(2.0, 0.3);
  const auto xg = SpaceGrid::uniform(0.0, 4.0, 17);
  const auto table = accumulate_phase(PotentialSpec::linear(0.4), egrid, xg);
  const auto a = propagate(spec, table, tgrid, PropagateOptions{ForbiddenMode::clamp, 1e12, false, 1});
  const auto b = propagate(spec, table, tgrid, PropagateOptions{ForbiddenMode::clamp, 1e12, false, 4});
  ASSERT_EQ(a.values().size(), b.values().size());
  EXPECT_EQ(std::memcmp(a.values().data(), b.values().data(), a.values().size_bytes()), 0);
}

TEST(Propagate, RejectsForeignEnergyGrid) {
  const auto table = accumulate_phase(PotentialSpec::free(), egrid, SpaceGrid::uniform(0.0, 1.0, 3));
  const EnergyGrid other = make_dual_energy_grid(tgrid, 0.5);
  EXPECT_THROW(propagate(EnergySpectrum::zeros(other), table, tgrid), ValidationError);
}

TEST(ScResidual, SecondOrderForFreeMode) {
  double prev = 0.0;
  std::vector<double> orders;
  for (std::size_t points : {11u, 21u, 41u}) {
    const auto xg = SpaceGrid::uniform(0.0, 1.0, points);
    const auto field =
        propagate(single_mode(30, Component::plus), accumulate_phase(PotentialSpec::free(), egrid, xg), tgrid);
    const double r = sc_residual(field, PotentialSpec::free(), egrid).max;
    if (prev > 0.0) orders.push_back(std::log2(prev / r));
    prev = r;
  }
  for (double o : orders) EXPECT_NEAR(o, 2.0, 0.05);
}

TEST(ScResidual, ZeroField) {
  const auto xg = SpaceGrid::uniform(0.0, 1.0, 5);
  const auto r = sc_residual(ScField(tgrid, xg), PotentialSpec::linear(1.0), egrid);
  EXPECT_EQ(r.max, 0.0);
  EXPECT_EQ(r.mean, 0.0);
}

TEST(ScResidual, LocalizesCorruptedBin) {
  const auto xg = SpaceGrid::uniform(0.0, 2.0, 81);
  const auto v = PotentialSpec::linear(0.5);
  const auto spec = gaussian(3.0, 0.5);
  const auto field = propagate(spec, accumulate_phase(v, egrid, xg), tgrid);
  const SpectralTransform tr(tgrid, egrid, {});
  const std::size_t jc = 4;  // eps = 3.39, near the packet centre
  const std::size_t xc = 40;
  auto modes = tr.time_to_energy(field.slice(xc));
  modes[jc] *= 1.1;
  ScField bad = field;
  const auto slice = tr.energy_to_time(modes);
  std::copy(slice.begin(), slice.end(), bad.slice(xc).begin());
  const auto r = sc_residual(bad, v, egrid);
  EXPECT_EQ(r.argmax_energy, jc);
  EXPECT_GE(r.at(jc, xc), 10.0 * r.at(jc - 1, xc));
  EXPECT_GE(r.at(jc, xc), 10.0 * r.at(jc + 1, xc));
}
