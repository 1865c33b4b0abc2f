#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sts/quadrature.hpp"

using namespace sts;

namespace {

// Independent oracle: double-exponential quadrature copes with the endpoint
// square-root behaviour at turning points.
double oracle(const std::function<double(double)>& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, a, b);
}

}  // namespace

TEST(AdaptiveSimpson, SmoothIntegrals) {
  const auto r = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-10);
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0).value, std::exp(1.0) - 1.0, 1e-10);
  EXPECT_EQ(adaptive_simpson([](double x) { return x; }, 1.0, 1.0).value, 0.0);
}

TEST(AdaptiveSimpson, ReportsNonConvergence) {
  const auto r = adaptive_simpson([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, SimpsonOptions{1e-14, 6});
  EXPECT_FALSE(r.converged);
}

TEST(Romberg, Polynomials) {
  const auto r = romberg([](double x) { return x * x * x - 2.0 * x; }, -1.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 0.75, 1e-12);
  EXPECT_NEAR(romberg([](double x) { return std::cos(x); }, 0.0, 1.0).value, std::sin(1.0), 1e-10);
}

TEST(LocalMomentum, ConstantPotentials) {
  const auto free = integrate_local_momentum(PotentialSpec::free(), 2.0, 1.0, 0.0, 3.0);
  EXPECT_NEAR(free.real, 6.0, 1e-10);
  EXPECT_EQ(free.imag, 0.0);
  EXPECT_FALSE(free.forbidden);
  const auto wall = integrate_local_momentum(PotentialSpec::constant(5.0), 1.0, 1.0, 0.0, 2.0);
  EXPECT_NEAR(wall.real, 0.0, 1e-12);
  EXPECT_NEAR(wall.imag, 2.0 * std::sqrt(8.0), 1e-10);
  EXPECT_TRUE(wall.forbidden);
}

TEST(LocalMomentum, TurningPointAtEnd) {
  // V = x, eps = 1: turning point at x = 1.
  const auto r = integrate_local_momentum(PotentialSpec::linear(1.0), 1.0, 1.0, 0.0, 1.0);
  EXPECT_TRUE(r.converged);
  const double closed = 2.0 * std::sqrt(2.0) / 3.0;
  EXPECT_NEAR(r.real, closed, 1e-9);
  EXPECT_NEAR(r.real, oracle([](double x) { return std::sqrt(std::max(0.0, 2.0 * (1.0 - x))); }, 0.0, 1.0), 1e-9);
  EXPECT_NEAR(r.imag, 0.0, 1e-12);
}

TEST(LocalMomentum, ThroughTurningPoint) {
  const auto r = integrate_local_momentum(PotentialSpec::linear(1.0), 1.0, 1.0, 0.0, 2.0);
  const double closed = 2.0 * std::sqrt(2.0) / 3.0;
  EXPECT_NEAR(r.real, closed, 1e-9);
  EXPECT_NEAR(r.imag, closed, 1e-9);
  EXPECT_TRUE(r.forbidden);
  // Off-centre turning point with a mass other than 1.
  const auto v = PotentialSpec::linear(0.7, -0.2);
  const auto q = integrate_local_momentum(v, 0.9, 2.5, -1.0, 3.0);
  const double xt = (0.9 + 0.2) / 0.7;
  EXPECT_NEAR(q.real, oracle([&](double x) { return std::sqrt(5.0 * (0.9 - v(x))); }, -1.0, xt), 1e-9);
  EXPECT_NEAR(q.imag, oracle([&](double x) { return std::sqrt(5.0 * (v(x) - 0.9)); }, xt, 3.0), 1e-9);
}

TEST(LocalMomentum, ReversedIntervalIsSigned) {
  const auto fwd = integrate_local_momentum(PotentialSpec::linear(1.0), 1.0, 1.0, 0.0, 2.0);
  const auto back = integrate_local_momentum(PotentialSpec::linear(1.0), 1.0, 1.0, 2.0, 0.0);
  EXPECT_NEAR(back.real, -fwd.real, 1e-12);
  EXPECT_NEAR(back.imag, -fwd.imag, 1e-12);
}

TEST(LocalMomentum, StepJump) {
  const auto r = integrate_local_momentum(PotentialSpec::step(1.0, 5.0), 1.0, 1.0, 0.0, 2.0);
  EXPECT_NEAR(r.real, std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(r.imag, std::sqrt(8.0), 1e-10);
}

TEST(LocalMomentum, TwoTurningPointsInsideOnePiece) {
  // Barrier V = 2 - (x - 1)^2 with eps = 1.5: forbidden on (1 - 1/sqrt2, 1 + 1/sqrt2).
  const auto v = PotentialSpec::from_function([](double x) { return 2.0 - (x - 1.0) * (x - 1.0); });
  const auto r = integrate_local_momentum(v, 1.5, 1.0, -0.5, 2.5);
  auto re = [&](double x) { return std::sqrt(std::max(0.0, 2.0 * (1.5 - v(x)))); };
  auto im = [&](double x) { return std::sqrt(std::max(0.0, 2.0 * (v(x) - 1.5))); };
  const double a = 1.0 - std::sqrt(0.5);
  const double b = 1.0 + std::sqrt(0.5);
  EXPECT_NEAR(r.real, oracle(re, -0.5, a) + oracle(re, b, 2.5), 1e-9);
  EXPECT_NEAR(r.imag, oracle(im, a, b), 1e-9);
}
