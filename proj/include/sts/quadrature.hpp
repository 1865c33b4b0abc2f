#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "sts/core.hpp"

namespace sts {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

struct SimpsonOptions {
  double abs_tol = 1e-10;
  int max_depth = 40;
};

namespace detail {

template <class F>
struct SimpsonState {
  F& f;
  int max_depth;
  double error = 0.0;
  bool converged = true;
};

template <class F>
double simpson_refine(SimpsonState<F>& st, double a, double fa, double m, double fm, double b, double fb,
                      double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() *
                          (std::abs(left) + std::abs(right));
  const bool collapsed = !(a < lm && lm < m && m < rm && rm < b);
  if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= roundoff || collapsed) {
    st.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  if (depth >= st.max_depth) {
    st.converged = false;
    st.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_refine(st, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1) +
         simpson_refine(st, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Adaptive Simpson with interval bisection. Each split halves the tolerance;
// refinement stops at `max_depth` levels and reports non-convergence.
template <class F>
QuadResult adaptive_simpson(F&& f, double a, double b, SimpsonOptions opts = {}) {
  if (a == b) return {};
  detail::SimpsonState<F> st{f, opts.max_depth};
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double v = detail::simpson_refine(st, a, fa, m, fm, b, fb, whole, opts.abs_tol, 0);
  return {v, st.error, st.converged};
}

// Romberg extrapolation of the composite trapezoid rule.
template <class F>
QuadResult romberg(F&& f, double a, double b, double abs_tol = 1e-10, int max_levels = 20) {
  if (a == b) return {};
  std::vector<double> prev, cur;
  double h = b - a;
  prev.push_back(0.5 * h * (f(a) + f(b)));
  std::size_t intervals = 1;
  for (int level = 1; level <= max_levels; ++level) {
    double mid = 0.0;
    for (std::size_t i = 0; i < intervals; ++i) mid += f(a + (static_cast<double>(i) + 0.5) * h);
    intervals *= 2;
    h *= 0.5;
    cur.assign(static_cast<std::size_t>(level) + 1, 0.0);
    cur[0] = 0.5 * prev[0] + h * mid;
    double factor = 1.0;
    for (int k = 1; k <= level; ++k) {
      factor *= 4.0;
      cur[k] = cur[k - 1] + (cur[k - 1] - prev[k - 1]) / (factor - 1.0);
    }
    const double err = std::abs(cur[level] - prev[level - 1]);
    if (level >= 3 && err <= abs_tol) return {cur[level], err, true};
    prev.swap(cur);
  }
  return {prev.back(), std::abs(prev.back() - prev[prev.size() - 2]), false};
}

// Signed integral of sqrt(2 m (eps - V(x))) from a to b, split into the
// classically allowed part (real) and the forbidden part (imag, >= 0 for a < b).
// Jumps listed as breakpoints and sign changes of eps - V are bracketed;
// the square-root cusp at a turning point is removed by x = x_t +- s^2.
struct MomentumIntegral {
  double real = 0.0;
  double imag = 0.0;
  bool forbidden = false;
  bool converged = true;
};

MomentumIntegral integrate_local_momentum(const PotentialSpec& v, double eps, double mass, double a,
                                          double b, SimpsonOptions opts = {});

}  // namespace sts
