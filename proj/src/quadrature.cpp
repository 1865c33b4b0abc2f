#include "sts/quadrature.hpp"

#include <algorithm>

namespace sts {
namespace {

constexpr int scan_samples = 16;

bool near_breakpoint(std::span<const double> breakpoints, double x) {
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
  return std::any_of(breakpoints.begin(), breakpoints.end(),
                     [&](double bp) { return std::abs(bp - x) <= tol; });
}

// Root of eps - V between lo and hi (opposite signs), by bisection to round-off.
template <class G>
double bisect(G& g, double lo, double hi, double g_lo) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct PieceResult {
  double real = 0.0;
  double imag = 0.0;
  bool forbidden = false;
  bool converged = true;
};

// One continuous piece [l, r] of the potential.
template <class G>
PieceResult integrate_piece(G& g, double mass, double l, double r, SimpsonOptions opts) {
  std::vector<double> cuts{l};
  double x_prev = l;
  double g_prev = g(l);
  if (g_prev == 0.0) cuts.push_back(l);
  for (int i = 1; i <= scan_samples; ++i) {
    const double x = i == scan_samples ? r : l + (r - l) * static_cast<double>(i) / scan_samples;
    const double gx = g(x);
    if (gx == 0.0) {
      cuts.push_back(x);
    } else if (g_prev != 0.0 && (gx > 0.0) != (g_prev > 0.0)) {
      cuts.push_back(bisect(g, x_prev, x, g_prev));
    }
    x_prev = x;
    g_prev = gx;
  }
  cuts.push_back(r);

  // Every interior cut is a turning point; a duplicated endpoint marks a
  // turning point sitting exactly on l or r.
  std::vector<double> turning(cuts.begin() + 1, cuts.end() - 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto is_turning = [&](double x) { return std::find(turning.begin(), turning.end(), x) != turning.end(); };

  PieceResult out;
  const std::size_t pieces = cuts.size() - 1;
  SimpsonOptions sub = opts;
  sub.abs_tol = opts.abs_tol / static_cast<double>(std::max<std::size_t>(pieces, 1));
  for (std::size_t k = 0; k < pieces; ++k) {
    const double u = cuts[k];
    const double w = cuts[k + 1];
    if (!(w > u)) continue;
    const double sign = g(0.5 * (u + w)) >= 0.0 ? 1.0 : -1.0;
    auto h = [&](double x) { return std::sqrt(std::max(0.0, 2.0 * mass * sign * g(x))); };

    auto integrate_from_left_tp = [&](double tp, double end, SimpsonOptions o) {
      return adaptive_simpson([&](double s) { return 2.0 * s * h(tp + s * s); }, 0.0,
                              std::sqrt(end - tp), o);
    };
    auto integrate_from_right_tp = [&](double start, double tp, SimpsonOptions o) {
      return adaptive_simpson([&](double s) { return 2.0 * s * h(tp - s * s); }, 0.0,
                              std::sqrt(tp - start), o);
    };

    const bool left_tp = is_turning(u);
    const bool right_tp = is_turning(w);
    QuadResult q;
    if (left_tp && right_tp) {
      SimpsonOptions half = sub;
      half.abs_tol *= 0.5;
      const double m = 0.5 * (u + w);
      const auto q1 = integrate_from_left_tp(u, m, half);
      const auto q2 = integrate_from_right_tp(m, w, half);
      q = {q1.value + q2.value, q1.error_estimate + q2.error_estimate, q1.converged && q2.converged};
    } else if (left_tp) {
      q = integrate_from_left_tp(u, w, sub);
    } else if (right_tp) {
      q = integrate_from_right_tp(u, w, sub);
    } else {
      q = adaptive_simpson(h, u, w, sub);
    }
    out.converged = out.converged && q.converged;
    if (sign > 0.0) {
      out.real += q.value;
    } else {
      out.imag += q.value;
      out.forbidden = true;
    }
  }
  return out;
}

}  // namespace

MomentumIntegral integrate_local_momentum(const PotentialSpec& v, double eps, double mass, double a,
                                          double b, SimpsonOptions opts) {
  MomentumIntegral total;
  if (b < a) {
    total = integrate_local_momentum(v, eps, mass, b, a, opts);
    total.real = -total.real;
    total.imag = -total.imag;
    return total;
  }
  if (!(b > a)) return total;

  std::vector<double> ends{a};
  for (double bp : v.breakpoints()) {
    if (bp > a && bp < b) ends.push_back(bp);
  }
  ends.push_back(b);

  const auto bps = v.breakpoints();
  const std::size_t pieces = ends.size() - 1;
  SimpsonOptions sub = opts;
  sub.abs_tol = opts.abs_tol / static_cast<double>(pieces);
  for (std::size_t k = 0; k < pieces; ++k) {
    const double l = ends[k];
    const double r = ends[k + 1];
    // One-sided limits at jump discontinuities.
    const double nudge = std::min(1e-13 * std::max(1.0, std::max(std::abs(l), std::abs(r))), 1e-6 * (r - l));
    const double lo = near_breakpoint(bps, l) ? l + nudge : l;
    const double hi = near_breakpoint(bps, r) ? r - nudge : r;
    auto g = [&](double x) { return eps - v(std::clamp(x, lo, hi)); };
    const auto piece = integrate_piece(g, mass, l, r, sub);
    total.real += piece.real;
    total.imag += piece.imag;
    total.forbidden = total.forbidden || piece.forbidden;
    total.converged = total.converged && piece.converged;
  }
  return total;
}

}  // namespace sts
