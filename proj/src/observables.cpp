#include "sts/observables.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sts {

Axis Axis::from_time(const TimeGrid& tgrid) {
  Axis a;
  a.points.resize(tgrid.size());
  for (std::size_t k = 0; k < tgrid.size(); ++k) a.points[k] = tgrid.at(k);
  a.weights.assign(tgrid.size(), tgrid.dt());
  return a;
}

Axis Axis::from_space(const SpaceGrid& xgrid) {
  Axis a;
  a.points.assign(xgrid.points().begin(), xgrid.points().end());
  const std::size_t n = a.points.size();
  a.weights.assign(n, 1.0);
  if (n < 2) return a;
  a.weights.front() = a.points[1] - a.points[0];
  a.weights.back() = a.points[n - 1] - a.points[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) a.weights[i] = 0.5 * (a.points[i + 1] - a.points[i - 1]);
  return a;
}

double MarginalDensity::mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * axis.weights[i];
  return s;
}

ConditionalDensity density(const ScField& field) {
  ConditionalDensity rho{Axis::from_time(field.tgrid()), Axis::from_space(field.xgrid()), {},
                         Conditioning::given_x};
  const auto v = field.values();
  rho.values.resize(v.size());
  std::transform(v.begin(), v.end(), rho.values.begin(), [](const SpinorAmplitude& a) { return a.norm2(); });
  return rho;
}

double time_normalization(const ConditionalDensity& rho, std::size_t x_index) {
  if (x_index >= rho.x.size()) {
    throw ValidationError(fmt::format("x index {} out of range ({} points)", x_index, rho.x.size()));
  }
  double s = 0.0;
  for (std::size_t it = 0; it < rho.t.size(); ++it) s += rho.at(it, x_index) * rho.t.weights[it];
  return s;
}

ArrivalStatistics arrival_statistics(const ConditionalDensity& rho, std::size_t x_index) {
  const double mass = time_normalization(rho, x_index);
  if (!(mass > 0.0)) {
    throw ValidationError(fmt::format("arrival statistics need positive mass at x index {}", x_index));
  }
  const auto& t = rho.t.points;
  const auto& w = rho.t.weights;
  const std::size_t n = t.size();
  ArrivalStatistics st;
  std::size_t best = 0;
  for (std::size_t it = 0; it < n; ++it) {
    const double r = rho.at(it, x_index);
    st.mean += t[it] * r * w[it];
    if (r > rho.at(best, x_index)) best = it;
  }
  st.mean /= mass;
  for (std::size_t it = 0; it < n; ++it) {
    const double d = t[it] - st.mean;
    st.variance += d * d * rho.at(it, x_index) * w[it];
  }
  st.variance /= mass;

  st.mode = t[best];
  if (best > 0 && best + 1 < n) {
    const double y0 = rho.at(best - 1, x_index);
    const double y1 = rho.at(best, x_index);
    const double y2 = rho.at(best + 1, x_index);
    const double curvature = y0 - 2.0 * y1 + y2;
    if (curvature < 0.0) {
      const double h = 0.5 * (t[best + 1] - t[best - 1]);
      st.mode += 0.5 * (y0 - y2) / curvature * h;
    }
  }
  return st;
}

namespace {

void require_same_axis(const Axis& a, const Axis& b, const char* what) {
  if (a.size() != b.size()) {
    throw ValidationError(fmt::format("{} grids differ in size ({} vs {})", what, a.size(), b.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.points[i] - b.points[i]) > 1e-12 * std::max(1.0, std::abs(a.points[i]))) {
      throw ValidationError(fmt::format("{} grids differ at index {}", what, i));
    }
  }
}

}  // namespace

JointDistribution joint_from_time_conditional(const ConditionalDensity& rho_t_given_x, const MarginalDensity& g) {
  if (rho_t_given_x.given != Conditioning::given_x) {
    throw ValidationError("joint_from_time_conditional needs a density conditioned on x");
  }
  require_same_axis(rho_t_given_x.x, g.axis, "position");
  JointDistribution p{rho_t_given_x.t, rho_t_given_x.x, rho_t_given_x.values};
  const std::size_t nt = p.t.size();
  for (std::size_t ix = 0; ix < p.x.size(); ++ix) {
    for (std::size_t it = 0; it < nt; ++it) p.values[ix * nt + it] *= g.values[ix];
  }
  return p;
}

JointDistribution joint_from_position_conditional(const ConditionalDensity& rho_x_given_t,
                                                  const MarginalDensity& f) {
  if (rho_x_given_t.given != Conditioning::given_t) {
    throw ValidationError("joint_from_position_conditional needs a density conditioned on t");
  }
  require_same_axis(rho_x_given_t.t, f.axis, "time");
  JointDistribution p{rho_x_given_t.t, rho_x_given_t.x, rho_x_given_t.values};
  const std::size_t nt = p.t.size();
  for (std::size_t ix = 0; ix < p.x.size(); ++ix) {
    for (std::size_t it = 0; it < nt; ++it) p.values[ix * nt + it] *= f.values[it];
  }
  return p;
}

MarginalDensity time_marginal(const JointDistribution& p) {
  MarginalDensity f{p.t, std::vector<double>(p.t.size(), 0.0)};
  for (std::size_t ix = 0; ix < p.x.size(); ++ix) {
    for (std::size_t it = 0; it < p.t.size(); ++it) f.values[it] += p.at(it, ix) * p.x.weights[ix];
  }
  return f;
}

MarginalDensity position_marginal(const JointDistribution& p) {
  MarginalDensity g{p.x, std::vector<double>(p.x.size(), 0.0)};
  for (std::size_t ix = 0; ix < p.x.size(); ++ix) {
    for (std::size_t it = 0; it < p.t.size(); ++it) g.values[ix] += p.at(it, ix) * p.t.weights[it];
  }
  return g;
}

BayesReport bayes_consistency(const JointDistribution& p) {
  for (double v : p.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("joint distribution must be finite and >= 0");
  }
  const auto f = time_marginal(p);
  const auto g = position_marginal(p);
  const std::size_t nt = p.t.size();
  const std::size_t nx = p.x.size();

  BayesReport rep;
  for (std::size_t it = 0; it < nt; ++it) {
    if (!(f.values[it] > 0.0)) rep.skipped_t.push_back(it);
  }
  for (std::size_t ix = 0; ix < nx; ++ix) {
    if (!(g.values[ix] > 0.0)) rep.skipped_x.push_back(ix);
  }

  ConditionalDensity x_given_t{p.t, p.x, std::vector<double>(p.values.size(), 0.0), Conditioning::given_t};
  ConditionalDensity t_given_x{p.t, p.x, std::vector<double>(p.values.size(), 0.0), Conditioning::given_x};
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t it = 0; it < nt; ++it) {
      const std::size_t i = ix * nt + it;
      if (f.values[it] > 0.0) x_given_t.values[i] = p.values[i] / f.values[it];
      if (g.values[ix] > 0.0) t_given_x.values[i] = p.values[i] / g.values[ix];
    }
  }
  const auto p1 = joint_from_position_conditional(x_given_t, f);
  const auto p2 = joint_from_time_conditional(t_given_x, g);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    if (!(g.values[ix] > 0.0)) continue;
    for (std::size_t it = 0; it < nt; ++it) {
      if (!(f.values[it] > 0.0)) continue;
      const std::size_t i = ix * nt + it;
      rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(p1.values[i] - p2.values[i]));
    }
  }
  return rep;
}

}  // namespace sts
