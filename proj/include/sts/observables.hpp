#pragma once

#include <vector>

#include "sts/core.hpp"

namespace sts {

/// Sample points with quadrature weights (spacing) along one axis.
struct Axis {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }

  static Axis from_time(const TimeGrid& tgrid);
  // Weights (x[i+1] - x[i-1]) / 2 inside, neighbour spacing at the ends;
  // all equal to dx on a uniform grid.
  static Axis from_space(const SpaceGrid& xgrid);
};

enum class Conditioning { given_x, given_t };

/// rho(t|x) (given_x) or rho(x|t) (given_t) on a (t, x) grid, x-major.
struct ConditionalDensity {
  Axis t;
  Axis x;
  std::vector<double> values;
  Conditioning given = Conditioning::given_x;

  double at(std::size_t it, std::size_t ix) const { return values[ix * t.size() + it]; }
};

struct MarginalDensity {
  Axis axis;
  std::vector<double> values;

  double mass() const;
};

/// P(x, t) >= 0 on a (t, x) grid, x-major.
struct JointDistribution {
  Axis t;
  Axis x;
  std::vector<double> values;

  double at(std::size_t it, std::size_t ix) const { return values[ix * t.size() + it]; }
};

/// rho(t|x) = |phi+|^2 + |phi-|^2.
ConditionalDensity density(const ScField& field);

/// sum_t rho(t|x) dt at one position.
double time_normalization(const ConditionalDensity& rho, std::size_t x_index);

struct ArrivalStatistics {
  double mean = 0.0;
  double variance = 0.0;
  double mode = 0.0;  // argmax refined by a 3-point parabola
};

/// Throws ValidationError when the density has no mass at `x_index`.
ArrivalStatistics arrival_statistics(const ConditionalDensity& rho, std::size_t x_index);

/// P(x, t) = rho(t|x) g(x).
JointDistribution joint_from_time_conditional(const ConditionalDensity& rho_t_given_x, const MarginalDensity& g);
/// P(x, t) = rho(x|t) f(t).
JointDistribution joint_from_position_conditional(const ConditionalDensity& rho_x_given_t,
                                                  const MarginalDensity& f);

MarginalDensity time_marginal(const JointDistribution& p);      // f(t)
MarginalDensity position_marginal(const JointDistribution& p);  // g(x)

struct BayesReport {
  double max_discrepancy = 0.0;
  std::vector<std::size_t> skipped_t;  // rows with f(t) = 0
  std::vector<std::size_t> skipped_x;  // columns with g(x) = 0
};

/// Rebuilds P through both conditionals and reports max |P1 - P2| over the
/// cells whose marginals are positive.
BayesReport bayes_consistency(const JointDistribution& p);

}  // namespace sts
