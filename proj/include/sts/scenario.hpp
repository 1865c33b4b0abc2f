#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sts/core.hpp"
#include "sts/propagator.hpp"

namespace sts {

/// Every problem found while parsing one scenario, in file order.
class ScenarioError : public ValidationError {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class SpectrumFamily { gaussian, monochromatic, momentum_gaussian };
enum class PotentialFamily { free, constant, linear, step };
enum class RunMode { propagate, gauge_check, oracle_compare, arrival_stats, lagrangian_check };

struct SpectrumChoice {
  SpectrumFamily family = SpectrumFamily::gaussian;
  Component component = Component::plus;
  double center = 0.0;  // gaussian
  double width = 0.0;   // gaussian, standard deviation of |C|^2
  double energy = 0.0;  // monochromatic
  double p0 = 0.0;      // momentum-gaussian
  double sigma_p = 0.0;
  double support_sigmas = 8.0;
  bool normalize = true;
};

struct PotentialChoice {
  PotentialFamily family = PotentialFamily::free;
  double v0 = 0.0;     // constant level, step height
  double slope = 0.0;  // linear
  double x_s = 0.0;    // step position
};

// Phi(x) = phi0 + phi_slope x, A(x) = a0 + a_slope x.
struct EMChoice {
  double phi0 = 0.0;
  double phi_slope = 0.0;
  double a0 = 0.0;
  double a_slope = 0.0;
};

// F(x, t) = f0 + f1 x + f2 x^2 + alpha t.
struct GaugeChoice {
  double f0 = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double alpha = 0.0;
};

struct Scenario {
  PhysicalConstants constants;
  TimeGrid tgrid;
  EnergyGrid egrid;
  SpaceGrid xgrid;
  SpectrumChoice spectrum;
  PotentialChoice potential;
  std::optional<EMChoice> em;
  std::optional<GaugeChoice> gauge;
  RunMode mode = RunMode::propagate;
  ForbiddenMode forbidden = ForbiddenMode::clamp;
  bool drop_growing = false;
  unsigned threads = 1;
  std::string output;  // empty: caller decides
  std::optional<double> arrival_x;
  std::map<std::string, double> tolerances;  // defaults merged with overrides
};

/// Pass/fail thresholds used by the run modes, keyed as in the [tolerances] section.
const std::map<std::string, double>& default_tolerances();

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

std::string_view to_string(RunMode mode);

PotentialSpec make_potential(const Scenario& s);
EMFieldSpec make_em(const Scenario& s);
EnergySpectrum make_spectrum(const Scenario& s);

}  // namespace sts
