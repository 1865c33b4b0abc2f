#include "sts/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "sts/gauge.hpp"
#include "sts/oracles.hpp"

namespace sts {

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : ValidationError([&] {
        std::string msg = fmt::format("scenario has {} problem(s):", problems.size());
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tol{
      {"oracle_rel_l2", 1e-6},       {"normalization", 1e-8},      {"gauge_density", 1e-10},
      {"gauge_covariance", 1e-8},    {"arrival_bins", 2.0},        {"residual_agreement", 1e-9},
      {"edge_mass_fraction", 1e-6},
  };
  return tol;
}

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::propagate: return "propagate";
    case RunMode::gauge_check: return "gauge-check";
    case RunMode::oracle_compare: return "oracle-compare";
    case RunMode::arrival_stats: return "arrival-stats";
    case RunMode::lagrangian_check: return "lagrangian-check";
  }
  return "?";
}

namespace {

namespace pt = boost::property_tree;

// Defaults reproduce the free Gaussian reference packet: p0 = 5, sigma_p = 0.5
// on a 256-sample window of length 40 and 64 points over [0, 10].
constexpr double default_t0 = -5.0;
constexpr double default_dt = 0.15625;
constexpr std::size_t default_n = 256;
constexpr double default_eps0 = 0.3;

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"constants", {"hbar", "mass", "charge", "light_speed"}},
      {"time", {"t0", "dt", "n"}},
      {"energy", {"eps0", "d_eps"}},
      {"space", {"x_min", "x_max", "points", "anchor"}},
      {"spectrum",
       {"family", "component", "center", "width", "energy", "p0", "sigma_p", "support_sigmas", "normalize"}},
      {"potential", {"family", "v0", "slope", "x_s"}},
      {"em", {"phi0", "phi_slope", "a0", "a_slope"}},
      {"gauge", {"f0", "f1", "f2", "alpha", "alpha_bins"}},
      {"run", {"mode", "forbidden", "drop_growing", "output", "arrival_x", "threads"}},
      {"tolerances", [] {
         std::vector<std::string> keys;
         for (const auto& [k, v] : default_tolerances()) keys.push_back(k);
         return keys;
       }()},
  };
  return s;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string nearest(std::string_view word, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& c : candidates) {
    const std::size_t d = edit_distance(word, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

// Collects problems while reading typed values out of the tree.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::vector<std::string> problems;

  bool has_section(const std::string& sec) const { return tree_.get_child_optional(sec).has_value(); }

  std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
    const auto child = tree_.get_child_optional(sec);
    if (!child) return std::nullopt;
    const auto v = child->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return v->data();
  }

  double real(const std::string& sec, const std::string& key, double fallback) {
    return real_opt(sec, key).value_or(fallback);
  }

  std::optional<double> real_opt(const std::string& sec, const std::string& key) {
    const auto s = raw(sec, key);
    if (!s) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
    if (ec != std::errc() || ptr != s->data() + s->size() || !std::isfinite(v)) {
      problems.push_back(fmt::format("{}.{} = '{}' is not a finite number", sec, key, *s));
      return std::nullopt;
    }
    return v;
  }

  std::optional<long long> integer_opt(const std::string& sec, const std::string& key) {
    const auto s = raw(sec, key);
    if (!s) return std::nullopt;
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
    if (ec != std::errc() || ptr != s->data() + s->size()) {
      problems.push_back(fmt::format("{}.{} = '{}' is not an integer", sec, key, *s));
      return std::nullopt;
    }
    return v;
  }

  std::size_t count(const std::string& sec, const std::string& key, std::size_t fallback, std::size_t minimum) {
    const auto v = integer_opt(sec, key);
    if (!v) return fallback;
    if (*v < static_cast<long long>(minimum)) {
      problems.push_back(fmt::format("{}.{} = {} must be at least {}", sec, key, *v, minimum));
      return fallback;
    }
    return static_cast<std::size_t>(*v);
  }

  bool boolean(const std::string& sec, const std::string& key, bool fallback) {
    const auto s = raw(sec, key);
    if (!s) return fallback;
    if (*s == "true" || *s == "yes" || *s == "1") return true;
    if (*s == "false" || *s == "no" || *s == "0") return false;
    problems.push_back(fmt::format("{}.{} = '{}' is not a boolean (true/false)", sec, key, *s));
    return fallback;
  }

  template <class E>
  E choice(const std::string& sec, const std::string& key, const std::vector<std::pair<std::string, E>>& options,
           E fallback) {
    const auto s = raw(sec, key);
    if (!s) return fallback;
    for (const auto& [name, value] : options) {
      if (*s == name) return value;
    }
    std::vector<std::string> names;
    for (const auto& o : options) names.push_back(o.first);
    problems.push_back(fmt::format("{}.{} = '{}' is not one of {} (did you mean '{}'?)", sec, key, *s,
                                   fmt::join(names, ", "), nearest(*s, names)));
    return fallback;
  }

  void check_keys() {
    std::vector<std::string> sections;
    for (const auto& [name, keys] : schema()) sections.push_back(name);
    for (const auto& [sec, child] : tree_) {
      const auto it = schema().find(sec);
      if (child.empty()) {
        problems.push_back(fmt::format("key '{}' appears outside any section", sec));
        continue;
      }
      if (it == schema().end()) {
        problems.push_back(
            fmt::format("unknown section [{}] (nearest valid section: [{}])", sec, nearest(sec, sections)));
        continue;
      }
      for (const auto& [key, value] : child) {
        if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
          problems.push_back(fmt::format("unknown key '{}' in [{}] (nearest valid key: '{}')", key, sec,
                                         nearest(key, it->second)));
        }
      }
    }
  }

 private:
  const pt::ptree& tree_;
};

// Boost's INI reader only knows ';' comments.
std::string strip_hash_comments(std::string_view text) {
  std::string out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') line.clear();
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in(strip_hash_comments(text));
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ScenarioError({fmt::format("line {}: {}", e.line(), e.message())});
  }

  Reader r(tree);
  r.check_keys();

  // Constants
  PhysicalConstants constants;
  try {
    constants = PhysicalConstants(r.real("constants", "hbar", 1.0), r.real("constants", "mass", 1.0),
                                  r.real("constants", "charge", 1.0), r.real("constants", "light_speed", 1.0));
  } catch (const ValidationError& e) {
    r.problems.push_back(e.what());
  }

  // Grids
  std::optional<TimeGrid> tgrid;
  {
    const double t0 = r.real("time", "t0", default_t0);
    const double dt = r.real("time", "dt", default_dt);
    const std::size_t n = r.count("time", "n", default_n, 2);
    if (!(dt > 0.0)) {
      r.problems.push_back(fmt::format("time.dt = {} must be positive", dt));
    } else {
      tgrid.emplace(t0, dt, n);
    }
  }
  std::optional<EnergyGrid> egrid;
  if (tgrid) {
    const double eps0 = r.real("energy", "eps0", default_eps0);
    const auto d_eps = r.real_opt("energy", "d_eps");
    egrid = make_dual_energy_grid(*tgrid, eps0, constants);
    if (d_eps) {
      const EnergyGrid given(eps0, *d_eps, tgrid->size());
      try {
        require_dual(*tgrid, given, constants);
        egrid = given;
      } catch (const ValidationError& e) {
        r.problems.push_back(e.what());
        egrid.reset();
      }
    }
  }
  std::optional<SpaceGrid> xgrid;
  {
    const double x_min = r.real("space", "x_min", 0.0);
    const double x_max = r.real("space", "x_max", 10.0);
    const std::size_t points = r.count("space", "points", 64, 2);
    const std::size_t anchor = r.count("space", "anchor", 0, 0);
    if (!(x_max > x_min)) {
      r.problems.push_back(fmt::format("space.x_max = {} must exceed space.x_min = {}", x_max, x_min));
    } else if (anchor >= points) {
      r.problems.push_back(fmt::format("space.anchor = {} must be below space.points = {}", anchor, points));
    } else {
      xgrid = SpaceGrid::uniform(x_min, x_max, points, anchor);
    }
  }

  // Spectrum
  SpectrumChoice spec;
  spec.family = r.choice<SpectrumFamily>("spectrum", "family",
                                         {{"gaussian", SpectrumFamily::gaussian},
                                          {"monochromatic", SpectrumFamily::monochromatic},
                                          {"momentum-gaussian", SpectrumFamily::momentum_gaussian}},
                                         r.has_section("spectrum") ? SpectrumFamily::gaussian
                                                                   : SpectrumFamily::momentum_gaussian);
  spec.component = r.choice<Component>("spectrum", "component",
                                       {{"plus", Component::plus}, {"minus", Component::minus}}, Component::plus);
  switch (spec.family) {
    case SpectrumFamily::gaussian:
      spec.center = r.real("spectrum", "center", 2.0);
      spec.width = r.real("spectrum", "width", 0.1);
      if (!(spec.width > 0.0)) r.problems.push_back(fmt::format("spectrum.width = {} must be positive", spec.width));
      spec.normalize = r.boolean("spectrum", "normalize", true);
      break;
    case SpectrumFamily::monochromatic:
      spec.energy = r.real("spectrum", "energy", 1.0);
      spec.normalize = r.boolean("spectrum", "normalize", true);
      if (egrid) {
        const double pos = (spec.energy - egrid->eps0()) / egrid->d_eps();
        const double j = std::round(pos);
        if (std::abs(pos - j) > 1e-6 || j < 0.0 || j >= static_cast<double>(egrid->size())) {
          r.problems.push_back(fmt::format(
              "spectrum.energy = {} is not on the energy grid (eps0 = {}, d_eps = {}, {} bins)", spec.energy,
              egrid->eps0(), egrid->d_eps(), egrid->size()));
        }
      }
      break;
    case SpectrumFamily::momentum_gaussian:
      spec.p0 = r.real("spectrum", "p0", 5.0);
      spec.sigma_p = r.real("spectrum", "sigma_p", 0.5);
      spec.support_sigmas = r.real("spectrum", "support_sigmas", 8.0);
      spec.normalize = r.boolean("spectrum", "normalize", false);
      if (!(spec.sigma_p > 0.0) || !(spec.support_sigmas > 0.0)) {
        r.problems.push_back("spectrum.sigma_p and spectrum.support_sigmas must be positive");
      } else if (std::abs(spec.p0) <= spec.support_sigmas * spec.sigma_p) {
        r.problems.push_back(fmt::format(
            "momentum support p0 +- {} sigma_p = [{}, {}] contains p = 0", spec.support_sigmas,
            spec.p0 - spec.support_sigmas * spec.sigma_p, spec.p0 + spec.support_sigmas * spec.sigma_p));
      }
      break;
  }

  // Potential and EM fields
  PotentialChoice pot;
  pot.family = r.choice<PotentialFamily>("potential", "family",
                                         {{"free", PotentialFamily::free},
                                          {"constant", PotentialFamily::constant},
                                          {"linear", PotentialFamily::linear},
                                          {"step", PotentialFamily::step}},
                                         PotentialFamily::free);
  pot.v0 = r.real("potential", "v0", 0.0);
  pot.slope = r.real("potential", "slope", 0.0);
  pot.x_s = r.real("potential", "x_s", 0.0);
  if (pot.family == PotentialFamily::step && !r.raw("potential", "x_s")) {
    r.problems.push_back("potential.family = step needs potential.x_s");
  }

  std::optional<EMChoice> em;
  if (r.has_section("em")) {
    em = EMChoice{r.real("em", "phi0", 0.0), r.real("em", "phi_slope", 0.0), r.real("em", "a0", 0.0),
                  r.real("em", "a_slope", 0.0)};
    if (pot.family != PotentialFamily::free) {
      r.problems.push_back("[em] and a non-free [potential] are both set; put the scalar potential in em.phi0");
    }
  }

  std::optional<GaugeChoice> gauge;
  if (r.has_section("gauge")) {
    gauge = GaugeChoice{r.real("gauge", "f0", 0.0), r.real("gauge", "f1", 0.0), r.real("gauge", "f2", 0.0), 0.0};
    const auto alpha = r.real_opt("gauge", "alpha");
    const auto bins = r.integer_opt("gauge", "alpha_bins");
    if (alpha && bins) {
      r.problems.push_back("set gauge.alpha or gauge.alpha_bins, not both");
    } else if (bins && egrid) {
      gauge->alpha = static_cast<double>(*bins) * egrid->d_eps() * constants.light_speed() / constants.charge();
    } else if (alpha) {
      gauge->alpha = *alpha;
    }
    if (egrid) {
      try {
        GaugeFunction::polynomial(gauge->f0, gauge->f1, gauge->f2, gauge->alpha, *egrid, constants);
      } catch (const ValidationError& e) {
        r.problems.push_back(e.what());
      }
    }
  }

  // Run options
  const RunMode mode = r.choice<RunMode>("run", "mode",
                                         {{"propagate", RunMode::propagate},
                                          {"gauge-check", RunMode::gauge_check},
                                          {"oracle-compare", RunMode::oracle_compare},
                                          {"arrival-stats", RunMode::arrival_stats},
                                          {"lagrangian-check", RunMode::lagrangian_check}},
                                         RunMode::propagate);
  const ForbiddenMode forbidden = r.choice<ForbiddenMode>(
      "run", "forbidden", {{"clamp", ForbiddenMode::clamp}, {"strict", ForbiddenMode::strict}}, ForbiddenMode::clamp);
  const bool drop_growing = r.boolean("run", "drop_growing", false);
  const auto threads = static_cast<unsigned>(r.count("run", "threads", 1, 1));
  const std::string output = r.raw("run", "output").value_or("");
  const auto arrival_x = r.real_opt("run", "arrival_x");

  if (mode == RunMode::gauge_check && !gauge) r.problems.push_back("run.mode = gauge-check needs a [gauge] section");
  if (mode == RunMode::arrival_stats) {
    if (!arrival_x) {
      r.problems.push_back("run.mode = arrival-stats needs run.arrival_x");
    } else if (xgrid) {
      try {
        xgrid->index_of(*arrival_x);
      } catch (const ValidationError& e) {
        r.problems.push_back(fmt::format("run.arrival_x: {}", e.what()));
      }
    }
  }
  if (mode == RunMode::oracle_compare) {
    if (spec.family != SpectrumFamily::momentum_gaussian) {
      r.problems.push_back("run.mode = oracle-compare needs spectrum.family = momentum-gaussian");
    }
    if (pot.family != PotentialFamily::free || em) {
      r.problems.push_back("run.mode = oracle-compare needs a free particle (no potential, no [em])");
    }
  }
  if (mode == RunMode::lagrangian_check && xgrid && xgrid->size() < 5) {
    r.problems.push_back("run.mode = lagrangian-check needs space.points >= 5");
  }

  std::map<std::string, double> tolerances = default_tolerances();
  for (const auto& [key, fallback] : default_tolerances()) {
    const auto v = r.real_opt("tolerances", key);
    if (!v) continue;
    if (!(*v > 0.0)) {
      r.problems.push_back(fmt::format("tolerances.{} = {} must be positive", key, *v));
    } else {
      tolerances[key] = *v;
    }
  }

  if (!r.problems.empty() || !tgrid || !egrid || !xgrid) {
    if (r.problems.empty()) r.problems.push_back("grids could not be built");
    throw ScenarioError(std::move(r.problems));
  }
  return Scenario{constants, *tgrid,       *egrid,   *xgrid,   spec,    pot,       em,
                  gauge,     mode,         forbidden, drop_growing, threads, output, arrival_x,
                  std::move(tolerances)};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read scenario file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

PotentialSpec make_potential(const Scenario& s) {
  const auto& p = s.potential;
  switch (p.family) {
    case PotentialFamily::free: return PotentialSpec::free();
    case PotentialFamily::constant: return PotentialSpec::constant(p.v0);
    case PotentialFamily::linear: return PotentialSpec::linear(p.slope, p.v0);
    case PotentialFamily::step: return PotentialSpec::step(p.x_s, p.v0);
  }
  return PotentialSpec::free();
}

EMFieldSpec make_em(const Scenario& s) {
  const EMChoice e = s.em.value_or(EMChoice{});
  EMFieldSpec em;
  em.phi = [e](double x) { return e.phi0 + e.phi_slope * x; };
  em.a = [e](double x) { return e.a0 + e.a_slope * x; };
  em.constants = s.constants;
  return em;
}

EnergySpectrum make_spectrum(const Scenario& s) {
  const auto& c = s.spectrum;
  const auto& g = s.egrid;
  std::vector<SpinorAmplitude> values(g.size());
  auto put = [&](std::size_t j, cplx v) {
    if (c.component == Component::plus) {
      values[j].plus = v;
    } else {
      values[j].minus = v;
    }
  };
  switch (c.family) {
    case SpectrumFamily::gaussian: {
      const double norm = std::pow(two_pi * c.width * c.width, -0.25);
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double d = g.at(j) - c.center;
        put(j, norm * std::exp(-d * d / (4.0 * c.width * c.width)));
      }
      break;
    }
    case SpectrumFamily::monochromatic: {
      const auto j = static_cast<std::size_t>(std::llround((c.energy - g.eps0()) / g.d_eps()));
      put(j, 1.0 / std::sqrt(g.d_eps()));
      break;
    }
    case SpectrumFamily::momentum_gaussian: {
      const auto a = MomentumSpectrum::gaussian(c.p0, c.sigma_p, c.support_sigmas);
      EnergySpectrum spec = spectrum_from_momentum(a, g, s.constants, s.xgrid.anchor());
      return c.normalize ? spec.normalized_copy() : spec;
    }
  }
  EnergySpectrum spec(g, std::move(values));
  return c.normalize ? spec.normalized_copy() : spec;
}

}  // namespace sts
