#include "sts/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "sts/gauge.hpp"
#include "sts/observables.hpp"
#include "sts/oracles.hpp"
#include "sts/parallel.hpp"
#include "sts/variational.hpp"

namespace sts {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

namespace {

namespace fs = std::filesystem;

class ReportBuilder {
 public:
  void put(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
  void num(std::string key, double v) { put(std::move(key), format_number(v)); }
  void count(std::string key, std::size_t v) { put(std::move(key), std::to_string(v)); }

  // Records a measured value against its tolerance and remembers failures.
  void check(const std::string& name, double measured, double tolerance) {
    num(name, measured);
    num("tol_" + name, tolerance);
    const bool ok = measured <= tolerance;
    put("check_" + name, ok ? "pass" : "fail");
    if (!ok) failed_ = true;
  }

  bool failed() const { return failed_; }
  Report take() { return std::move(entries_); }

 private:
  Report entries_;
  bool failed_ = false;
};

std::string csv_escape(const std::string& s) {
  std::string flat = s;
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  if (flat.find_first_of(",\"") == std::string::npos) return flat;
  std::string out = "\"";
  for (char c : flat) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const fs::path& path, const fmt::memory_buffer& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_field(const fs::path& dir, const ScField& field) {
  const auto& tg = field.tgrid();
  const auto& xg = field.xgrid();
  fmt::memory_buffer f;
  fmt::memory_buffer d;
  fmt::format_to(std::back_inserter(f), "t,x,re_plus,im_plus,re_minus,im_minus,rho\n");
  fmt::format_to(std::back_inserter(d), "t,x,rho\n");
  for (std::size_t ix = 0; ix < xg.size(); ++ix) {
    for (std::size_t it = 0; it < tg.size(); ++it) {
      const auto& a = field.at(it, ix);
      fmt::format_to(std::back_inserter(f), "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", tg.at(it),
                     xg.at(ix), a.plus.real(), a.plus.imag(), a.minus.real(), a.minus.imag(), a.norm2());
      fmt::format_to(std::back_inserter(d), "{:.17g},{:.17g},{:.17g}\n", tg.at(it), xg.at(ix), a.norm2());
    }
  }
  write_file(dir / "field.csv", f);
  write_file(dir / "density.csv", d);
}

void write_report(const fs::path& dir, const Report& report) {
  fmt::memory_buffer b;
  fmt::format_to(std::back_inserter(b), "key,value\n");
  for (const auto& [k, v] : report) fmt::format_to(std::back_inserter(b), "{},{}\n", k, csv_escape(v));
  write_file(dir / "report.csv", b);
}

// Scalar potential seen by the particle, as an EM spec (A = 0 unless [em] says otherwise).
EMFieldSpec em_for(const Scenario& s) {
  if (s.em) return make_em(s);
  const PotentialSpec v = make_potential(s);
  EMFieldSpec em;
  const double q = s.constants.charge();
  em.phi = [v, q](double x) { return v(x) / q; };
  em.a = [](double) { return 0.0; };
  em.constants = s.constants;
  em.phi_breakpoints.assign(v.breakpoints().begin(), v.breakpoints().end());
  return em;
}

// Highest potential energy over the grid hull, for the allowed-regime test.
double max_potential(const Scenario& s) {
  if (!s.em) return make_potential(s).max_on(s.xgrid.front(), s.xgrid.back());
  const auto em = make_em(s);
  const double q = s.constants.charge();
  return std::max(q * em.phi(s.xgrid.front()), q * em.phi(s.xgrid.back()));
}

ScField compute_field(const Scenario& s, const EnergySpectrum& spec, const PhaseOptions& phase,
                      const PropagateOptions& prop) {
  const PhaseTable table = s.em ? build_em_phase(make_em(s), s.egrid, s.xgrid, phase)
                                : accumulate_phase(make_potential(s), s.egrid, s.xgrid, s.constants, phase);
  return propagate(spec, table, s.tgrid, prop);
}

double spectrum_center(const Scenario& s) {
  switch (s.spectrum.family) {
    case SpectrumFamily::gaussian: return s.spectrum.center;
    case SpectrumFamily::monochromatic: return s.spectrum.energy;
    case SpectrumFamily::momentum_gaussian: return s.spectrum.p0 * s.spectrum.p0 / (2.0 * s.constants.mass());
  }
  return 0.0;
}

ResidualReport residual_for(const Scenario& s, const ScField& field) {
  return s.em ? sc_residual(field, make_em(s), s.egrid) : sc_residual(field, make_potential(s), s.egrid, s.constants);
}

void run_propagate(const Scenario& s, const ScField& field, const EnergySpectrum& spec, ReportBuilder& rep) {
  const auto rho = density(field);
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t ix = 0; ix < field.xgrid().size(); ++ix) {
    const double m = time_normalization(rho, ix);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  rep.num("time_normalization_min", lo);
  rep.num("time_normalization_max", hi);

  double lowest = INFINITY;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (spec[j].norm2() > 0.0) lowest = std::min(lowest, s.egrid.at(j));
  }
  const bool allowed = lowest > max_potential(s);
  rep.put("allowed_regime", allowed ? "true" : "false");
  if (allowed && spec.normalized()) {
    rep.check("normalization", std::max(std::abs(lo - 1.0), std::abs(hi - 1.0)), s.tolerances.at("normalization"));
  }
  if (field.xgrid().size() >= 3) rep.num("sc_residual_max", residual_for(s, field).max);
}

void run_oracle(const Scenario& s, const ScField& field, ReportBuilder& rep) {
  const auto a = MomentumSpectrum::gaussian(s.spectrum.p0, s.spectrum.sigma_p, s.spectrum.support_sigmas);
  double scale = 1.0;
  if (s.spectrum.normalize) {
    scale = 1.0 / std::sqrt(spectrum_from_momentum(a, s.egrid, s.constants, s.xgrid.anchor()).mass());
  }
  const bool plus = a.right_moving();
  const std::size_t nt = s.tgrid.size();
  const std::size_t nx = s.xgrid.size();
  std::vector<double> err(nx, 0.0);
  std::vector<double> ref(nx, 0.0);
  parallel_for(nx, s.threads, [&](std::size_t ix) {
    for (std::size_t it = 0; it < nt; ++it) {
      const cplx o = scale * free_particle_oracle(a, s.xgrid.at(ix), s.tgrid.at(it), s.constants);
      const auto& f = field.at(it, ix);
      const cplx mine = plus ? f.plus : f.minus;
      const cplx other = plus ? f.minus : f.plus;
      err[ix] += std::norm(mine - o) + std::norm(other);
      ref[ix] += std::norm(o);
    }
  });
  double e = 0.0;
  double r = 0.0;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    e += err[ix];
    r += ref[ix];
  }
  rep.num("oracle_norm", std::sqrt(r));
  rep.check("oracle_rel_l2", std::sqrt(e / r), s.tolerances.at("oracle_rel_l2"));
}

void run_gauge(const Scenario& s, const EnergySpectrum& spec, const PhaseOptions& phase,
               const PropagateOptions& prop, ReportBuilder& rep) {
  const auto& g = *s.gauge;
  GaugeScenario gs{spec,
                   em_for(s),
                   GaugeFunction::polynomial(g.f0, g.f1, g.f2, g.alpha, s.egrid, s.constants),
                   s.tgrid,
                   s.xgrid,
                   prop,
                   phase};
  const GaugeReport gr = check_gauge_invariance(gs);
  rep.num("gauge_alpha", g.alpha);
  rep.put("gauge_shift_bins", std::to_string(gs.gauge.energy_shift_bins()));
  rep.num("max_density", gr.max_density);
  rep.check("gauge_density", gr.max_density_diff, s.tolerances.at("gauge_density"));
  rep.check("gauge_covariance", gr.max_covariance_diff, s.tolerances.at("gauge_covariance"));
}

void run_arrival(const Scenario& s, const ScField& field, ReportBuilder& rep) {
  const std::size_t ix = s.xgrid.index_of(*s.arrival_x);
  const auto st = arrival_statistics(density(field), ix);
  const double eps = spectrum_center(s);
  const PotentialSpec v = s.em ? [&] {
    const auto em = make_em(s);
    const double q = s.constants.charge();
    return PotentialSpec::from_function([em, q](double x) { return q * em.phi(x); });
  }()
                               : make_potential(s);
  const double t_cl = classical_arrival_time(eps, v, s.xgrid.anchor(), s.xgrid.at(ix), s.constants);
  rep.num("arrival_x", s.xgrid.at(ix));
  rep.num("arrival_mean", st.mean);
  rep.num("arrival_variance", st.variance);
  rep.num("arrival_mode", st.mode);
  rep.num("classical_energy", eps);
  rep.num("classical_time", t_cl);
  rep.num("mode_deviation", std::abs(st.mode - t_cl));
  rep.check("arrival_bins", std::abs(st.mode - t_cl) / s.tgrid.dt(), s.tolerances.at("arrival_bins"));
}

void run_lagrangian(const Scenario& s, const ScField& field, ReportBuilder& rep) {
  const PotentialSpec v = make_potential(s);
  const auto em = make_em(s);
  const auto l = s.em ? lagrangian_density(field, em, s.egrid) : lagrangian_density(field, v, s.egrid, s.constants);
  const auto sc = residual_for(s, field);
  const auto el = s.em ? euler_lagrange_residual(field, em, s.egrid)
                       : euler_lagrange_residual(field, v, s.egrid, s.constants);
  double diff = 0.0;
  for (std::size_t k = 0; k < sc.norms.size(); ++k) diff = std::max(diff, std::abs(sc.norms[k] - el.norms[k]));
  rep.num("lagrangian_interior_sup", interior_sup(l));
  rep.num("sc_residual_max", sc.max);
  rep.num("euler_lagrange_residual_max", el.max);
  rep.check("residual_agreement", diff, s.tolerances.at("residual_agreement"));
}

}  // namespace

RunResult run(const Scenario& scenario, const RunOptions& options) {
  Scenario s = scenario;
  if (options.threads) s.threads = std::max(1u, *options.threads);
  if (options.strict_forbidden) s.forbidden = ForbiddenMode::strict;
  for (auto& [k, v] : s.tolerances) v *= options.tolerance_scale;

  RunResult result;
  ReportBuilder rep;
  rep.put("mode", std::string(to_string(s.mode)));
  rep.put("forbidden", s.forbidden == ForbiddenMode::strict ? "strict" : "clamp");
  rep.put("drop_growing", s.drop_growing ? "true" : "false");
  rep.count("threads", s.threads);
  rep.num("tolerance_scale", options.tolerance_scale);
  rep.num("t0", s.tgrid.t0());
  rep.num("dt", s.tgrid.dt());
  rep.count("n", s.tgrid.size());
  rep.num("eps0", s.egrid.eps0());
  rep.num("d_eps", s.egrid.d_eps());
  rep.num("x_min", s.xgrid.front());
  rep.num("x_max", s.xgrid.back());
  rep.count("points", s.xgrid.size());
  rep.num("anchor", s.xgrid.anchor());

  const PhaseOptions phase{SimpsonOptions{}, s.threads};
  const PropagateOptions prop{s.forbidden, 1e12, s.drop_growing, s.threads};
  rep.num("growth_cap", prop.growth_cap);
  rep.num("quadrature_abs_tol", phase.quadrature.abs_tol);

  const fs::path dir(options.output_dir);
  try {
    fs::create_directories(dir);
    const EnergySpectrum spec = make_spectrum(s);
    rep.num("spectrum_mass", spec.mass());

    // Aliasing guard: mass near either end of the energy window.
    const std::size_t nb = std::min<std::size_t>(3, spec.size());
    double edge = 0.0;
    for (std::size_t j = 0; j < nb; ++j) edge += spec[j].norm2() + spec[spec.size() - 1 - j].norm2();
    const double total = spec.mass() / s.egrid.d_eps();
    const double frac = total > 0.0 ? edge / total : 0.0;
    rep.num("edge_mass_fraction", frac);
    rep.num("tol_edge_mass_fraction", s.tolerances.at("edge_mass_fraction"));
    if (frac > s.tolerances.at("edge_mass_fraction")) {
      result.warnings.push_back(fmt::format(
          "spectrum mass within 3 bins of the energy-window edges is {:.3e} of the total (limit {:.0e}); "
          "results may alias",
          frac, s.tolerances.at("edge_mass_fraction")));
    }

    if (s.mode == RunMode::gauge_check) {
      run_gauge(s, spec, phase, prop, rep);
    } else {
      const ScField field = compute_field(s, spec, phase, prop);
      write_field(dir, field);
      switch (s.mode) {
        case RunMode::propagate: run_propagate(s, field, spec, rep); break;
        case RunMode::oracle_compare: run_oracle(s, field, rep); break;
        case RunMode::arrival_stats: run_arrival(s, field, rep); break;
        case RunMode::lagrangian_check: run_lagrangian(s, field, rep); break;
        case RunMode::gauge_check: break;
      }
    }
    result.exit_code = rep.failed() ? exit_numerical : exit_ok;
    if (rep.failed()) result.warnings.push_back("one or more checks exceeded their tolerance");
  } catch (const OverflowError& e) {
    result.exit_code = exit_numerical;
    rep.put("error_kind", "overflow");
    rep.put("error", e.what());
    rep.count("overflow_energy_index", e.energy_index());
    rep.count("overflow_x_index", e.x_index());
    rep.num("overflow_energy", e.energy());
    rep.num("overflow_x", e.x());
  } catch (const QuadratureError& e) {
    result.exit_code = exit_numerical;
    rep.put("error_kind", "quadrature");
    rep.put("error", e.what());
    rep.num("quadrature_energy", e.energy());
    rep.num("quadrature_x_lo", e.x_lo());
    rep.num("quadrature_x_hi", e.x_hi());
  } catch (const NumericalError& e) {
    result.exit_code = exit_numerical;
    rep.put("error_kind", "numerical");
    rep.put("error", e.what());
  } catch (const ValidationError& e) {
    result.exit_code = exit_validation;
    rep.put("error_kind", "validation");
    rep.put("error", e.what());
  } catch (const fs::filesystem_error& e) {
    result.exit_code = exit_validation;
    rep.put("error_kind", "validation");
    rep.put("error", e.what());
  }

  Report body = rep.take();
  result.report.emplace_back("status", result.exit_code == exit_ok ? "ok" : "fail");
  result.report.emplace_back("exit_code", std::to_string(result.exit_code));
  result.report.insert(result.report.end(), body.begin(), body.end());
  try {
    fs::create_directories(dir);
    write_report(dir, result.report);
  } catch (const std::exception& e) {
    result.warnings.push_back(fmt::format("could not write report: {}", e.what()));
    if (result.exit_code == exit_ok) result.exit_code = exit_validation;
  }
  return result;
}

Report read_report(const std::string& artifact_dir) {
  const fs::path path = fs::path(artifact_dir) / "report.csv";
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("no report.csv in '{}'", artifact_dir));
  Report out;
  std::string line;
  std::getline(in, line);
  if (line != "key,value") throw ValidationError(fmt::format("'{}' has an unexpected header", path.string()));
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    std::string value = line.substr(comma + 1);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      std::string unq;
      for (std::size_t i = 1; i + 1 < value.size(); ++i) {
        unq += value[i];
        if (value[i] == '"' && value[i + 1] == '"') ++i;
      }
      value = unq;
    }
    out.emplace_back(line.substr(0, comma), value);
  }
  return out;
}

}  // namespace sts
