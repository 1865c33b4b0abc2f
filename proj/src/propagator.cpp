#include "sts/propagator.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "field_ops.hpp"
#include "sts/energy_rep.hpp"
#include "sts/parallel.hpp"

namespace sts {

EMFieldSpec EMFieldSpec::uniform(double phi0, double a0, const PhysicalConstants& constants) {
  return {[phi0](double) { return phi0; }, [a0](double) { return a0; }, constants, {}};
}

PhaseTable::PhaseTable(EnergyGrid egrid, SpaceGrid xgrid, PhysicalConstants constants,
                       std::vector<double> action, std::vector<double> decay,
                       std::vector<std::uint8_t> crossed_forbidden, std::vector<double> common)
    : egrid_(egrid),
      xgrid_(std::move(xgrid)),
      constants_(constants),
      action_(std::move(action)),
      decay_(std::move(decay)),
      crossed_(std::move(crossed_forbidden)),
      common_(std::move(common)) {
  const std::size_t cells = egrid_.size() * xgrid_.size();
  if (action_.size() != cells || decay_.size() != cells || crossed_.size() != cells ||
      common_.size() != xgrid_.size()) {
    throw ValidationError(fmt::format("phase table arrays do not match the {}x{} (energy,x) grid",
                                      egrid_.size(), xgrid_.size()));
  }
}

namespace {

void check_finite_on_grid(const std::function<double(double)>& f, const SpaceGrid& xgrid, const char* name) {
  for (std::size_t i = 0; i < xgrid.size(); ++i) {
    if (!std::isfinite(f(xgrid.at(i)))) {
      throw ValidationError(fmt::format("{} is not finite at index {} (x = {})", name, i, xgrid.at(i)));
    }
  }
}

struct Columns {
  std::vector<double> action;
  std::vector<double> decay;
  std::vector<std::uint8_t> crossed;
};

Columns integrate_columns(const PotentialSpec& v, const EnergyGrid& egrid, const SpaceGrid& xgrid,
                          double mass, const PhaseOptions& opts) {
  const std::size_t ne = egrid.size();
  const std::size_t nx = xgrid.size();
  const std::size_t anchor = xgrid.anchor_index();
  Columns out{std::vector<double>(ne * nx, 0.0), std::vector<double>(ne * nx, 0.0),
              std::vector<std::uint8_t>(ne * nx, 0)};

  parallel_for(ne, opts.threads, [&](std::size_t j) {
    const double eps = egrid.at(j);
    auto interval = [&](std::size_t lo) {
      const double a = xgrid.at(lo);
      const double b = xgrid.at(lo + 1);
      const auto r = integrate_local_momentum(v, eps, mass, a, b, opts.quadrature);
      if (!r.converged) {
        throw QuadratureError(
            fmt::format("phase quadrature did not converge for eps = {} on x-interval [{}, {}] "
                        "after {} refinement levels",
                        eps, a, b, opts.quadrature.max_depth),
            eps, a, b);
      }
      return r;
    };
    for (std::size_t ix = anchor + 1; ix < nx; ++ix) {
      const auto r = interval(ix - 1);
      const std::size_t prev = (ix - 1) * ne + j;
      const std::size_t cur = ix * ne + j;
      out.action[cur] = out.action[prev] + r.real;
      out.decay[cur] = out.decay[prev] + r.imag;
      out.crossed[cur] = static_cast<std::uint8_t>(out.crossed[prev] || r.forbidden);
    }
    for (std::size_t ix = anchor; ix-- > 0;) {
      const auto r = interval(ix);
      const std::size_t next = (ix + 1) * ne + j;
      const std::size_t cur = ix * ne + j;
      out.action[cur] = out.action[next] - r.real;
      out.decay[cur] = out.decay[next] - r.imag;
      out.crossed[cur] = static_cast<std::uint8_t>(out.crossed[next] || r.forbidden);
    }
  });
  return out;
}

}  // namespace

PhaseTable accumulate_phase(const PotentialSpec& v, const EnergyGrid& egrid, const SpaceGrid& xgrid,
                            const PhysicalConstants& constants, const PhaseOptions& opts) {
  check_finite_on_grid(v.evaluator(), xgrid, "potential");
  auto cols = integrate_columns(v, egrid, xgrid, constants.mass(), opts);
  return PhaseTable(egrid, xgrid, constants, std::move(cols.action), std::move(cols.decay),
                    std::move(cols.crossed), std::vector<double>(xgrid.size(), 0.0));
}

PhaseTable build_em_phase(const EMFieldSpec& em, const EnergyGrid& egrid, const SpaceGrid& xgrid,
                          const PhaseOptions& opts) {
  if (!em.phi || !em.a) throw ValidationError("electromagnetic potentials must be callable");
  check_finite_on_grid(em.phi, xgrid, "scalar potential");
  check_finite_on_grid(em.a, xgrid, "vector potential");
  const auto& k = em.constants;
  const double q = k.charge();
  auto phi = em.phi;
  const auto energy = PotentialSpec::from_function([phi, q](double x) { return q * phi(x); },
                                                   em.phi_breakpoints);
  auto cols = integrate_columns(energy, egrid, xgrid, k.mass(), opts);

  const std::size_t nx = xgrid.size();
  const std::size_t anchor = xgrid.anchor_index();
  const double coupling = q / k.light_speed();
  std::vector<double> common(nx, 0.0);
  auto a_integral = [&](std::size_t lo) {
    const double a = xgrid.at(lo);
    const double b = xgrid.at(lo + 1);
    const auto r = romberg(em.a, a, b, opts.quadrature.abs_tol);
    if (!r.converged) {
      throw QuadratureError(
          fmt::format("vector potential quadrature did not converge on x-interval [{}, {}]", a, b),
          std::nan(""), a, b);
    }
    return coupling * r.value;
  };
  for (std::size_t ix = anchor + 1; ix < nx; ++ix) common[ix] = common[ix - 1] + a_integral(ix - 1);
  for (std::size_t ix = anchor; ix-- > 0;) common[ix] = common[ix + 1] - a_integral(ix);

  return PhaseTable(egrid, xgrid, k, std::move(cols.action), std::move(cols.decay), std::move(cols.crossed),
                    std::move(common));
}

namespace {

bool same_grid(const EnergyGrid& a, const EnergyGrid& b) {
  const double scale = std::max(1.0, std::abs(a.eps0()));
  return a.size() == b.size() && std::abs(a.eps0() - b.eps0()) <= 1e-12 * scale &&
         std::abs(a.d_eps() - b.d_eps()) <= 1e-12 * a.d_eps();
}

}  // namespace

ScField propagate(const EnergySpectrum& spec, const PhaseTable& table, const TimeGrid& tgrid,
                  const PropagateOptions& opts) {
  if (!same_grid(spec.grid(), table.egrid())) {
    throw ValidationError("spectrum and phase table use different energy grids");
  }
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (!std::isfinite(spec[j].plus.real()) || !std::isfinite(spec[j].plus.imag()) ||
        !std::isfinite(spec[j].minus.real()) || !std::isfinite(spec[j].minus.imag())) {
      throw ValidationError(fmt::format("spectrum value at index {} is not finite", j));
    }
  }
  const auto& constants = table.constants();
  const SpectralTransform transform(tgrid, table.egrid(), constants);
  const auto& xgrid = table.xgrid();
  const auto& egrid = table.egrid();
  const std::size_t ne = egrid.size();
  const double hbar = constants.hbar();
  const double cap = opts.growth_cap;

  ScField field(tgrid, xgrid);
  parallel_for(xgrid.size(), opts.threads, [&](std::size_t ix) {
    std::vector<cplx> plus(ne), minus(ne), plus_t(ne), minus_t(ne);
    const cplx common = std::polar(1.0, table.common(ix) / hbar);
    for (std::size_t j = 0; j < ne; ++j) {
      const double s = table.action(j, ix) / hbar;
      const double k = table.decay(j, ix) / hbar;
      double plus_mag = std::exp(-k);
      double minus_mag = std::exp(k);
      cplx c_plus = spec[j].plus;
      cplx c_minus = spec[j].minus;
      if (opts.drop_growing && table.crossed_forbidden(j, ix)) {
        if (k > 0.0) c_minus = 0.0;
        if (k < 0.0) c_plus = 0.0;
      }
      for (auto [mag, coeff] : {std::pair{&plus_mag, c_plus}, std::pair{&minus_mag, c_minus}}) {
        if (*mag > cap && coeff != 0.0) {
          if (opts.mode == ForbiddenMode::strict) {
            throw OverflowError(
                fmt::format("evanescent growth factor {:.3e} exceeds cap {:.3e} at eps = {} (index {}), "
                            "x = {} (index {})",
                            *mag, cap, egrid.at(j), j, xgrid.at(ix), ix),
                j, ix, egrid.at(j), xgrid.at(ix));
          }
          *mag = cap;
        }
      }
      plus[j] = c_plus * std::polar(plus_mag, s) * common;
      minus[j] = c_minus * std::polar(minus_mag, -s) * common;
    }
    transform.energy_to_time(plus, plus_t);
    transform.energy_to_time(minus, minus_t);
    auto out = field.slice(ix);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {plus_t[k], minus_t[k]};
  });
  return field;
}

namespace detail {

LocalTerms local_terms(const PotentialSpec& v, const SpaceGrid& xgrid, const PhysicalConstants& constants) {
  return {sample_potential(v, xgrid), std::vector<double>(xgrid.size(), 0.0), constants.mass(),
          constants.hbar()};
}

LocalTerms local_terms(const EMFieldSpec& em, const SpaceGrid& xgrid) {
  const auto& k = em.constants;
  LocalTerms out{std::vector<double>(xgrid.size()), std::vector<double>(xgrid.size()), k.mass(), k.hbar()};
  for (std::size_t i = 0; i < xgrid.size(); ++i) {
    out.v[i] = k.charge() * em.phi(xgrid.at(i));
    out.a_term[i] = k.charge() / k.light_speed() * em.a(xgrid.at(i));
  }
  return out;
}

std::vector<SpinorAmplitude> energy_columns(const ScField& field, const SpectralTransform& transform) {
  const std::size_t n = field.tgrid().size();
  std::vector<SpinorAmplitude> out(field.xgrid().size() * n);
  for (std::size_t ix = 0; ix < field.xgrid().size(); ++ix) {
    auto col = transform.time_to_energy(field.slice(ix));
    std::copy(col.begin(), col.end(), out.begin() + static_cast<std::ptrdiff_t>(ix * n));
  }
  return out;
}

double require_uniform_spacing(const SpaceGrid& xgrid, std::size_t min_points, const char* what) {
  if (xgrid.size() < min_points) {
    throw ValidationError(fmt::format("{} needs at least {} space points (got {})", what, min_points,
                                      xgrid.size()));
  }
  const double h = xgrid.uniform_spacing();
  if (h == 0.0) throw ValidationError(fmt::format("{} needs a uniform space grid", what));
  return h;
}

}  // namespace detail

namespace {

ResidualReport residual_per_mode(const ScField& field, const detail::LocalTerms& terms,
                                 const EnergyGrid& egrid, const PhysicalConstants& constants) {
  const double h = detail::require_uniform_spacing(field.xgrid(), 3, "sc_residual");
  const SpectralTransform transform(field.tgrid(), egrid, constants);
  const auto cols = detail::energy_columns(field, transform);
  const std::size_t ne = egrid.size();
  const std::size_t nx = field.xgrid().size();

  ResidualReport rep;
  rep.n_energy = ne;
  rep.n_x = nx;
  rep.norms.assign(ne * nx, 0.0);
  double sum = 0.0;
  const cplx i_hbar(0.0, terms.hbar);
  for (std::size_t ix = 1; ix + 1 < nx; ++ix) {
    for (std::size_t j = 0; j < ne; ++j) {
      const auto& c = cols[ix * ne + j];
      const auto dc = (cols[(ix + 1) * ne + j] - cols[(ix - 1) * ne + j]) * cplx(0.5 / h);
      const auto r = detail::pamiltonian_apply(egrid.at(j), terms.v[ix], terms.a_term[ix], terms.mass, c) +
                     i_hbar * dc;
      const double norm = std::sqrt(r.norm2());
      rep.norms[ix * ne + j] = norm;
      sum += norm;
      if (norm > rep.max) {
        rep.max = norm;
        rep.argmax_energy = j;
        rep.argmax_x = ix;
      }
    }
  }
  rep.mean = sum / static_cast<double>(ne * (nx - 2));
  return rep;
}

}  // namespace

ResidualReport sc_residual(const ScField& field, const PotentialSpec& v, const EnergyGrid& egrid,
                           const PhysicalConstants& constants) {
  if (field.xgrid().size() < 3) throw ValidationError("sc_residual needs at least 3 space points");
  return residual_per_mode(field, detail::local_terms(v, field.xgrid(), constants), egrid, constants);
}

ResidualReport sc_residual(const ScField& field, const EMFieldSpec& em, const EnergyGrid& egrid) {
  if (field.xgrid().size() < 3) throw ValidationError("sc_residual needs at least 3 space points");
  return residual_per_mode(field, detail::local_terms(em, field.xgrid()), egrid, em.constants);
}

}  // namespace sts
