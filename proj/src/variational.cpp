#include "sts/variational.hpp"

#include <cmath>

#include "field_ops.hpp"
#include "sts/energy_rep.hpp"

namespace sts {
namespace {

// d/dx of column-major (x-major) mode data at position ix.
SpinorAmplitude derivative(const std::vector<SpinorAmplitude>& cols, std::size_t ne, std::size_t nx,
                           std::size_t ix, std::size_t j, double h, Stencil stencil) {
  auto c = [&](std::size_t i) { return cols[i * ne + j]; };
  if (ix == 0) return (cplx(-3.0) * c(0) + cplx(4.0) * c(1) - c(2)) * cplx(0.5 / h);
  if (ix == nx - 1) return (cplx(3.0) * c(nx - 1) - cplx(4.0) * c(nx - 2) + c(nx - 3)) * cplx(0.5 / h);
  if (stencil == Stencil::fourth_order && ix >= 2 && ix + 2 < nx) {
    return (c(ix - 2) - cplx(8.0) * c(ix - 1) + cplx(8.0) * c(ix + 1) - c(ix + 2)) * cplx(1.0 / (12.0 * h));
  }
  return (c(ix + 1) - c(ix - 1)) * cplx(0.5 / h);
}

LagrangianDensityField lagrangian_impl(const ScField& field, const detail::LocalTerms& terms,
                                       const EnergyGrid& egrid, const PhysicalConstants& constants,
                                       Stencil stencil) {
  const double h = detail::require_uniform_spacing(field.xgrid(), 5, "lagrangian_density");
  const SpectralTransform transform(field.tgrid(), egrid, constants);
  const auto cols = detail::energy_columns(field, transform);
  const std::size_t ne = egrid.size();
  const std::size_t nx = field.xgrid().size();
  const std::size_t nt = field.tgrid().size();
  const cplx i_hbar(0.0, terms.hbar);

  LagrangianDensityField out{field.tgrid(), field.xgrid(), std::vector<cplx>(nt * nx)};
  std::vector<SpinorAmplitude> bracket(ne);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t j = 0; j < ne; ++j) {
      bracket[j] = detail::pamiltonian_apply(egrid.at(j), terms.v[ix], terms.a_term[ix], terms.mass,
                                             cols[ix * ne + j]) +
                   i_hbar * derivative(cols, ne, nx, ix, j, h, stencil);
    }
    const auto chi = transform.energy_to_time(bracket);
    const auto phi = field.slice(ix);
    for (std::size_t it = 0; it < nt; ++it) {
      out.values[ix * nt + it] = std::conj(phi[it].plus) * chi[it].plus + std::conj(phi[it].minus) * chi[it].minus;
    }
  }
  return out;
}

ResidualReport euler_lagrange_impl(const ScField& field, const detail::LocalTerms& terms, const EnergyGrid& egrid,
                                   const PhysicalConstants& constants) {
  const double h = detail::require_uniform_spacing(field.xgrid(), 3, "euler_lagrange_residual");
  const SpectralTransform transform(field.tgrid(), egrid, constants);
  const std::size_t ne = egrid.size();
  const std::size_t nx = field.xgrid().size();
  const std::size_t nt = field.tgrid().size();
  const cplx i_hbar(0.0, terms.hbar);

  ResidualReport rep;
  rep.n_energy = ne;
  rep.n_x = nx;
  rep.norms.assign(ne * nx, 0.0);
  double sum = 0.0;
  std::vector<SpinorAmplitude> dphi(nt);
  for (std::size_t ix = 1; ix + 1 < nx; ++ix) {
    const auto fwd = field.slice(ix + 1);
    const auto back = field.slice(ix - 1);
    for (std::size_t it = 0; it < nt; ++it) dphi[it] = (fwd[it] - back[it]) * cplx(0.5 / h);
    const auto d_modes = transform.time_to_energy(dphi);
    const auto modes = transform.time_to_energy(field.slice(ix));
    for (std::size_t j = 0; j < ne; ++j) {
      const auto p_phi =
          detail::pamiltonian_apply(egrid.at(j), terms.v[ix], terms.a_term[ix], terms.mass, modes[j]);
      // i hbar d(phi^dagger)/dx - (P phi)^dagger, one entry per spinor component
      const cplx e_plus = i_hbar * std::conj(d_modes[j].plus) - std::conj(p_phi.plus);
      const cplx e_minus = i_hbar * std::conj(d_modes[j].minus) - std::conj(p_phi.minus);
      const double norm = std::sqrt(std::norm(e_plus) + std::norm(e_minus));
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

LagrangianDensityField lagrangian_density(const ScField& field, const PotentialSpec& v, const EnergyGrid& egrid,
                                          const PhysicalConstants& constants, Stencil stencil) {
  detail::require_uniform_spacing(field.xgrid(), 5, "lagrangian_density");
  return lagrangian_impl(field, detail::local_terms(v, field.xgrid(), constants), egrid, constants, stencil);
}

LagrangianDensityField lagrangian_density(const ScField& field, const EMFieldSpec& em, const EnergyGrid& egrid,
                                          Stencil stencil) {
  detail::require_uniform_spacing(field.xgrid(), 5, "lagrangian_density");
  return lagrangian_impl(field, detail::local_terms(em, field.xgrid()), egrid, em.constants, stencil);
}

double interior_sup(const LagrangianDensityField& l, std::size_t edge) {
  const std::size_t nt = l.tgrid.size();
  const std::size_t nx = l.xgrid.size();
  double best = 0.0;
  for (std::size_t ix = edge; ix + edge < nx; ++ix) {
    for (std::size_t it = 0; it < nt; ++it) best = std::max(best, std::abs(l.values[ix * nt + it]));
  }
  return best;
}

ResidualReport euler_lagrange_residual(const ScField& field, const PotentialSpec& v, const EnergyGrid& egrid,
                                       const PhysicalConstants& constants) {
  detail::require_uniform_spacing(field.xgrid(), 3, "euler_lagrange_residual");
  return euler_lagrange_impl(field, detail::local_terms(v, field.xgrid(), constants), egrid, constants);
}

ResidualReport euler_lagrange_residual(const ScField& field, const EMFieldSpec& em, const EnergyGrid& egrid) {
  detail::require_uniform_spacing(field.xgrid(), 3, "euler_lagrange_residual");
  return euler_lagrange_impl(field, detail::local_terms(em, field.xgrid()), egrid, em.constants);
}

}  // namespace sts
