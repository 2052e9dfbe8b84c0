#include "vbd/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "vbd/errors.hpp"
#include "vbd/kernels.hpp"

namespace vbd {

PdeState initial_state(const Grid2D& grid, double E0, double Ev0, double Iv0) {
  PdeState s;
  s.I.assign(grid.cells(), 0.0);
  s.R.assign(static_cast<std::size_t>(grid.recovered_cells()), 0.0);
  s.E = E0;
  s.Ev = Ev0;
  s.Iv = Iv0;
  s.S = 1.0 - E0;
  return s;
}

MassRecord mass_report(const PdeState& state, const Grid2D& grid) {
  double rows = 0.0;
  for (int iz = 0; iz < grid.nz; ++iz) rows += kernels::sum(grid.ny, state.I.data() + grid.index(iz, 0));
  const double I_mass = rows * grid.cell_area();
  const double R_mass = kernels::sum(state.R.size(), state.R.data()) * grid.dy;
  return {state.t, state.E, I_mass, R_mass, 1.0 - state.E - I_mass - R_mass, state.S,
          state.S + state.E + I_mass + R_mass};
}

PdeSolver::PdeSolver(const WithinHostParams& whp, const EpiParams& epi, const EntryDistribution& g, const Grid2D& grid,
                     PdeOptions opts)
    : whp_(whp), epi_(epi), grid_(grid), opts_(opts), stride_(static_cast<std::size_t>(grid.ny) + 2) {
  require_valid(whp_);
  require_valid(epi_);
  if (std::fabs(grid_.y0 - whp_.y0()) > 1e-12 * whp_.y0() || grid_.z_min != whp_.z0) {
    throw Error(ErrorKind::InvalidArgument, "grid must start at z0 and have a face at y0");
  }
  const int nz = grid_.nz, ny = grid_.ny, k = grid_.inflow_cells;
  y_center_.resize(static_cast<std::size_t>(ny));
  y_face_.resize(static_cast<std::size_t>(ny) + 1);
  for (int j = 0; j < ny; ++j) y_center_[static_cast<std::size_t>(j)] = grid_.y_center(j);
  for (int j = 0; j <= ny; ++j) y_face_[static_cast<std::size_t>(j)] = grid_.y_face(j);
  beta_row_.resize(static_cast<std::size_t>(nz));
  for (int iz = 0; iz < nz; ++iz) beta_row_[static_cast<std::size_t>(iz)] = epi_.beta_hv(grid_.z_center(iz));

  // Cell averages of g over the inflow rows, renormalized on the grid.
  g_cells_.assign(static_cast<std::size_t>(k), 0.0);
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    const double lo = grid_.y_face(j);
    const double hi = (j == k - 1) ? whp_.y0() : grid_.y_face(j + 1);
    g_cells_[static_cast<std::size_t>(j)] = g.mass(lo, hi) / grid_.dy;
    total += g_cells_[static_cast<std::size_t>(j)] * grid_.dy;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "entry distribution puts no mass on the grid");
  double mean = 0.0;
  for (int j = 0; j < k; ++j) {
    g_cells_[static_cast<std::size_t>(j)] /= total;
    mean += g_cells_[static_cast<std::size_t>(j)] * grid_.dy * y_center_[static_cast<std::size_t>(j)];
  }
  y_star_ = mean;

  // Per cell, the summed outflow rate through its four faces.
  double worst = 0.0;
  for (int iz = 0; iz < nz; ++iz) {
    const double zl = grid_.z_face(iz), zr = grid_.z_face(iz + 1), zc = grid_.z_center(iz);
    for (int j = 0; j < ny; ++j) {
      const double yc = y_center_[static_cast<std::size_t>(j)];
      const double ub = whp_.a4 * zc - whp_.a3 * y_face_[static_cast<std::size_t>(j)];
      const double ut = whp_.a4 * zc - whp_.a3 * y_face_[static_cast<std::size_t>(j) + 1];
      const double ul = whp_.a1 * zl - whp_.a2 * yc;
      const double ur = whp_.a1 * zr - whp_.a2 * yc;
      const double rate = (std::max(ur, 0.0) + std::max(-ul, 0.0)) / grid_.dz +
                          (std::max(ut, 0.0) + std::max(-ub, 0.0)) / grid_.dy;
      worst = std::max(worst, rate);
    }
  }
  const int nr = grid_.recovered_cells();
  worst = std::max(worst, whp_.a5 * grid_.y_max / grid_.dy);
  stable_dt_ = 1.0 / worst;

  I_.assign(stride_ * static_cast<std::size_t>(nz), 0.0);
  I_next_ = I_;
  R_.assign(static_cast<std::size_t>(nr), 0.0);
  R_next_ = R_;
  row_sum_.assign(static_cast<std::size_t>(nz), 0.0);
  ghost_.assign(static_cast<std::size_t>(ny), 0.0);
  zeros_.assign(static_cast<std::size_t>(ny), 0.0);
  flux_prev_.assign(static_cast<std::size_t>(ny), 0.0);
  flux_cur_.assign(static_cast<std::size_t>(ny), 0.0);
  flux_y_.assign(static_cast<std::size_t>(ny) + 1, 0.0);
  rsrc_.assign(static_cast<std::size_t>(nr), 0.0);
}

void PdeSolver::set_state(const PdeState& s) {
  if (s.I.size() != grid_.cells() || s.R.size() != static_cast<std::size_t>(grid_.recovered_cells())) {
    throw Error(ErrorKind::InvalidArgument, "state does not match the grid");
  }
  for (int iz = 0; iz < grid_.nz; ++iz) {
    double* row = I_.data() + stride_ * static_cast<std::size_t>(iz);
    row[0] = 0.0;
    row[stride_ - 1] = 0.0;
    std::copy_n(s.I.data() + grid_.index(iz, 0), grid_.ny, row + 1);
  }
  R_ = s.R;
  t_ = s.t;
  E_ = s.E;
  Ev_ = s.Ev;
  Iv_ = s.Iv;
  S_ = s.S;
  refresh_masses();
}

PdeState PdeSolver::state() const {
  PdeState s;
  s.t = t_;
  s.I.resize(grid_.cells());
  for (int iz = 0; iz < grid_.nz; ++iz) {
    std::copy_n(I_.data() + stride_ * static_cast<std::size_t>(iz) + 1, grid_.ny, s.I.data() + grid_.index(iz, 0));
  }
  s.R = R_;
  s.E = E_;
  s.Ev = Ev_;
  s.Iv = Iv_;
  s.S = S_;
  return s;
}

void PdeSolver::refresh_masses() {
  const std::size_t ny = static_cast<std::size_t>(grid_.ny);
  double plain = 0.0, weighted = 0.0;
  for (int iz = 0; iz < grid_.nz; ++iz) {
    const double rs = kernels::sum(ny, I_.data() + stride_ * static_cast<std::size_t>(iz) + 1);
    row_sum_[static_cast<std::size_t>(iz)] = rs;
    plain += rs;
    weighted += beta_row_[static_cast<std::size_t>(iz)] * rs;
  }
  I_mass_ = plain * grid_.cell_area();
  I_beta_mass_ = weighted * grid_.cell_area();
  R_mass_ = kernels::sum(R_.size(), R_.data()) * grid_.dy;
}

StepFluxes PdeSolver::step(double dt) {
  if (!(dt > 0.0) || dt > stable_dt_ * (1.0 + 1e-12)) {
    throw Error(ErrorKind::CflViolation, fmt::format("dt = {} exceeds the stable step {}", dt, stable_dt_));
  }
  const int nz = grid_.nz, ny = grid_.ny, k = grid_.inflow_cells, nr = grid_.recovered_cells();
  const std::size_t nyu = static_cast<std::size_t>(ny);
  const double dz = grid_.dz, dy = grid_.dy;
  const double cz = dt / dz, cy = dt / dy;
  const double a1 = whp_.a1, a2 = whp_.a2, a3 = whp_.a3, a4 = whp_.a4;

  const double I_mass_old = I_mass_;
  const double R_mass_old = R_mass_;
  const double I_beta_old = I_beta_mass_;

  // Inflow ghost row at z0: density E g / ((a1 z0 - a2 y*) tau_h).
  const double bc_scale = E_ / ((a1 * whp_.z0 - a2 * y_star_) * epi_.tau_h);
  for (int j = 0; j < k; ++j) ghost_[static_cast<std::size_t>(j)] = bc_scale * g_cells_[static_cast<std::size_t>(j)];

  StepFluxes fx;
  // Face at z0.
  const double* row0 = I_.data() + 1;
  kernels::upwind_face_flux(nyu, a1 * grid_.z_face(0), -a2, y_center_.data(), ghost_.data(), row0, flux_prev_.data());
  {
    double in = 0.0, out = 0.0;
    for (int j = 0; j < k; ++j) in += flux_prev_[static_cast<std::size_t>(j)];
    for (int j = k; j < ny; ++j) {
      const double f = flux_prev_[static_cast<std::size_t>(j)];
      rsrc_[static_cast<std::size_t>(j - k)] = -f;
      out -= f;
    }
    fx.inflow = in * dt * dy;
    fx.outflow_z0 = out * dt * dy;
  }

  double outer_y = 0.0;
  double plain = 0.0, weighted = 0.0;
  for (int iz = 0; iz < nz; ++iz) {
    const double* cur = I_.data() + stride_ * static_cast<std::size_t>(iz);
    double* next = I_next_.data() + stride_ * static_cast<std::size_t>(iz);
    const double* right = (iz + 1 < nz) ? cur + stride_ + 1 : zeros_.data();
    kernels::upwind_face_flux(nyu, a1 * grid_.z_face(iz + 1), -a2, y_center_.data(), cur + 1, right,
                              flux_cur_.data());
    kernels::upwind_face_flux(nyu + 1, a4 * grid_.z_center(iz), -a3, y_face_.data(), cur, cur + 1, flux_y_.data());
    kernels::upwind_apply(nyu, cur + 1, flux_prev_.data(), flux_cur_.data(), flux_y_.data(), cz, cy, next + 1);
    outer_y += flux_y_[nyu] - flux_y_[0];
    const double rs = kernels::sum(nyu, next + 1);
    row_sum_[static_cast<std::size_t>(iz)] = rs;
    plain += rs;
    weighted += beta_row_[static_cast<std::size_t>(iz)] * rs;
    std::swap(flux_prev_, flux_cur_);
  }
  // flux_prev_ now holds the z_max face.
  fx.outer = kernels::sum(nyu, flux_prev_.data()) * dt * dy + outer_y * dt * dz;

  // R: donor cell with velocity -a5 y, nothing enters at the top.
  const double a5 = whp_.a5;
  for (int r = 0; r < nr; ++r) {
    const std::size_t ru = static_cast<std::size_t>(r);
    const double down_in = (r + 1 < nr) ? a5 * y_face_[static_cast<std::size_t>(k + r + 1)] * R_[ru + 1] : 0.0;
    const double down_out = a5 * y_face_[static_cast<std::size_t>(k + r)] * R_[ru];
    R_next_[ru] = R_[ru] + cy * (down_in - down_out) + dt * rsrc_[ru];
  }
  fx.r_outflow = dt * a5 * whp_.y0() * R_[0];
  fx.r_source = dt * dy * kernels::sum(static_cast<std::size_t>(nr), rsrc_.data());

  std::swap(I_, I_next_);
  std::swap(R_, R_next_);
  I_mass_ = plain * grid_.cell_area();
  I_beta_mass_ = weighted * grid_.cell_area();
  R_mass_ = kernels::sum(R_.size(), R_.data()) * dy;
  if (!std::isfinite(I_mass_) || !std::isfinite(R_mass_)) {
    throw Error(ErrorKind::NonFiniteField, fmt::format("non-finite field at t = {}", t_ + dt));
  }
  fx.balance_residual = (I_mass_ - I_mass_old) - (fx.inflow - fx.outflow_z0 - fx.outer);
  fx.coupling_residual = (R_mass_ - R_mass_old + fx.r_outflow) - fx.outflow_z0;

  // Scalars from the old grid integrals.
  const double S_derived = 1.0 - E_ - I_mass_old - R_mass_old;
  const double infection = epi_.b * epi_.beta_vh * epi_.m * Iv_ * S_derived;
  if (opts_.update_scalars) {
    const double E_next = E_ + dt * (infection - E_ / epi_.tau_h);
    const double Ev_next = Ev_ + dt * (epi_.b * I_beta_old * (1.0 - Ev_ - Iv_) - (1.0 / epi_.tau_v + epi_.mu_v) * Ev_);
    const double Iv_next = Iv_ + dt * (Ev_ / epi_.tau_v - epi_.mu_v * Iv_);
    S_ += fx.r_outflow - dt * infection;
    E_ = E_next;
    Ev_ = Ev_next;
    Iv_ = Iv_next;
  } else {
    // E is held fixed, so the host leaving E is replaced from S.
    S_ += fx.r_outflow - fx.inflow;
  }
  t_ += dt;
  return fx;
}

FullRun simulate_full(const WithinHostParams& whp, const EpiParams& epi, const EntryDistribution& g, const Grid2D& grid,
                      const PdeState& init, double t_end, const FullRunOptions& opts) {
  if (!(opts.cfl > 0.0 && opts.cfl <= 1.0)) throw Error(ErrorKind::InvalidArgument, "cfl must lie in (0, 1]");
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be positive");
  if (!(opts.record_interval > 0.0)) throw Error(ErrorKind::InvalidArgument, "record interval must be positive");
  PdeSolver solver(whp, epi, g, grid, opts.pde);
  solver.set_state(init);
  {
    const double mass0 = init.E + solver.I_mass() + solver.R_mass();
    if (mass0 > 1.0 + 1e-12) throw Error(ErrorKind::InvalidArgument, "initial infected host mass exceeds 1");
    if (!(init.Ev >= 0.0 && init.Iv >= 0.0 && init.Ev + init.Iv <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "initial vector state must satisfy Ev0, Iv0 >= 0 and Ev0 + Iv0 <= 1");
    }
  }

  FullRun run;
  const long steps = static_cast<long>(std::ceil(t_end / (opts.cfl * solver.stable_dt())));
  const double dt = t_end / static_cast<double>(steps);
  run.dt = dt;
  run.steps = steps;
  {
    double norm = 0.0;
    const auto& gc = solver.entry_cells();
    for (std::size_t j = 0; j < gc.size(); ++j) {
      norm += grid.dy * gc[j] * (whp.a1 * whp.z0 - whp.a2 * grid.y_center(static_cast<int>(j)));
    }
    run.inflow_normalization = norm / (whp.a1 * whp.z0 - whp.a2 * solver.entry_mean());
  }

  const double total0 = solver.S() + solver.E() + solver.I_mass() + solver.R_mass();
  auto record = [&]() {
    const double total = solver.S() + solver.E() + solver.I_mass() + solver.R_mass();
    run.series.push_back({solver.t(), solver.E(), solver.Ev(), solver.Iv(), solver.I_mass(), solver.R_mass(),
                          1.0 - solver.E() - solver.I_mass() - solver.R_mass(), total, total - total0});
  };
  const long stride = std::max(1L, static_cast<long>(std::llround(opts.record_interval / dt)));
  std::vector<long> snap_steps;
  for (double ts : opts.snapshot_times) {
    if (ts < 0.0 || ts > t_end) throw Error(ErrorKind::InvalidArgument, "snapshot time outside the run");
    snap_steps.push_back(std::llround(ts / dt));
  }
  auto snapshot_due = [&](long n) {
    for (std::size_t i = 0; i < snap_steps.size(); ++i) {
      if (snap_steps[i] == n) run.snapshots.push_back({opts.snapshot_times[i], solver.state()});
    }
  };

  record();
  snapshot_due(0);
  for (long n = 1; n <= steps; ++n) {
    const StepFluxes fx = solver.step(dt);
    run.max_balance_residual = std::max(run.max_balance_residual, std::fabs(fx.balance_residual));
    run.max_coupling_residual = std::max(run.max_coupling_residual, std::fabs(fx.coupling_residual));
    run.outer_leak += fx.outer;
    if (n % stride == 0 || n == steps) record();
    snapshot_due(n);
  }
  run.final_state = solver.state();
  return run;
}

void write_snapshot(std::ostream& os, const PdeState& state, const Grid2D& grid) {
  os << fmt::format("t {:.17g}\n", state.t);
  os << fmt::format("nz {}\n", grid.nz);
  os << fmt::format("ny {}\n", grid.ny);
  os << fmt::format("extents {:.17g} {:.17g} {:.17g} {:.17g}\n", grid.z_min, grid.z_max, grid.y_min, grid.y_max);
  std::string line;
  for (int iz = 0; iz < grid.nz; ++iz) {
    line.clear();
    for (int iy = 0; iy < grid.ny; ++iy) {
      if (iy) line += ' ';
      line += fmt::format("{:.17g}", state.I[grid.index(iz, iy)]);
    }
    line += '\n';
    os << line;
  }
}

}  // namespace vbd
