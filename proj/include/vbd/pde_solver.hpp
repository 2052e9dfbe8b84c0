#pragma once

#include <iosfwd>
#include <vector>

#include "vbd/entry_distribution.hpp"
#include "vbd/epi.hpp"
#include "vbd/grid.hpp"
#include "vbd/within_host.hpp"

namespace vbd {

/// I on the grid (z-major, grid.index), R on the cells above y0, the scalar
/// compartments, and the susceptible fraction carried by its own balance so
/// that mass leaving through the outer boundary shows up as drift.
struct PdeState {
  double t = 0.0;
  std::vector<double> I;
  std::vector<double> R;
  double E = 0.0;
  double Ev = 0.0;
  double Iv = 0.0;
  double S = 1.0;
};

/// Zero fields, E = E0, S = 1 - E0.
PdeState initial_state(const Grid2D& grid, double E0, double Ev0 = 0.0, double Iv0 = 0.0);

struct MassRecord {
  double t;
  double E;
  double I_mass;
  double R_mass;
  double S_derived;  // 1 - E - I_mass - R_mass
  double S;          // carried susceptible
  double total;      // S + E + I_mass + R_mass
};
MassRecord mass_report(const PdeState& state, const Grid2D& grid);

/// Masses moved during one step (proportion of hosts).
struct StepFluxes {
  double inflow = 0.0;      // into I through z0, y < y0
  double outflow_z0 = 0.0;  // out of I through z0, y > y0
  double outer = 0.0;       // out of I through z_max and y_max
  double r_source = 0.0;    // into R from the z0 outflow
  double r_outflow = 0.0;   // out of R through y0, back to S
  double balance_residual = 0.0;   // dI - (inflow - outflow_z0 - outer)
  double coupling_residual = 0.0;  // (dR + r_outflow) - outflow_z0
};

struct PdeOptions {
  /// When false E, Ev, Iv stay fixed and only the fields move.
  bool update_scalars = true;
};

class PdeSolver {
 public:
  PdeSolver(const WithinHostParams& whp, const EpiParams& epi, const EntryDistribution& g, const Grid2D& grid,
            PdeOptions opts = {});

  const Grid2D& grid() const { return grid_; }
  /// Largest dt keeping every donor-cell update a convex combination.
  double stable_dt() const { return stable_dt_; }
  /// Cell-averaged entry density (sums to 1 / dy over the inflow rows) and
  /// its discrete mean.
  const std::vector<double>& entry_cells() const { return g_cells_; }
  double entry_mean() const { return y_star_; }

  void set_state(const PdeState& s);
  PdeState state() const;
  double t() const { return t_; }
  double E() const { return E_; }
  double Ev() const { return Ev_; }
  double Iv() const { return Iv_; }
  double S() const { return S_; }
  double I_mass() const { return I_mass_; }
  double I_beta_mass() const { return I_beta_mass_; }
  double R_mass() const { return R_mass_; }

  /// Throws CflViolation if dt > stable_dt(), NonFiniteField on overflow.
  StepFluxes step(double dt);

 private:
  void refresh_masses();

  WithinHostParams whp_;
  EpiParams epi_;
  Grid2D grid_;
  PdeOptions opts_;
  std::size_t stride_;  // padded row length ny + 2
  std::vector<double> y_center_, y_face_, beta_row_, g_cells_;
  double y_star_ = 0.0;
  double stable_dt_ = 0.0;

  std::vector<double> I_, I_next_, R_, R_next_;
  std::vector<double> row_sum_;
  std::vector<double> ghost_, zeros_, flux_prev_, flux_cur_, flux_y_, rsrc_;
  double t_ = 0.0, E_ = 0.0, Ev_ = 0.0, Iv_ = 0.0, S_ = 1.0;
  double I_mass_ = 0.0, I_beta_mass_ = 0.0, R_mass_ = 0.0;
};

struct FullRecord {
  double t;
  double E;
  double Ev;
  double Iv;
  double I_mass;
  double R_mass;
  double S_derived;
  double total;
  double drift;
};

struct Snapshot {
  double requested;  // time asked for; state.t is the nearest step
  PdeState state;
};

struct FullRunOptions {
  double cfl = 0.9;
  double record_interval = 0.5;  // days
  std::vector<double> snapshot_times;
  PdeOptions pde;
};

struct FullRun {
  std::vector<FullRecord> series;
  PdeState final_state;
  std::vector<Snapshot> snapshots;
  double dt = 0.0;
  long steps = 0;
  double max_balance_residual = 0.0;
  double max_coupling_residual = 0.0;
  double outer_leak = 0.0;  // cumulative mass through z_max / y_max
  double inflow_normalization = 0.0;
};

FullRun simulate_full(const WithinHostParams& whp, const EpiParams& epi, const EntryDistribution& g, const Grid2D& grid,
                      const PdeState& init, double t_end, const FullRunOptions& opts = {});

/// Four header lines (t, nz, ny, extents) and the I matrix, one z row per line.
void write_snapshot(std::ostream& os, const PdeState& state, const Grid2D& grid);

}  // namespace vbd
