#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "vbd/entry_distribution.hpp"
#include "vbd/epi.hpp"
#include "vbd/grid.hpp"
#include "vbd/numerics.hpp"
#include "vbd/within_host.hpp"

namespace vbd {

/// g-weighted mean permanence time, mean recovery time, and mean path
/// integral of beta_hv along the infected phase.
struct MeanTimes {
  double T1 = 0.0;
  double T2 = 0.0;
  double T1_beta = 0.0;
};

struct EndemicState {
  double E = 0.0;
  double Ev = 0.0;
  double Iv = 0.0;
};

/// b^2 beta_vh m / (mu_v (1 + tau_v mu_v)): the factor turning an integrated
/// host infectiousness into R0.
double transmission_factor(const EpiParams& epi);

double r0_uhr(const EpiParams& epi, double tau1);
std::optional<EndemicState> endemic_uhr(const EpiParams& epi, double tau1, double tau2);

/// Right-hand sides of the delay system at a constant history E, Ev, Iv.
std::array<double, 3> uhr_stationary_residual(const EpiParams& epi, double tau1, double tau2, const EndemicState& s);

MeanTimes mean_times(const WithinHostParams& whp, const EntryDistribution& g, const EpiParams& epi,
                     const numerics::QuadratureSpec& quad = {});
double r0_full(const WithinHostParams& whp, const EntryDistribution& g, const EpiParams& epi,
               const numerics::QuadratureSpec& quad = {});
double r0_full(const EpiParams& epi, const MeanTimes& times);
std::optional<EndemicState> endemic_full(const WithinHostParams& whp, const EntryDistribution& g,
                                         const EpiParams& epi, const numerics::QuadratureSpec& quad = {});
std::optional<EndemicState> endemic_full(const EpiParams& epi, const MeanTimes& times);

/// Endemic densities realized at cell centers of `grid`: I* along the
/// characteristics, R* from the outflow it feeds.
struct EndemicFields {
  std::vector<double> I;  // grid.cells()
  std::vector<double> R;  // grid.recovered_cells()
};
EndemicFields realize_endemic_fields(const WithinHostParams& whp, const EntryDistribution& g, const EpiParams& epi,
                                     const EndemicState& eq, const Grid2D& grid,
                                     const numerics::QuadratureSpec& quad = {});

/// Residuals of the scalar stationary equations of the structured model for
/// given grid integrals of I*, beta_hv I*, and R*.
std::array<double, 3> full_stationary_residual(const EpiParams& epi, const EndemicState& s, double I_mass,
                                               double I_beta_mass, double R_mass);

/// Characteristic function of the delay system linearized at the DFE.
std::complex<double> dfe_char_residual(const EpiParams& epi, double tau1, std::complex<double> lambda);

struct DfeRealRootTest {
  bool positive_root = false;
  double lambda = 0.0;    // first positive real root, when found
  double residual = 0.0;  // characteristic function there
};

/// Scans (0, 50 / tau1] on 10^4 points for a sign change of the real
/// characteristic function and refines the first one found.
DfeRealRootTest dfe_real_root_test(const EpiParams& epi, double tau1);

}  // namespace vbd
