#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "vbd/epi.hpp"
#include "vbd/reproduction.hpp"
#include "vbd/within_host.hpp"

namespace vbd {

/// E on [-tau1 - tau2, 0].
struct UhrHistory {
  enum class Kind { Piecewise, Totals, Tabulated };
  Kind kind = Kind::Piecewise;
  double recent = 0.0;  // Piecewise: E on [-tau1, 0]
  double older = 0.0;   // Piecewise: E on [-tau1 - tau2, -tau1)
  double infected = 0.0;   // Totals: initial I_total
  double recovered = 0.0;  // Totals: initial R_total
  std::vector<double> times;   // Tabulated, increasing; linear in between, flat outside
  std::vector<double> values;

  static UhrHistory constant(double e) { return piecewise(e, e); }
  static UhrHistory piecewise(double recent, double older);
  /// Two constant levels chosen so the discrete window integrals equal the
  /// requested initial infected and recovered totals.
  static UhrHistory from_totals(double infected, double recovered);
  static UhrHistory tabulated(std::vector<double> times, std::vector<double> values);
};

struct UhrScenario {
  EpiParams epi;
  double tau1 = 6.4;
  double tau2 = 70.0;
  UhrHistory history;
  double Ev0 = 0.0;
  double Iv0 = 0.0;
  double t_end = 5000.0;
  double dt = 0.01;
  /// Steps between records; 0 picks max(1, round(0.1 / dt)); negative keeps
  /// only the first and last record.
  int record_stride = 0;
};

struct UhrRecord {
  double t;
  double E;
  double Ev;
  double Iv;
  double S;
  double I_total;
  double R_total;
};

struct UhrSeries {
  double dt = 0.0;    // step after snapping
  double tau1 = 0.0;  // windows actually integrated
  double tau2 = 0.0;
  long n1 = 0;
  long n2 = 0;
  std::vector<UhrRecord> records;
};

/// Step snapping: dt' = tau1 / max(1, round(tau1 / dt)); tau2 is rounded to a
/// whole number of steps dt'.
struct UhrSteps {
  double dt;
  long n1;
  long n2;
};
UhrSteps snap_steps(double tau1, double tau2, double dt);

UhrSeries simulate(const UhrScenario& sc);

struct UhrRunConfig {
  UhrHistory history = UhrHistory::constant(1e-4);
  double Ev0 = 0.0;
  double Iv0 = 0.0;
  double t_end = 5000.0;
  double dt = 0.01;
  int record_stride = 0;
};

struct YstarRecord {
  double alpha;
  InfectionWindow window;
  double r0;
  std::optional<EndemicState> equilibrium;
  UhrSeries series;
};

std::vector<YstarRecord> sweep_ystar(const WithinHostParams& whp, const EpiParams& epi, const std::vector<double>& alphas,
                                     const UhrRunConfig& run, unsigned threads = 1);

struct ThresholdConfig {
  int n = 100;
  std::pair<double, double> r0_range{0.3, 3.0};
  double t_f = 1e4;
  double dt = 0.01;
  double alpha = kDefaultEntryFraction;
  std::optional<double> tau1;  // overrides the value derived from alpha
  std::optional<double> tau2;
  double seed = 1e-4;
};

struct ThresholdRecord {
  double r0;
  double m;
  double I_final;
};

/// Varies m so R0 spans r0_range uniformly; each run starts from E = seed on
/// the whole window and no infected vectors.
std::vector<ThresholdRecord> threshold_scan(const WithinHostParams& whp, const EpiParams& epi_base,
                                            const ThresholdConfig& cfg, unsigned threads = 1);

}  // namespace vbd
