#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vbd/entry_distribution.hpp"
#include "vbd/epi.hpp"
#include "vbd/within_host.hpp"

namespace vbd {

/// Bad or incomplete configuration; the CLI exits with status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EntryConfig {
  std::string kind = "gaussian";  // gaussian | dirac | uniform | tabulated
  double alpha = 0.5;             // center (gaussian) or atom (dirac) as a fraction of y0
  double variance = 0.2;
  std::vector<double> nodes;   // tabulated, antibody units
  std::vector<double> values;
};

struct Range {
  double lo;
  double hi;
  int n;
  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

struct ScenarioConfig {
  WithinHostParams within_host = reference_within_host();
  EpiParams epi = baseline_epi();
  EntryConfig entry;

  // UHR summaries
  double uhr_alpha = kDefaultEntryFraction;
  std::optional<double> uhr_tau1;
  std::optional<double> uhr_tau2;

  // simulation
  double uhr_t_end = 5000.0;
  double dt = 0.01;
  double full_t_end = 400.0;
  double cfl = 0.9;
  int nz = 200;
  int ny = 340;
  double margin = 0.75;
  bool run_full = true;

  // initial data
  std::string uhr_history = "constant";  // constant | totals
  double uhr_E0 = 1e-4;
  double uhr_I0 = 0.0;
  double uhr_R0 = 0.0;
  double Ev0 = 0.0;
  double Iv0 = 0.0;
  double full_E0 = 0.01;

  // output
  int uhr_record_stride = 0;
  double full_record_interval = 0.5;
  std::vector<double> snapshot_times{400.0};

  // sweeps
  Range a1{0.2, 3.0, 57};
  Range a3{0.2, 3.0, 57};
  Range a2{0.1, 1.5, 57};
  Range a4{0.5, 6.0, 56};
  std::vector<double> alphas;
  int threshold_n = 100;
  double r0_min = 0.3;
  double r0_max = 3.0;
  double threshold_t_f = 1e4;
  int sample_n = 100;
  double tau1_min = 5.0;
  double tau1_max = 9.0;
  std::vector<double> entries;  // antibody levels for characteristic export
};

/// Defaults for every key; used when no file is given.
ScenarioConfig default_config();

/// Reads an INI file. With a file, every [within_host] and [epi] rate must be
/// present; unknown sections and keys are rejected.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>");

EntryDistribution make_entry(const EntryConfig& e, double y0);


}  // namespace vbd
