#include "vbd/cli/experiments.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "vbd/errors.hpp"
#include "vbd/grid.hpp"
#include "vbd/parallel.hpp"
#include "vbd/pde_solver.hpp"
#include "vbd/reproduction.hpp"
#include "vbd/uhr_solver.hpp"
#include "vbd/within_host.hpp"

namespace vbd::cli {
namespace {

using json = nlohmann::ordered_json;

class Quantities {
 public:
  void add(const std::string& key, double v) { csv_.text(key).num(v).end_row(); }
  OutputFile file(const std::string& name) const { return {name, csv_.str()}; }

 private:
  Csv csv_{{"quantity", "value"}};
};

InfectionWindow uhr_window(const ScenarioConfig& c) {
  const WithinHostParams& p = c.within_host;
  InfectionWindow w{};
  if (!c.uhr_tau1 || !c.uhr_tau2) w = permanence(p, c.uhr_alpha * p.y0());
  if (c.uhr_tau1) w.tau1 = *c.uhr_tau1;
  if (c.uhr_tau2) w.tau2 = *c.uhr_tau2;
  return w;
}

UhrHistory uhr_history(const ScenarioConfig& c) {
  if (c.uhr_history == "totals") return UhrHistory::from_totals(c.uhr_I0, c.uhr_R0);
  return UhrHistory::constant(c.uhr_E0);
}

std::string uhr_series_csv(const UhrSeries& s) {
  Csv csv({"t", "E", "Ev", "Iv", "S", "I_total", "R_total"});
  for (const auto& r : s.records) {
    csv.num(r.t).num(r.E).num(r.Ev).num(r.Iv).num(r.S).num(r.I_total).num(r.R_total).end_row();
  }
  return csv.str();
}

void run_uhr(const RunContext& ctx, CommandResult& out, Quantities& q) {
  const ScenarioConfig& c = ctx.config;
  const InfectionWindow w = uhr_window(c);
  const double r0 = r0_uhr(c.epi, w.tau1);
  const EndemicState eq = endemic_uhr(c.epi, w.tau1, w.tau2).value_or(EndemicState{});

  UhrScenario sc;
  sc.epi = c.epi;
  sc.tau1 = w.tau1;
  sc.tau2 = w.tau2;
  sc.history = uhr_history(c);
  sc.Ev0 = c.Ev0;
  sc.Iv0 = c.Iv0;
  sc.t_end = c.uhr_t_end;
  sc.dt = c.dt;
  sc.record_stride = c.uhr_record_stride;
  const UhrSeries s = simulate(sc);
  const UhrRecord& last = s.records.back();

  q.add("uhr_tau1", w.tau1);
  q.add("uhr_tau2", w.tau2);
  q.add("uhr_tau1_integrated", s.tau1);
  q.add("uhr_tau2_integrated", s.tau2);
  q.add("uhr_dt", s.dt);
  q.add("uhr_R0", r0);
  q.add("uhr_R0_over_tau1", r0 / w.tau1);
  q.add("uhr_E_star", eq.E);
  q.add("uhr_Ev_star", eq.Ev);
  q.add("uhr_Iv_star", eq.Iv);
  q.add("uhr_E_final", last.E);
  q.add("uhr_Ev_final", last.Ev);
  q.add("uhr_Iv_final", last.Iv);
  q.add("uhr_I_total_final", last.I_total);
  q.add("uhr_R_total_final", last.R_total);

  out.files.push_back({"uhr_series.csv", uhr_series_csv(s)});
  out.summary.push_back(fmt::format("uhr: tau1={:.6g} tau2={:.6g} R0={:.6g} E*={:.6g} Ev*={:.6g} Iv*={:.6g}", w.tau1,
                                    w.tau2, r0, eq.E, eq.Ev, eq.Iv));
  out.summary.push_back(
      fmt::format("uhr: t={:g} E={:.6g} Ev={:.6g} Iv={:.6g}", last.t, last.E, last.Ev, last.Iv));
}

void run_full(const RunContext& ctx, CommandResult& out, Quantities& q) {
  const ScenarioConfig& c = ctx.config;
  const WithinHostParams& p = c.within_host;
  const EntryDistribution g = make_entry(c.entry, p.y0());
  const MeanTimes mt = mean_times(p, g, c.epi);
  const double r0 = r0_full(c.epi, mt);
  const EndemicState eq = endemic_full(c.epi, mt).value_or(EndemicState{});

  const Grid2D grid = build_grid(p, c.margin, c.nz, c.ny);
  FullRunOptions opts;
  opts.cfl = c.cfl;
  opts.record_interval = c.full_record_interval;
  opts.snapshot_times = c.snapshot_times;
  const FullRun run = simulate_full(p, c.epi, g, grid, initial_state(grid, c.full_E0, c.Ev0, c.Iv0), c.full_t_end, opts);
  const FullRecord& last = run.series.back();

  q.add("full_T1", mt.T1);
  q.add("full_T2", mt.T2);
  q.add("full_T1_beta", mt.T1_beta);
  q.add("full_R0", r0);
  q.add("full_E_star", eq.E);
  q.add("full_Ev_star", eq.Ev);
  q.add("full_Iv_star", eq.Iv);
  q.add("full_I_star_mass", mt.T1 * eq.E / c.epi.tau_h);
  q.add("full_R_star_mass", mt.T2 * eq.E / c.epi.tau_h);
  q.add("full_E_final", last.E);
  q.add("full_Ev_final", last.Ev);
  q.add("full_Iv_final", last.Iv);
  q.add("full_I_mass_final", last.I_mass);
  q.add("full_R_mass_final", last.R_mass);
  q.add("full_drift_final", last.drift);
  q.add("full_outer_leak", run.outer_leak);
  q.add("full_max_balance_residual", run.max_balance_residual);
  q.add("full_max_coupling_residual", run.max_coupling_residual);
  q.add("full_dt", run.dt);
  q.add("full_steps", static_cast<double>(run.steps));
  q.add("grid_z_max", grid.z_max);
  q.add("grid_y_max", grid.y_max);

  Csv csv({"t", "E", "Ev", "Iv", "I_mass", "R_mass", "S_derived", "total", "drift"});
  for (const auto& r : run.series) {
    csv.num(r.t).num(r.E).num(r.Ev).num(r.Iv).num(r.I_mass).num(r.R_mass).num(r.S_derived).num(r.total).num(r.drift);
    csv.end_row();
  }
  out.files.push_back({"full_series.csv", csv.str()});
  for (const auto& snap : run.snapshots) {
    std::ostringstream os;
    write_snapshot(os, snap.state, grid);
    out.files.push_back({fmt::format("full_I_t{:g}.txt", snap.requested), os.str()});
  }
  out.summary.push_back(fmt::format("full: T1={:.6g} T2={:.6g} R0={:.6g} E*={:.6g} Ev*={:.6g} Iv*={:.6g}", mt.T1,
                                    mt.T2, r0, eq.E, eq.Ev, eq.Iv));
  out.summary.push_back(fmt::format("full: t={:g} E={:.6g} Ev={:.6g} Iv={:.6g} drift={:.3g} steps={}", last.t, last.E,
                                    last.Ev, last.Iv, last.drift, run.steps));
}

EpiParams with_constant_beta(EpiParams epi) {
  epi.beta_hv = BetaHv::constant(epi.beta_hv.level());
  return epi;
}

CommandResult sweep_pair(const RunContext& ctx, const Range& ra, const Range& rb, double WithinHostParams::*fa,
                         double WithinHostParams::*fb, const std::string& na, const std::string& nb) {
  const ScenarioConfig& c = ctx.config;
  const EpiParams epi = with_constant_beta(c.epi);
  struct Point {
    double a, b;
    bool valid = false;
    double tau1 = 0.0, r0 = 0.0;
    std::string reason;
  };
  const std::size_t n = static_cast<std::size_t>(ra.n) * static_cast<std::size_t>(rb.n);
  std::vector<Point> pts(n);
  parallel_for(n, ctx.threads, [&](std::size_t k) {
    Point& pt = pts[k];
    pt.a = ra.at(static_cast<int>(k / static_cast<std::size_t>(rb.n)));
    pt.b = rb.at(static_cast<int>(k % static_cast<std::size_t>(rb.n)));
    WithinHostParams p = c.within_host;
    p.*fa = pt.a;
    p.*fb = pt.b;
    const Validation v = validate(p);
    if (!v.ok()) {
      pt.reason = v.status == Admissibility::NonOscillatory ? "non_oscillatory" : "non_positive_parameter";
      return;
    }
    pt.tau1 = permanence_time(p, c.uhr_alpha);
    pt.r0 = r0_uhr(epi, pt.tau1);
    pt.valid = true;
  });

  Csv csv({na, nb, "valid", "tau1", "R0", "reason"});
  std::size_t valid = 0;
  for (const auto& pt : pts) {
    csv.num(pt.a).num(pt.b).integer(pt.valid ? 1 : 0);
    if (pt.valid) {
      csv.num(pt.tau1).num(pt.r0).empty();
      ++valid;
    } else {
      csv.empty().empty().text(pt.reason);
    }
    csv.end_row();
  }
  CommandResult out;
  out.files.push_back({fmt::format("sweep_{}{}.csv", na, nb), csv.str()});
  out.summary.push_back(fmt::format("sweep {}x{}: {} points, {} admissible", na, nb, n, valid));
  return out;
}

int auto_stride(int stride, double dt, double every) {
  return stride != 0 ? stride : std::max(1, static_cast<int>(std::lround(every / dt)));
}

json range_json(const Range& r) { return {{"min", r.lo}, {"max", r.hi}, {"n", r.n}}; }

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"reference",     "simulate-uhr", "simulate-full",
                                              "sweep-a13",     "sweep-a24",    "sweep-ystar",
                                              "threshold",     "characteristics", "sample-params"};
  return names;
}

CommandResult run_command(const std::string& name, const RunContext& ctx) {
  if (name == "reference") return cmd_reference(ctx);
  if (name == "simulate-uhr") return cmd_simulate_uhr(ctx);
  if (name == "simulate-full") return cmd_simulate_full(ctx);
  if (name == "sweep-a13") return cmd_sweep_a13(ctx);
  if (name == "sweep-a24") return cmd_sweep_a24(ctx);
  if (name == "sweep-ystar") return cmd_sweep_ystar(ctx);
  if (name == "threshold") return cmd_threshold(ctx);
  if (name == "characteristics") return cmd_characteristics(ctx);
  if (name == "sample-params") return cmd_sample_params(ctx);
  throw ConfigError("unknown command '" + name + "'");
}

CommandResult cmd_reference(const RunContext& ctx) {
  CommandResult out;
  Quantities q;
  run_uhr(ctx, out, q);
  if (ctx.config.run_full) run_full(ctx, out, q);
  out.files.insert(out.files.begin(), q.file("summary.csv"));
  return out;
}

CommandResult cmd_simulate_uhr(const RunContext& ctx) {
  CommandResult out;
  Quantities q;
  run_uhr(ctx, out, q);
  out.files.insert(out.files.begin(), q.file("summary.csv"));
  return out;
}

CommandResult cmd_simulate_full(const RunContext& ctx) {
  CommandResult out;
  Quantities q;
  run_full(ctx, out, q);
  out.files.insert(out.files.begin(), q.file("summary.csv"));
  return out;
}

CommandResult cmd_sweep_a13(const RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  return sweep_pair(ctx, c.a1, c.a3, &WithinHostParams::a1, &WithinHostParams::a3, "a1", "a3");
}

CommandResult cmd_sweep_a24(const RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  return sweep_pair(ctx, c.a2, c.a4, &WithinHostParams::a2, &WithinHostParams::a4, "a2", "a4");
}

CommandResult cmd_sweep_ystar(const RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  if (c.alphas.empty()) throw ConfigError("sweep.alphas is empty");
  UhrRunConfig run;
  run.history = uhr_history(c);
  run.Ev0 = c.Ev0;
  run.Iv0 = c.Iv0;
  run.t_end = c.uhr_t_end;
  run.dt = c.dt;
  run.record_stride = auto_stride(c.uhr_record_stride, c.dt, 1.0);
  const auto recs = sweep_ystar(c.within_host, c.epi, c.alphas, run, ctx.threads);

  CommandResult out;
  Csv summary({"alpha", "tau1", "tau2", "R0", "E_inf", "Ev_inf", "Iv_inf"});
  for (const auto& r : recs) {
    const UhrRecord& last = r.series.records.back();
    summary.num(r.alpha).num(r.window.tau1).num(r.window.tau2).num(r.r0).num(last.E).num(last.Ev).num(last.Iv);
    summary.end_row();
  }
  out.files.push_back({"ystar_summary.csv", summary.str()});
  for (const auto& r : recs) {
    out.files.push_back({fmt::format("ystar/alpha_{:.4g}.csv", r.alpha), uhr_series_csv(r.series)});
    out.summary.push_back(
        fmt::format("alpha={:.4g} tau1={:.6g} tau2={:.6g} R0={:.6g}", r.alpha, r.window.tau1, r.window.tau2, r.r0));
  }
  return out;
}

CommandResult cmd_threshold(const RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  ThresholdConfig tc;
  tc.n = c.threshold_n;
  tc.r0_range = {c.r0_min, c.r0_max};
  tc.t_f = c.threshold_t_f;
  tc.dt = c.dt;
  tc.alpha = c.uhr_alpha;
  tc.tau1 = c.uhr_tau1;
  tc.tau2 = c.uhr_tau2;
  tc.seed = c.uhr_E0;
  const auto recs = threshold_scan(c.within_host, c.epi, tc, ctx.threads);

  Csv csv({"R0", "I_final"});
  double below = 0.0, above = 1.0;
  for (const auto& r : recs) {
    csv.num(r.r0).num(r.I_final).end_row();
    if (r.r0 <= 0.95) below = std::max(below, r.I_final);
    if (r.r0 >= 1.1) above = std::min(above, r.I_final);
  }
  CommandResult out;
  out.files.push_back({"threshold.csv", csv.str()});
  out.summary.push_back(fmt::format("threshold: {} runs, max I_final (R0<=0.95) = {:.3g}, min I_final (R0>=1.1) = {:.3g}",
                                    recs.size(), below, above));
  return out;
}

CommandResult cmd_characteristics(const RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  const WithinHostParams& p = c.within_host;
  require_valid(p);
  constexpr int kPoints = 500;

  CommandResult out;
  Csv index({"curve", "y_entry", "tau1", "y_plus", "file"});
  for (std::size_t i = 0; i < c.entries.size(); ++i) {
    const double y_entry = c.entries[i];
    const InfectionWindow w = permanence(p, y_entry);
    Csv curve({"tau", "z", "y"});
    for (int k = 0; k < kPoints; ++k) {
      const double tau = w.tau1 * k / (kPoints - 1);
      const CharPoint pt = characteristic_at(p, y_entry, tau);
      curve.num(tau).num(pt.z).num(pt.y).end_row();
    }
    const std::string name = fmt::format("characteristics/curve_{}.csv", i);
    index.integer(static_cast<long>(i)).num(y_entry).num(w.tau1).num(w.y_plus).text(name).end_row();
    out.files.push_back({name, curve.str()});
    out.summary.push_back(fmt::format("y'={:.6g}: tau1={:.6g} y+={:.6g}", y_entry, w.tau1, w.y_plus));
  }

  const CharacteristicExtent ext = characteristic_extent(p, 0.0);
  Csv zn({"z", "y"});
  Csv yn({"z", "y"});
  for (int k = 0; k < kPoints; ++k) {
    const double y = 1.1 * ext.y_max * k / (kPoints - 1);
    zn.num(p.a2 / p.a1 * y).num(y).end_row();
    const double z = 1.1 * ext.z_max * k / (kPoints - 1);
    yn.num(z).num(p.a4 / p.a3 * z).end_row();
  }
  out.files.insert(out.files.begin(), {"characteristics/index.csv", index.str()});
  out.files.push_back({"characteristics/nullcline_z.csv", zn.str()});
  out.files.push_back({"characteristics/nullcline_y.csv", yn.str()});
  return out;
}

CommandResult cmd_sample_params(const RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  const auto samples = sample_admissible(c.sample_n, ctx.seed, {c.tau1_min, c.tau1_max}, c.within_host, c.uhr_alpha);
  Csv csv({"a1", "a2", "a3", "a4", "tau1"});
  for (const auto& s : samples) {
    csv.num(s.params.a1).num(s.params.a2).num(s.params.a3).num(s.params.a4).num(s.tau1).end_row();
  }
  CommandResult out;
  out.files.push_back({"samples.csv", csv.str()});
  out.summary.push_back(fmt::format("sampled {} admissible parameter sets (seed {})", samples.size(), ctx.seed));
  return out;
}

json parameters_json(const RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  const WithinHostParams& p = c.within_host;
  json j;
  j["within_host"] = {{"a1", p.a1}, {"a2", p.a2}, {"a3", p.a3}, {"a4", p.a4}, {"a5", p.a5}, {"z0", p.z0}, {"y0", p.y0()}};
  json beta = {{"profile", c.epi.beta_hv.is_constant() ? "constant" : "logistic"}, {"level", c.epi.beta_hv.level()}};
  if (!c.epi.beta_hv.is_constant()) {
    beta["z_half"] = c.epi.beta_hv.z_half();
    beta["slope"] = c.epi.beta_hv.slope();
  }
  j["epi"] = {{"b", c.epi.b},         {"beta_vh", c.epi.beta_vh}, {"beta_hv", beta},         {"m", c.epi.m},
              {"mu_v", c.epi.mu_v},   {"tau_h", c.epi.tau_h},     {"tau_v", c.epi.tau_v}};
  j["entry"] = {{"kind", c.entry.kind},
                {"alpha", c.entry.alpha},
                {"variance", c.entry.variance},
                {"nodes", c.entry.nodes},
                {"values", c.entry.values}};
  json uhr = {{"alpha", c.uhr_alpha}};
  uhr["tau1"] = c.uhr_tau1 ? json(*c.uhr_tau1) : json(nullptr);
  uhr["tau2"] = c.uhr_tau2 ? json(*c.uhr_tau2) : json(nullptr);
  j["uhr"] = uhr;
  j["sim"] = {{"uhr_t_end", c.uhr_t_end}, {"dt", c.dt},         {"full_t_end", c.full_t_end},
              {"cfl", c.cfl},             {"nz", c.nz},         {"ny", c.ny},
              {"margin", c.margin},       {"run_full", c.run_full}};
  j["init"] = {{"uhr_history", c.uhr_history}, {"uhr_E0", c.uhr_E0}, {"uhr_I0", c.uhr_I0}, {"uhr_R0", c.uhr_R0},
               {"Ev0", c.Ev0},                 {"Iv0", c.Iv0},       {"full_E0", c.full_E0}};
  j["output"] = {{"uhr_record_stride", c.uhr_record_stride},
                 {"full_record_interval", c.full_record_interval},
                 {"snapshots", c.snapshot_times}};
  j["sweep"] = {{"a1", range_json(c.a1)},
                {"a3", range_json(c.a3)},
                {"a2", range_json(c.a2)},
                {"a4", range_json(c.a4)},
                {"alphas", c.alphas},
                {"threshold_n", c.threshold_n},
                {"r0_min", c.r0_min},
                {"r0_max", c.r0_max},
                {"threshold_t_f", c.threshold_t_f},
                {"sample_n", c.sample_n},
                {"tau1_min", c.tau1_min},
                {"tau1_max", c.tau1_max},
                {"entries", c.entries}};
  j["seed"] = ctx.seed;
  return j;
}

}  // namespace vbd::cli
