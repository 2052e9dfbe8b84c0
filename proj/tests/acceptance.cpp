#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "vbd/cli/experiments.hpp"
#include "vbd/reproduction.hpp"
#include "vbd/uhr_solver.hpp"
#include "vbd/within_host.hpp"

using namespace vbd;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int n, const char* name, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, fmt::format("threw: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!v.pass) ++failures;
  fmt::print("{} criterion {}: {} ({}; {:.2f} s)\n", v.pass ? "PASS" : "FAIL", n, name, v.detail, secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::map<std::string, double> summary_of(const cli::CommandResult& r) {
  std::map<std::string, double> q;
  for (const auto& f : r.files) {
    if (f.name != "summary.csv") continue;
    std::istringstream in(f.content);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      q[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    }
  }
  return q;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

int main() {
  const WithinHostParams ref = reference_within_host();
  const EpiParams epi = baseline_epi();
  double tau1_ref = 0.0;
  double alpha_ref = 0.0;

  criterion(1, "permanence time 6.4 +- 0.1 and RK4 agreement", [&] {
    const auto start = std::chrono::steady_clock::now();
    double best = 1e9;
    for (int i = 0; i < 100; ++i) {
      const double alpha = i / 100.0;
      const double t = permanence_time(ref, alpha);
      if (std::fabs(t - 6.4) < std::fabs(best - 6.4)) {
        best = t;
        alpha_ref = alpha;
      }
    }
    tau1_ref = best;
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const WithinHostParams p = oracle::random_admissible(rng);
      const double y_entry = std::uniform_real_distribution<double>(0.0, 0.95)(rng) * p.y0();
      worst = std::max(worst, rel(permanence(p, y_entry).tau1, oracle::rk4_first_return(p, y_entry).tau));
    }
    const double secs = elapsed_since(start);
    return Verdict{std::fabs(best - 6.4) <= 0.1 && worst < 1e-6 && secs < 1.0,
                   fmt::format("tau1 = {:.4f} at y' = {:.2f} y0, worst RK4 rel diff {:.2e}", best, alpha_ref, worst)};
  });

  criterion(2, "tau1 invariant under z0 and under a2 a4 rescaling", [&] {
    const auto start = std::chrono::steady_clock::now();
    double spread_z0 = 0.0, spread_k = 0.0;
    for (double alpha : {0.0, 0.25, 0.5, 0.9}) {
      std::vector<double> a, b;
      for (double z0 : {0.5, 1.0, 2.0, 5.0}) {
        WithinHostParams p = ref;
        p.z0 = z0;
        a.push_back(permanence(p, alpha * p.y0()).tau1);
      }
      for (double k : {1.0, 0.5, 2.0, 4.0}) {
        WithinHostParams p = ref;
        p.a2 *= k;
        p.a4 /= k;
        b.push_back(permanence(p, alpha * p.y0()).tau1);
      }
      const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
      const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
      spread_z0 = std::max(spread_z0, (*amax - *amin) / *amin);
      spread_k = std::max(spread_k, (*bmax - *bmin) / *bmin);
    }
    const double secs = elapsed_since(start);
    return Verdict{spread_z0 < 1e-8 && spread_k < 1e-8 && secs < 1.0,
                   fmt::format("spread over z0 {:.2e}, over k {:.2e}", spread_z0, spread_k)};
  });

  criterion(3, "UHR R0 = 2.86 +- 0.06", [&] {
    const double r0 = r0_uhr(epi, tau1_ref);
    return Verdict{std::fabs(r0 - 2.86) <= 0.06,
                   fmt::format("R0 = {:.4f} with tau1 = {:.4f}; R0/tau1 = {:.6f}", r0, tau1_ref, r0 / tau1_ref)};
  });

  criterion(4, "UHR endemic equilibrium residual and convergence", [&] {
    const auto start = std::chrono::steady_clock::now();
    const InfectionWindow w = permanence(ref, alpha_ref * ref.y0());
    const auto eq = endemic_uhr(epi, w.tau1, w.tau2);
    if (!eq) return Verdict{false, "no endemic state"};
    double residual = 0.0;
    for (double r : uhr_stationary_residual(epi, w.tau1, w.tau2, *eq)) residual = std::max(residual, std::fabs(r));

    cli::RunContext ctx;
    ctx.config.uhr_alpha = alpha_ref;
    ctx.config.uhr_t_end = 5000.0;
    ctx.config.dt = 0.01;
    const auto q = summary_of(cli::cmd_simulate_uhr(ctx));
    const double dE = rel(q.at("uhr_E_final"), q.at("uhr_E_star"));
    const double dEv = rel(q.at("uhr_Ev_final"), q.at("uhr_Ev_star"));
    const double dIv = rel(q.at("uhr_Iv_final"), q.at("uhr_Iv_star"));
    const double secs = elapsed_since(start);
    return Verdict{residual < 1e-12 && std::max({dE, dEv, dIv}) < 0.01 && secs < 30.0,
                   fmt::format("residual {:.1e}; at t = 5000 rel. errors E {:.1e}, Ev {:.1e}, Iv {:.1e}", residual, dE,
                               dEv, dIv)};
  });

  criterion(5, "UHR host conservation", [&] {
    const InfectionWindow w = permanence(ref, alpha_ref * ref.y0());
    std::vector<UhrScenario> scenarios;
    auto add = [&](UhrHistory h, double Ev0, double Iv0, double m_scale) {
      UhrScenario sc;
      sc.epi = epi;
      sc.epi.m *= m_scale;
      sc.tau1 = w.tau1;
      sc.tau2 = w.tau2;
      sc.history = std::move(h);
      sc.Ev0 = Ev0;
      sc.Iv0 = Iv0;
      sc.t_end = 2000.0;
      sc.record_stride = 1;
      scenarios.push_back(sc);
    };
    add(UhrHistory::constant(1e-4), 0.0, 0.0, 1.0);
    add(UhrHistory::constant(1e-2), 0.01, 0.02, 1.0);
    add(UhrHistory::constant(1e-3), 0.0, 0.0, 0.3);
    add(UhrHistory::piecewise(0.004, 0.001), 0.0, 0.0, 2.0);
    add(UhrHistory::from_totals(0.03, 0.4), 0.0, 0.05, 1.0);
    add(UhrHistory::tabulated({-70.0, -30.0, 0.0}, {0.0, 0.002, 0.0005}), 0.0, 0.0, 1.0);
    double worst = 0.0;
    std::size_t records = 0;
    for (const auto& sc : scenarios) {
      for (const auto& r : simulate(sc).records) {
        worst = std::max(worst, std::fabs(r.S + r.E + r.I_total + r.R_total - 1.0));
        ++records;
      }
    }
    return Verdict{worst < 1e-9, fmt::format("max |S + E + I + R - 1| = {:.1e} over {} scenarios, {} records", worst,
                                             scenarios.size(), records)};
  });

  criterion(6, "threshold scan splits at R0 = 1", [&] {
    const auto start = std::chrono::steady_clock::now();
    ThresholdConfig cfg;
    cfg.alpha = alpha_ref;
    const auto scan = threshold_scan(ref, epi, cfg, 0);
    double below = 0.0, above = 1e9;
    for (const auto& r : scan) {
      if (r.r0 <= 0.95) below = std::max(below, r.I_final);
      if (r.r0 >= 1.1) above = std::min(above, r.I_final);
    }
    const double secs = elapsed_since(start);
    return Verdict{scan.size() == 100 && below < 1e-10 && above > 1e-4 && secs <= 600.0,
                   fmt::format("{} runs; max I_final for R0 <= 0.95: {:.2e}, min for R0 >= 1.1: {:.2e}", scan.size(),
                               below, above)};
  });

  criterion(7, "narrow entry density reduces to the single-entry model", [&] {
    const auto start = std::chrono::steady_clock::now();
    const double ys = alpha_ref * ref.y0();
    const double sd = ref.y0() / 100.0;
    const MeanTimes mt = mean_times(ref, EntryDistribution::gaussian(ys, sd * sd, ref.y0()), epi);
    const InfectionWindow w = permanence(ref, ys);
    const double d1 = rel(mt.T1, w.tau1), d2 = rel(mt.T2, w.tau2);
    const double dr = rel(r0_full(epi, mt), r0_uhr(epi, w.tau1));
    const double secs = elapsed_since(start);
    return Verdict{d1 < 0.01 && d2 < 0.01 && dr < 0.01 && secs < 5.0,
                   fmt::format("rel. diffs T1 {:.1e}, T2 {:.1e}, R0 {:.1e}", d1, d2, dr)};
  });

  criterion(8, "DFE positive real root iff R0 > 1", [&] {
    const auto start = std::chrono::steady_clock::now();
    int agree = 0;
    for (int i = 0; i < 20; ++i) {
      EpiParams e = epi;
      e.m = epi.m * (0.2 + 2.8 * i / 19.0) / r0_uhr(epi, tau1_ref);
      if (dfe_real_root_test(e, tau1_ref).positive_root == (r0_uhr(e, tau1_ref) > 1.0)) ++agree;
    }
    const double secs = elapsed_since(start);
    return Verdict{agree == 20 && secs < 5.0, fmt::format("{} of 20 scenarios agree", agree)};
  });

  criterion(9, "full structured model on 200x340 and one refinement", [&] {
    auto run = [&](int nz, int ny, double& secs) {
      cli::RunContext ctx;
      ctx.config.nz = nz;
      ctx.config.ny = ny;
      ctx.config.full_t_end = 400.0;
      ctx.config.snapshot_times.clear();
      const auto start = std::chrono::steady_clock::now();
      const auto q = summary_of(cli::cmd_simulate_full(ctx));
      secs = elapsed_since(start);
      return q;
    };
    double coarse_secs = 0.0, fine_secs = 0.0;
    const auto c = run(200, 340, coarse_secs);
    const auto f = run(400, 680, fine_secs);
    const double balance = std::max(c.at("full_max_balance_residual"), c.at("full_max_coupling_residual"));
    const double drift_c = std::fabs(c.at("full_drift_final")), drift_f = std::fabs(f.at("full_drift_final"));
    const double dE = rel(c.at("full_E_final"), c.at("full_E_star"));
    const double dEv = rel(c.at("full_Ev_final"), c.at("full_Ev_star"));
    const double dIv = rel(c.at("full_Iv_final"), c.at("full_Iv_star"));
    const double dI = rel(c.at("full_I_mass_final"), c.at("full_I_star_mass"));
    const double dR = rel(c.at("full_R_mass_final"), c.at("full_R_star_mass"));
    const bool pass = coarse_secs <= 600.0 && balance <= 1e-12 && drift_c <= 0.05 && drift_f < drift_c &&
                      std::max({dE, dEv, dIv}) < 0.10 && std::max(dI, dR) < 0.15;
    return Verdict{pass, fmt::format("200x340 in {:.0f} s; flux residual {:.1e}; drift {:.2f}% -> {:.2f}% at 400x680; "
                                     "rel. errors E {:.1f}%, Ev {:.1f}%, Iv {:.1f}%, I {:.1f}%, R {:.1f}%",
                                     coarse_secs, balance, 100 * drift_c, 100 * drift_f, 100 * dE, 100 * dEv,
                                     100 * dIv, 100 * dI, 100 * dR)};
  });

  criterion(10, "R0 strictly decreasing in the entry level", [&] {
    const auto start = std::chrono::steady_clock::now();
    double prev = 1e300;
    bool decreasing = true;
    double first = 0.0, last = 0.0;
    for (int i = 1; i <= 19; ++i) {
      const double r0 = r0_uhr(epi, permanence_time(ref, i / 20.0));
      decreasing = decreasing && r0 < prev;
      prev = r0;
      if (i == 1) first = r0;
      last = r0;
    }
    const double secs = elapsed_since(start);
    return Verdict{decreasing && secs < 5.0, fmt::format("R0 from {:.4f} at 0.05 to {:.4f} at 0.95", first, last)};
  });

  fmt::print("{} of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
