#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vbd/errors.hpp"
#include "vbd/uhr_solver.hpp"

using namespace vbd;

namespace {

// Explicit Euler with the delay integrals recomputed from scratch each step.
struct Naive {
  double E, Ev, Iv, I_total, R_total;
};

Naive naive_run(const EpiParams& epi, long n1, long n2, double dt, double e_hist, long steps) {
  const long N = n1 + n2;
  std::vector<double> e(static_cast<std::size_t>(N + 1), e_hist);
  double Ev = 0.0, Iv = 0.0;
  auto trap = [&](long k) {
    double s = 0.0;
    const std::size_t last = e.size() - 1;
    for (long i = 0; i <= k; ++i) s += e[last - static_cast<std::size_t>(i)];
    s -= 0.5 * (e[last] + e[last - static_cast<std::size_t>(k)]);
    return s * dt / epi.tau_h;
  };
  for (long n = 0; n < steps; ++n) {
    const double E = e.back();
    const double w_all = trap(N), w_rec = trap(n1);
    const double En = E + dt * (epi.b * epi.beta_vh * epi.m * Iv * (1.0 - E - w_all) - E / epi.tau_h);
    const double Evn =
        Ev + dt * (epi.b * epi.beta_hv.level() * w_rec * (1.0 - Ev - Iv) - (1.0 / epi.tau_v + epi.mu_v) * Ev);
    const double Ivn = Iv + dt * (Ev / epi.tau_v - epi.mu_v * Iv);
    e.push_back(En);
    Ev = Evn;
    Iv = Ivn;
  }
  const double w_all = trap(N), w_rec = trap(n1);
  return {e.back(), Ev, Iv, w_rec, w_all - w_rec};
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("step snapping keeps tau1 exact and tau2 within half a step") {
  const UhrSteps s = snap_steps(6.3977, 69.87, 0.01);
  CHECK(s.n1 == 640);
  CHECK(s.dt * s.n1 == doctest::Approx(6.3977).epsilon(1e-14));
  CHECK(std::fabs(s.dt * s.n2 - 69.87) <= 0.5 * s.dt + 1e-12);
  const UhrSteps t = snap_steps(6.4, 70.0, 0.01);
  CHECK(t.n1 == 640);
  CHECK(t.n2 == 7000);
}

TEST_CASE("ring-buffer solver matches a direct-sum Euler scheme") {
  UhrScenario sc;
  sc.epi = baseline_epi();
  sc.tau1 = 6.4;
  sc.tau2 = 20.0;
  sc.dt = 0.05;
  sc.t_end = 300.0;
  sc.history = UhrHistory::constant(1e-3);
  sc.record_stride = -1;
  const UhrSeries s = simulate(sc);
  REQUIRE(s.records.size() == 2);
  const Naive ref = naive_run(sc.epi, s.n1, s.n2, s.dt, 1e-3, 6000);
  const UhrRecord& r = s.records.back();
  CHECK(r.t == doctest::Approx(300.0));
  CHECK(r.E == doctest::Approx(ref.E).epsilon(1e-10));
  CHECK(r.Ev == doctest::Approx(ref.Ev).epsilon(1e-10));
  CHECK(r.Iv == doctest::Approx(ref.Iv).epsilon(1e-10));
  CHECK(r.I_total == doctest::Approx(ref.I_total).epsilon(1e-10));
  CHECK(r.R_total == doctest::Approx(ref.R_total).epsilon(1e-10));
}

TEST_CASE("host totals are conserved along every record") {
  for (double e0 : {1e-4, 1e-2}) {
    UhrScenario sc;
    sc.epi = baseline_epi();
    sc.history = UhrHistory::constant(e0);
    sc.Iv0 = 0.01;
    sc.t_end = 800.0;
    sc.record_stride = 1;
    for (const auto& r : simulate(sc).records) {
      CHECK(std::fabs(r.S + r.E + r.I_total + r.R_total - 1.0) < 1e-9);
      CHECK(r.S >= 0.0);
    }
  }
}

TEST_CASE("reference run settles on the endemic state") {
  UhrScenario sc;
  sc.epi = baseline_epi();
  sc.history = UhrHistory::constant(1e-4);
  sc.record_stride = -1;
  const UhrSeries s = simulate(sc);
  const EndemicState eq = *endemic_uhr(sc.epi, s.tau1, s.tau2);
  const UhrRecord& r = s.records.back();
  CHECK(std::fabs(r.E - eq.E) / eq.E < 1e-2);
  CHECK(std::fabs(r.Ev - eq.Ev) / eq.Ev < 1e-2);
  CHECK(std::fabs(r.Iv - eq.Iv) / eq.Iv < 1e-2);
}

TEST_CASE("infection dies out below the threshold") {
  UhrScenario sc;
  sc.epi = baseline_epi();
  sc.epi.m *= 0.5 / r0_uhr(sc.epi, 6.4);
  sc.history = UhrHistory::constant(1e-4);
  sc.t_end = 1e4;
  sc.record_stride = -1;
  CHECK(simulate(sc).records.back().I_total < 1e-10);
}

TEST_CASE("history built from initial totals reproduces them") {
  UhrScenario sc;
  sc.epi = baseline_epi();
  sc.history = UhrHistory::from_totals(0.03, 0.4);
  sc.t_end = 0.0;
  const UhrSeries s = simulate(sc);
  REQUIRE(s.records.size() == 1);
  CHECK(s.records[0].I_total == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(s.records[0].R_total == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("tabulated history is sampled on the step grid") {
  UhrScenario sc;
  sc.epi = baseline_epi();
  sc.history = UhrHistory::tabulated({-100.0, 0.0}, {0.0, 0.01});
  sc.t_end = 0.0;
  const UhrSeries s = simulate(sc);
  CHECK(s.records[0].E == doctest::Approx(0.01));
  CHECK(s.records[0].I_total > 0.0);
}

TEST_CASE("solver errors") {
  UhrScenario sc;
  sc.epi = baseline_epi();
  sc.epi.beta_hv = BetaHv::logistic(0.2, 2.0, 1.0);
  CHECK(kind_of([&] { simulate(sc); }) == ErrorKind::NonConstantBetaHv);

  sc.epi = baseline_epi();
  sc.history = UhrHistory::constant(0.5);
  CHECK(kind_of([&] { simulate(sc); }) == ErrorKind::InvalidArgument);

  sc.history = UhrHistory::constant(1e-3);
  sc.tau1 = 20.0;
  sc.dt = 10.0;
  sc.t_end = 100.0;
  CHECK(kind_of([&] { simulate(sc); }) == ErrorKind::NegativeState);
}

TEST_CASE("threshold scan splits at one") {
  ThresholdConfig cfg;
  cfg.n = 2;
  cfg.r0_range = {0.5, 2.0};
  const auto recs = threshold_scan(reference_within_host(), baseline_epi(), cfg, 2);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].r0 == doctest::Approx(0.5));
  CHECK(recs[1].r0 == doctest::Approx(2.0));
  CHECK(recs[0].I_final < 1e-10);
  CHECK(recs[1].I_final > 1e-4);
  cfg.n = 1;
  CHECK_THROWS_AS(threshold_scan(reference_within_host(), baseline_epi(), cfg), Error);
}

TEST_CASE("entry-level sweep: R0 falls and oscillations weaken as alpha grows") {
  UhrRunConfig run;
  run.record_stride = 10;
  const auto recs = sweep_ystar(reference_within_host(), baseline_epi(), {0.05, 0.5, 0.8}, run, 0);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].r0 > recs[1].r0);
  CHECK(recs[1].r0 > recs[2].r0);
  auto amplitude = [](const UhrSeries& s) {
    double lo = 1.0, hi = 0.0;
    for (const auto& r : s.records) {
      if (r.t < 2500.0) continue;
      lo = std::min(lo, r.Iv);
      hi = std::max(hi, r.Iv);
    }
    return hi - lo;
  };
  CHECK(amplitude(recs[2].series) < amplitude(recs[0].series));
  CHECK_THROWS_AS(sweep_ystar(reference_within_host(), baseline_epi(), {0.0}, run), Error);
}
