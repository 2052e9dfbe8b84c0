#include "vbd/uhr_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vbd/errors.hpp"
#include "vbd/kernels.hpp"
#include "vbd/parallel.hpp"

namespace vbd {
namespace {

constexpr double kNegativeTol = -1e-9;
constexpr long kMaxSteps = 2'000'000'000L;

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

// Samples of E at s_i = -(N - i) dt, i = 0..N.
std::vector<double> history_samples(const UhrScenario& sc, const UhrSteps& st) {
  const long N = st.n1 + st.n2;
  std::vector<double> e(static_cast<std::size_t>(N + 1));
  const UhrHistory& h = sc.history;
  double recent = h.recent, older = h.older;
  if (h.kind == UhrHistory::Kind::Totals) {
    const double tau1 = st.n1 * st.dt, tau2 = st.n2 * st.dt;
    recent = h.infected * sc.epi.tau_h / tau1;
    if (st.n2 == 0) {
      if (h.recovered != 0.0) throw Error(ErrorKind::InvalidArgument, "no recovered window to hold R_total");
      older = recent;
    } else {
      older = (h.recovered * sc.epi.tau_h - 0.5 * recent * st.dt) / (tau2 - 0.5 * st.dt);
    }
    if (older < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "initial totals need a negative history level; raise R_total");
    }
  }
  for (long i = 0; i <= N; ++i) {
    double v;
    if (h.kind == UhrHistory::Kind::Tabulated) {
      v = interpolate(h.times, h.values, -static_cast<double>(N - i) * st.dt);
    } else {
      v = (i >= st.n2) ? recent : older;
    }
    e[static_cast<std::size_t>(i)] = v;
  }
  return e;
}

void check_scenario(const UhrScenario& sc) {
  require_valid(sc.epi);
  if (!sc.epi.beta_hv.is_constant()) throw Error(ErrorKind::NonConstantBetaHv, "the delay model needs a constant beta_hv");
  if (!(sc.tau1 > 0.0) || !(sc.tau2 >= 0.0)) throw Error(ErrorKind::InvalidArgument, "need tau1 > 0 and tau2 >= 0");
  if (!(sc.dt > 0.0) || !(sc.t_end >= 0.0)) throw Error(ErrorKind::InvalidArgument, "need dt > 0 and t_end >= 0");
  if (!(sc.Ev0 >= 0.0 && sc.Iv0 >= 0.0 && sc.Ev0 + sc.Iv0 <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "initial vector state must satisfy Ev0, Iv0 >= 0 and Ev0 + Iv0 <= 1");
  }
  const UhrHistory& h = sc.history;
  if (h.kind == UhrHistory::Kind::Tabulated) {
    if (h.times.size() < 2 || h.times.size() != h.values.size() || !std::is_sorted(h.times.begin(), h.times.end())) {
      throw Error(ErrorKind::InvalidArgument, "tabulated history needs >= 2 increasing nodes");
    }
  }
}

}  // namespace

UhrHistory UhrHistory::piecewise(double recent, double older) {
  if (!(recent >= 0.0 && older >= 0.0)) throw Error(ErrorKind::InvalidArgument, "history levels must be non-negative");
  UhrHistory h;
  h.kind = Kind::Piecewise;
  h.recent = recent;
  h.older = older;
  return h;
}

UhrHistory UhrHistory::from_totals(double infected, double recovered) {
  if (!(infected >= 0.0 && recovered >= 0.0)) throw Error(ErrorKind::InvalidArgument, "initial totals must be non-negative");
  UhrHistory h;
  h.kind = Kind::Totals;
  h.infected = infected;
  h.recovered = recovered;
  return h;
}

UhrHistory UhrHistory::tabulated(std::vector<double> times, std::vector<double> values) {
  for (double v : values) {
    if (!(v >= 0.0)) throw Error(ErrorKind::InvalidArgument, "history values must be non-negative");
  }
  UhrHistory h;
  h.kind = Kind::Tabulated;
  h.times = std::move(times);
  h.values = std::move(values);
  return h;
}

UhrSteps snap_steps(double tau1, double tau2, double dt) {
  if (!(tau1 > 0.0) || !(tau2 >= 0.0) || !(dt > 0.0)) {
    throw Error(ErrorKind::BufferMisaligned, "cannot align steps to tau1 = " + std::to_string(tau1));
  }
  const double n1f = std::max(1.0, std::round(tau1 / dt));
  const double h = tau1 / n1f;
  const double n2f = std::round(tau2 / h);
  if (!(n1f + n2f < static_cast<double>(kMaxSteps))) {
    throw Error(ErrorKind::BufferMisaligned, "history window needs too many steps");
  }
  return {h, static_cast<long>(n1f), static_cast<long>(n2f)};
}

UhrSeries simulate(const UhrScenario& sc) {
  check_scenario(sc);
  const UhrSteps st = snap_steps(sc.tau1, sc.tau2, sc.dt);
  const double dt = st.dt;
  const long n1 = st.n1;
  const long N = st.n1 + st.n2;
  const std::size_t L = static_cast<std::size_t>(N + 1);

  std::vector<double> ring = history_samples(sc, st);
  {
    double mass = 0.0;  // I_total + R_total implied by the history
    for (std::size_t i = 0; i < L; ++i) mass += ring[i];
    mass = dt * (mass - 0.5 * (ring.front() + ring.back())) / sc.epi.tau_h;
    if (mass + ring.back() > 1.0 + 1e-12) throw Error(ErrorKind::InvalidArgument, "history puts more than all hosts in E, I, R");
  }

  const EpiParams& epi = sc.epi;
  const double c_e = epi.b * epi.beta_vh * epi.m;
  const double c_v = epi.b * epi.beta_hv.level();
  const double loss_v = 1.0 / epi.tau_v + epi.mu_v;
  const double scale = dt / epi.tau_h;

  // ring[head] holds the newest sample; index (head - k) mod L is k steps back.
  std::size_t head = L - 1;
  auto back = [&](long k) { return ring[(head + L - static_cast<std::size_t>(k % static_cast<long>(L))) % L]; };
  auto exact_sums = [&](double& all, double& recent) {
    all = kernels::sum(L, ring.data());
    const std::size_t first = (head + L - static_cast<std::size_t>(n1)) % L;
    if (first <= head) {
      recent = kernels::sum(head - first + 1, ring.data() + first);
    } else {
      recent = kernels::sum(L - first, ring.data() + first) + kernels::sum(head + 1, ring.data());
    }
  };
  double sum_all = 0.0, sum_recent = 0.0;
  exact_sums(sum_all, sum_recent);

  const long n_steps = static_cast<long>(std::llround(sc.t_end / dt));
  if (n_steps >= kMaxSteps) throw Error(ErrorKind::InvalidArgument, "t_end / dt is too large");
  const long stride = sc.record_stride > 0 ? sc.record_stride
                      : sc.record_stride == 0 ? std::max(1L, static_cast<long>(std::llround(0.1 / dt)))
                                              : n_steps + 1;

  UhrSeries out;
  out.dt = dt;
  out.n1 = st.n1;
  out.n2 = st.n2;
  out.tau1 = st.n1 * dt;
  out.tau2 = st.n2 * dt;
  out.records.reserve(static_cast<std::size_t>(n_steps / stride + 2));

  double E = ring[head], Ev = sc.Ev0, Iv = sc.Iv0;
  auto windows = [&](double& w_all, double& w_recent) {
    w_all = scale * (sum_all - 0.5 * (back(N) + E));
    w_recent = scale * (sum_recent - 0.5 * (back(n1) + E));
  };
  auto record = [&](long n, double w_all, double w_recent) {
    const double I_total = w_recent;
    const double R_total = w_all - w_recent;
    out.records.push_back({n * dt, E, Ev, Iv, 1.0 - E - I_total - R_total, I_total, R_total});
  };

  for (long n = 0;; ++n) {
    double w_all, w_recent;
    windows(w_all, w_recent);
    if (n % stride == 0 || n == n_steps) record(n, w_all, w_recent);
    if (n == n_steps) break;

    const double E_next = E + dt * (c_e * Iv * (1.0 - E - w_all) - E / epi.tau_h);
    const double Ev_next = Ev + dt * (c_v * w_recent * (1.0 - Ev - Iv) - loss_v * Ev);
    const double Iv_next = Iv + dt * (Ev / epi.tau_v - epi.mu_v * Iv);
    if (!(E_next >= kNegativeTol && Ev_next >= kNegativeTol && Iv_next >= kNegativeTol)) {
      if (!std::isfinite(E_next) || !std::isfinite(Ev_next) || !std::isfinite(Iv_next)) {
        throw Error(ErrorKind::NonFiniteState, "delay system diverged at t = " + std::to_string((n + 1) * dt));
      }
      throw Error(ErrorKind::NegativeState, "negative state at t = " + std::to_string((n + 1) * dt) + "; reduce dt");
    }

    const double leaving_all = back(N);
    const double leaving_recent = back(n1);
    head = (head + 1) % L;
    ring[head] = E_next;
    sum_all += E_next - leaving_all;
    sum_recent += E_next - leaving_recent;
    E = E_next;
    Ev = Ev_next;
    Iv = Iv_next;
    if ((n + 1) % static_cast<long>(L) == 0) exact_sums(sum_all, sum_recent);
  }
  return out;
}

std::vector<YstarRecord> sweep_ystar(const WithinHostParams& whp, const EpiParams& epi, const std::vector<double>& alphas,
                                     const UhrRunConfig& run, unsigned threads) {
  require_valid(whp);
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorKind::EntryOutOfRange, "alpha " + std::to_string(a) + " outside (0, 1)");
  }
  std::vector<YstarRecord> out(alphas.size());
  parallel_for(alphas.size(), threads, [&](std::size_t i) {
    const double alpha = alphas[i];
    const InfectionWindow w = permanence(whp, alpha * whp.y0());
    UhrScenario sc;
    sc.epi = epi;
    sc.tau1 = w.tau1;
    sc.tau2 = w.tau2;
    sc.history = run.history;
    sc.Ev0 = run.Ev0;
    sc.Iv0 = run.Iv0;
    sc.t_end = run.t_end;
    sc.dt = run.dt;
    sc.record_stride = run.record_stride;
    out[i] = {alpha, w, r0_uhr(epi, w.tau1), endemic_uhr(epi, w.tau1, w.tau2), simulate(sc)};
  });
  return out;
}

std::vector<ThresholdRecord> threshold_scan(const WithinHostParams& whp, const EpiParams& epi_base,
                                            const ThresholdConfig& cfg, unsigned threads) {
  if (cfg.n < 2) throw Error(ErrorKind::InvalidArgument, "threshold scan needs n >= 2");
  if (!(cfg.r0_range.first > 0.0 && cfg.r0_range.second > cfg.r0_range.first)) {
    throw Error(ErrorKind::InvalidArgument, "R0 range must be positive and increasing");
  }
  double tau1 = 0.0, tau2 = 0.0;
  if (!cfg.tau1 || !cfg.tau2) {
    const InfectionWindow w = permanence(whp, cfg.alpha * whp.y0());
    tau1 = w.tau1;
    tau2 = w.tau2;
  }
  if (cfg.tau1) tau1 = *cfg.tau1;
  if (cfg.tau2) tau2 = *cfg.tau2;

  EpiParams unit = epi_base;
  unit.m = 1.0;
  const double r0_per_m = r0_uhr(unit, tau1);
  if (!(r0_per_m > 0.0)) throw Error(ErrorKind::InvalidArgument, "R0 does not depend on m for these parameters");

  const auto n = static_cast<std::size_t>(cfg.n);
  std::vector<ThresholdRecord> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const double r0 = cfg.r0_range.first + (cfg.r0_range.second - cfg.r0_range.first) * static_cast<double>(i) /
                                               static_cast<double>(n - 1);
    UhrScenario sc;
    sc.epi = epi_base;
    sc.epi.m = r0 / r0_per_m;
    sc.tau1 = tau1;
    sc.tau2 = tau2;
    sc.history = UhrHistory::constant(cfg.seed);
    sc.t_end = cfg.t_f;
    sc.dt = cfg.dt;
    sc.record_stride = -1;
    const UhrSeries s = simulate(sc);
    out[i] = {r0, sc.epi.m, s.records.back().I_total};
  });
  return out;
}

}  // namespace vbd
