#include "vbd/within_host.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "vbd/errors.hpp"
#include "vbd/numerics.hpp"

namespace vbd {
namespace {

constexpr double kRootTol = 1e-13;

struct Spiral {
  double sigma;  // (a1 - a3) / 2, growth of the spiral envelope
  double beta;   // angular frequency
  double c;      // (a1 + a3) / 2
};

Spiral spiral_of(const WithinHostParams& p) {
  require_valid(p);
  return {0.5 * (p.a1 - p.a3), 0.5 * std::sqrt(p.discriminant()), 0.5 * (p.a1 + p.a3)};
}

// (f(tau) - 1) / tau for the permanence equation written in alpha, evaluated
// without cancellation near tau = 0. Positive on the initial arc, its first
// zero is tau1. Only the sign matters to the caller.
double return_gap_rate(const Spiral& s, double k, double limit_at_zero, double tau) {
  if (tau == 0.0) return limit_at_zero;
  const double bt = s.beta * tau;
  const double half = std::sin(0.5 * bt);
  const double st = s.sigma * tau;
  // A growing envelope is divided out so long horizons cannot overflow.
  const double gap = st > 0.0 ? -std::expm1(-st) * std::cos(bt) - 2.0 * half * half * std::exp(-st) + k * std::sin(bt)
                              : std::expm1(st) * std::cos(bt) - 2.0 * half * half + std::exp(st) * k * std::sin(bt);
  return gap / tau;
}

}  // namespace

WithinHostParams reference_within_host() { return WithinHostParams{}; }

Validation validate(const WithinHostParams& p) {
  Validation v;
  v.discriminant = p.discriminant();
  const bool positive = p.a1 > 0 && p.a2 > 0 && p.a3 > 0 && p.a4 > 0 && p.a5 > 0 && p.z0 > 0;
  if (!positive) {
    v.status = Admissibility::NonPositiveParameter;
  } else if (!(v.discriminant > 0.0)) {
    v.status = Admissibility::NonOscillatory;
  }
  return v;
}

void require_valid(const WithinHostParams& p) {
  const Validation v = validate(p);
  switch (v.status) {
    case Admissibility::Ok: return;
    case Admissibility::NonPositiveParameter:
      throw Error(ErrorKind::NonPositiveParameter, "within-host rates and z0 must be strictly positive");
    case Admissibility::NonOscillatory:
      throw Error(ErrorKind::NonOscillatory, "4 a2 a4 - (a1 + a3)^2 = " + std::to_string(v.discriminant) + " is not positive");
  }
}

double antibody_threshold(const WithinHostParams& p) {
  require_valid(p);
  return p.y0();
}

double oscillation_frequency(const WithinHostParams& p) { return spiral_of(p).beta; }

std::pair<double, double> flow(const WithinHostParams& p, double z, double y, double tau) {
  const Spiral s = spiral_of(p);
  const double env = std::exp(s.sigma * tau);
  const double cs = std::cos(s.beta * tau);
  const double sn = std::sin(s.beta * tau) / s.beta;
  return {env * (cs * z + sn * (s.c * z - p.a2 * y)), env * (cs * y + sn * (p.a4 * z - s.c * y))};
}

CharPoint characteristic_at(const WithinHostParams& p, double y_entry, double tau) {
  require_valid(p);
  if (!(y_entry >= 0.0 && y_entry < p.y0())) {
    throw Error(ErrorKind::EntryOutOfRange, "entry level " + std::to_string(y_entry) + " outside [0, y0)");
  }
  if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be non-negative");
  const auto [z, y] = flow(p, p.z0, y_entry, tau);
  return {z, y, tau};
}

double permanence_time(const WithinHostParams& p, double alpha) {
  const Spiral s = spiral_of(p);
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::EntryOutOfRange, "entry fraction " + std::to_string(alpha) + " outside [0, 1)");
  }
  const double k = (p.a1 + p.a3 - 2.0 * alpha * p.a1) / (2.0 * s.beta);
  const double slope0 = p.a1 * (1.0 - alpha);
  auto gap = [&](double tau) { return return_gap_rate(s, k, slope0, tau); };

  const double step = std::numbers::pi / (20.0 * s.beta);
  const double horizon = 2.0 * std::numbers::pi / s.beta;
  double lo = 0.0;
  for (int i = 1;; ++i) {
    const double hi = i * step;
    if (hi > horizon * (1.0 + 1e-12)) break;
    if (gap(hi) <= 0.0) {
      return numerics::find_root(gap, {lo, hi, kRootTol * std::max(1.0, hi), 200});
    }
    lo = hi;
  }
  throw Error(ErrorKind::RootNotFound, "no return to z0 within 2 pi / beta");
}

InfectionWindow permanence(const WithinHostParams& p, double y_entry) {
  require_valid(p);
  const double y0 = p.y0();
  if (!(y_entry >= 0.0 && y_entry < y0)) {
    throw Error(ErrorKind::EntryOutOfRange, "entry level " + std::to_string(y_entry) + " outside [0, y0)");
  }
  const double tau1 = permanence_time(p, y_entry / y0);
  double y_plus = flow(p, p.z0, y_entry, tau1).second;
  if (y_plus < y0 * (1.0 - 1e-9)) {
    throw Error(ErrorKind::RootNotFound, "return point has y = " + std::to_string(y_plus) + " below y0");
  }
  // Entries just under y0 return with y_plus equal to y0 up to rounding.
  y_plus = std::max(y_plus, y0);
  return {y_entry, tau1, y_plus, recovery_period(p, y_plus)};
}

double recovery_period(const WithinHostParams& p, double y_plus) {
  if (!(p.a5 > 0.0)) throw Error(ErrorKind::NonPositiveParameter, "a5 must be positive");
  const double y0 = p.y0();
  if (!(y_plus >= y0)) {
    throw Error(ErrorKind::BelowThreshold, "exit level " + std::to_string(y_plus) + " below y0");
  }
  return std::log(y_plus / y0) / p.a5;
}

double reconstruct_density(const WithinHostParams& p, double y_entry, double tau) {
  characteristic_at(p, y_entry, tau);  // domain checks only
  return std::exp((p.a3 - p.a1) * tau);
}

CharacteristicExtent characteristic_extent(const WithinHostParams& p, double y_entry) {
  const InfectionWindow w = permanence(p, y_entry);
  constexpr int kSamples = 400;
  const double h = w.tau1 / kSamples;

  auto z_at = [&](double t) { return flow(p, p.z0, y_entry, t).first; };
  auto y_at = [&](double t) { return flow(p, p.z0, y_entry, t).second; };
  auto z_rate = [&](double t) {
    const auto [z, y] = flow(p, p.z0, y_entry, t);
    return p.a1 * z - p.a2 * y;
  };
  auto y_rate = [&](double t) {
    const auto [z, y] = flow(p, p.z0, y_entry, t);
    return p.a4 * z - p.a3 * y;
  };

  // Largest sampled value, then polish at the stationary point of the curve.
  auto polish = [&](auto&& value, auto&& rate) {
    int best = 0;
    double best_v = value(0.0);
    for (int i = 1; i <= kSamples; ++i) {
      const double v = value(i * h);
      if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    const double lo = std::max(0, best - 1) * h;
    const double hi = std::min(kSamples, best + 1) * h;
    if (rate(lo) > 0.0 && rate(hi) < 0.0) {
      const double t = numerics::find_root(rate, {lo, hi, kRootTol, 200});
      best_v = std::max(best_v, value(t));
    }
    return best_v;
  };
  return {polish(z_at, z_rate), polish(y_at, y_rate)};
}

std::optional<FlowOrigin> flow_origin(const WithinHostParams& p, double z, double y) {
  const Spiral s = spiral_of(p);
  const double y0 = p.y0();
  if (z < p.z0 || y < 0.0) return std::nullopt;
  if (z == p.z0) {
    if (y < y0) return FlowOrigin{y, 0.0};
    return std::nullopt;
  }
  auto gap = [&](double back) { return flow(p, z, y, -back).first - p.z0; };

  // Backward travel inside A never exceeds tau1(0) <= pi / beta.
  const double step = std::numbers::pi / (60.0 * s.beta);
  const double horizon = std::numbers::pi / s.beta + step;
  double lo = 0.0;
  for (int i = 1; i * step <= horizon; ++i) {
    const double hi = i * step;
    if (gap(hi) <= 0.0) {
      const double back = numerics::find_root(gap, {lo, hi, kRootTol, 200});
      const double y_entry = flow(p, z, y, -back).second;
      if (y_entry >= 0.0 && y_entry < y0) return FlowOrigin{y_entry, back};
      return std::nullopt;
    }
    lo = hi;
  }
  return std::nullopt;
}

std::vector<AdmissibleSample> sample_admissible(int n, std::uint64_t seed, std::pair<double, double> tau1_range,
                                                const WithinHostParams& base, double alpha) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be >= 1");
  std::mt19937_64 gen(seed);
  // 53-bit mantissa fill keeps the sequence identical across standard libraries.
  auto uniform_open10 = [&gen]() {
    for (;;) {
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      if (u > 0.0) return 10.0 * u;
    }
  };

  std::vector<AdmissibleSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t draws = 0; draws < kSamplingDrawBudget; ++draws) {
    WithinHostParams cand = base;
    cand.a1 = uniform_open10();
    cand.a2 = uniform_open10();
    cand.a3 = uniform_open10();
    cand.a4 = uniform_open10();
    if (!validate(cand).ok()) continue;
    const double tau1 = permanence_time(cand, alpha);
    if (tau1 > tau1_range.first && tau1 < tau1_range.second) {
      out.push_back({cand, tau1});
      if (static_cast<int>(out.size()) == n) return out;
    }
  }
  throw Error(ErrorKind::ExhaustedBudget, "accepted " + std::to_string(out.size()) + " of " + std::to_string(n) +
                                              " samples within " + std::to_string(kSamplingDrawBudget) + " draws");
}

}  // namespace vbd
