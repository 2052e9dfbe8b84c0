#include "vbd/entry_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vbd/errors.hpp"

namespace vbd {
namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

void check_support(double y0) {
  if (!(y0 > 0.0) || !std::isfinite(y0)) throw Error(ErrorKind::InvalidArgument, "support bound y0 must be positive");
}

}  // namespace

EntryDistribution EntryDistribution::dirac(double y_star, double y0) {
  check_support(y0);
  if (!(y_star > 0.0 && y_star < y0)) {
    throw Error(ErrorKind::EntryOutOfRange, "Dirac location " + std::to_string(y_star) + " outside (0, y0)");
  }
  EntryDistribution g;
  g.kind_ = Kind::Dirac;
  g.y0_ = y0;
  g.center_ = y_star;
  return g;
}

EntryDistribution EntryDistribution::gaussian(double center, double variance, double y0) {
  check_support(y0);
  if (!(variance > 0.0)) throw Error(ErrorKind::InvalidArgument, "Gaussian variance must be positive");
  EntryDistribution g;
  g.kind_ = Kind::Gaussian;
  g.y0_ = y0;
  g.center_ = center;
  g.variance_ = variance;
  const double sd = std::sqrt(variance);
  g.norm_ = std_normal_cdf((y0 - center) / sd) - std_normal_cdf(-center / sd);
  if (!(g.norm_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "Gaussian has no mass on [0, y0]");
  return g;
}

EntryDistribution EntryDistribution::uniform(double y0) {
  check_support(y0);
  EntryDistribution g;
  g.kind_ = Kind::Uniform;
  g.y0_ = y0;
  g.center_ = 0.5 * y0;
  return g;
}

EntryDistribution EntryDistribution::tabulated(std::vector<double> nodes, std::vector<double> values, double y0) {
  check_support(y0);
  if (nodes.size() < 2 || nodes.size() != values.size()) {
    throw Error(ErrorKind::InvalidArgument, "tabulated density needs >= 2 matching nodes and values");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (values[i] < 0.0) throw Error(ErrorKind::InvalidArgument, "tabulated density must be non-negative");
    if (i > 0 && !(nodes[i] > nodes[i - 1])) throw Error(ErrorKind::InvalidArgument, "tabulated nodes must increase");
  }
  if (nodes.front() < 0.0 || nodes.back() > y0) {
    throw Error(ErrorKind::InvalidArgument, "tabulated nodes must lie in [0, y0]");
  }
  EntryDistribution g;
  g.kind_ = Kind::Tabulated;
  g.y0_ = y0;
  g.nodes_ = std::move(nodes);
  g.values_ = std::move(values);
  double total = 0.0;
  for (std::size_t i = 1; i < g.nodes_.size(); ++i) {
    total += 0.5 * (g.values_[i] + g.values_[i - 1]) * (g.nodes_[i] - g.nodes_[i - 1]);
  }
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "tabulated density integrates to zero");
  g.norm_ = total;
  return g;
}

double EntryDistribution::pdf(double y) const {
  if (y < 0.0 || y > y0_) return 0.0;
  switch (kind_) {
    case Kind::Dirac: throw Error(ErrorKind::InvalidArgument, "Dirac entry distribution has no density");
    case Kind::Uniform: return 1.0 / y0_;
    case Kind::Gaussian: {
      const double sd = std::sqrt(variance_);
      return std_normal_pdf((y - center_) / sd) / (sd * norm_);
    }
    case Kind::Tabulated: {
      if (y < nodes_.front() || y > nodes_.back()) return 0.0;
      const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y);
      const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - nodes_.begin()), nodes_.size() - 1);
      const double w = (y - nodes_[i - 1]) / (nodes_[i] - nodes_[i - 1]);
      return ((1.0 - w) * values_[i - 1] + w * values_[i]) / norm_;
    }
  }
  return 0.0;
}

double EntryDistribution::cdf(double y) const {
  if (y <= 0.0) return 0.0;
  if (y >= y0_) return 1.0;
  switch (kind_) {
    case Kind::Dirac: return y > center_ ? 1.0 : 0.0;
    case Kind::Uniform: return y / y0_;
    case Kind::Gaussian: {
      const double sd = std::sqrt(variance_);
      return (std_normal_cdf((y - center_) / sd) - std_normal_cdf(-center_ / sd)) / norm_;
    }
    case Kind::Tabulated: {
      double acc = 0.0;
      for (std::size_t i = 1; i < nodes_.size(); ++i) {
        const double a = nodes_[i - 1];
        if (y <= a) break;
        const double b = std::min(nodes_[i], y);
        const double fb = pdf(b) * norm_;
        acc += 0.5 * (values_[i - 1] + fb) * (b - a);
      }
      return acc / norm_;
    }
  }
  return 0.0;
}

double EntryDistribution::mass(double lo, double hi) const {
  if (hi < lo) std::swap(lo, hi);
  if (kind_ == Kind::Dirac) {
    const bool inside = center_ >= lo && (center_ < hi || (hi >= y0_ && center_ <= hi));
    return inside ? 1.0 : 0.0;
  }
  return cdf(hi) - cdf(lo);
}

double EntryDistribution::mean() const {
  switch (kind_) {
    case Kind::Dirac:
    case Kind::Uniform: return center_;
    case Kind::Gaussian: {
      const double sd = std::sqrt(variance_);
      const double lo = -center_ / sd;
      const double hi = (y0_ - center_) / sd;
      return center_ + sd * (std_normal_pdf(lo) - std_normal_pdf(hi)) / norm_;
    }
    case Kind::Tabulated: {
      // Exact first moment of each linear segment.
      double acc = 0.0;
      for (std::size_t i = 1; i < nodes_.size(); ++i) {
        const double a = nodes_[i - 1], b = nodes_[i];
        const double fa = values_[i - 1], fb = values_[i];
        acc += (b - a) * (fa * (2.0 * a + b) + fb * (a + 2.0 * b)) / 6.0;
      }
      return acc / norm_;
    }
  }
  return center_;
}

}  // namespace vbd
