#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace vbd {

/// Rates of the linear viral-load / antibody system
///   z' = a1 z - a2 y,   y' = a4 z - a3 y
/// plus the recovered-phase antibody decay a5 and the detection floor z0.
struct WithinHostParams {
  double a1 = 1.0;
  double a2 = 0.44;
  double a3 = 0.72;
  double a4 = 1.93;
  double a5 = 0.01;
  double z0 = 1.0;

  /// Antibody level at which the viral-load velocity on z = z0 changes sign.
  double y0() const { return z0 * a1 / a2; }
  /// 4 a2 a4 - (a1 + a3)^2; positive iff the characteristics spiral.
  double discriminant() const { return 4.0 * a2 * a4 - (a1 + a3) * (a1 + a3); }
};

/// Reference within-host rates used throughout the dengue experiments.
WithinHostParams reference_within_host();

/// Entry antibody level, as a fraction of y0, used for scalar summaries
/// (random search filter, UHR defaults) when the caller does not supply one.
inline constexpr double kDefaultEntryFraction = 0.5;

enum class Admissibility { Ok, NonPositiveParameter, NonOscillatory };

struct Validation {
  Admissibility status = Admissibility::Ok;
  double discriminant = 0.0;
  bool ok() const { return status == Admissibility::Ok; }
};

Validation validate(const WithinHostParams& p);

/// Throws NonPositiveParameter / NonOscillatory when validate() is not Ok.
void require_valid(const WithinHostParams& p);

double antibody_threshold(const WithinHostParams& p);
double oscillation_frequency(const WithinHostParams& p);

struct CharPoint {
  double z;
  double y;
  double tau;
};

/// Point reached after `tau` days along the characteristic leaving (z0, y_entry).
CharPoint characteristic_at(const WithinHostParams& p, double y_entry, double tau);

/// Flow of the linear within-host system from an arbitrary point; tau may be
/// negative (backward flow).
std::pair<double, double> flow(const WithinHostParams& p, double z, double y, double tau);

struct InfectionWindow {
  double y_entry;
  double tau1;    // permanence time in the infected compartment
  double y_plus;  // antibody level at exit, > y0
  double tau2;    // recovery period (1/a5) ln(y_plus / y0)
};

/// Permanence time and exit level for a host entering at (z0, y_entry).
InfectionWindow permanence(const WithinHostParams& p, double y_entry);

/// tau1 as a function of the entry fraction alpha = y_entry / y0 only.
double permanence_time(const WithinHostParams& p, double alpha);

double recovery_period(const WithinHostParams& p, double y_plus);

/// Factor e^{(a3-a1) tau} carried by the infected density along a characteristic.
double reconstruct_density(const WithinHostParams& p, double y_entry, double tau);

/// Largest z and y reached along the characteristic from (z0, y_entry)
/// before it returns to z = z0.
struct CharacteristicExtent {
  double z_max;
  double y_max;
};
CharacteristicExtent characteristic_extent(const WithinHostParams& p, double y_entry);

/// Inverse of the characteristic flow on the infected domain A: the entry
/// level and elapsed time of the characteristic through (z, y), or nullopt if
/// (z, y) is not reached by any characteristic entering on [0, y0).
struct FlowOrigin {
  double y_entry;
  double tau;
};
std::optional<FlowOrigin> flow_origin(const WithinHostParams& p, double z, double y);

struct AdmissibleSample {
  WithinHostParams params;
  double tau1;
};

inline constexpr std::uint64_t kSamplingDrawBudget = 1'000'000;

/// Random search over (a1..a4) in (0, 10)^4. Keeps draws that spiral and
/// whose tau1 at `alpha` lies strictly inside tau1_range. a5 and z0 are
/// copied from `base`. Throws ExhaustedBudget past kSamplingDrawBudget draws.
std::vector<AdmissibleSample> sample_admissible(int n, std::uint64_t seed, std::pair<double, double> tau1_range,
                                                const WithinHostParams& base = reference_within_host(),
                                                double alpha = kDefaultEntryFraction);

}  // namespace vbd
