#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "cczsim/device.hpp"

namespace ccz {

/// Flat-top pulse with erf edges. `amplitude` is in GHz (direct detuning) or
/// flux quanta (cosine flux map).
struct FlatTopPulse {
  double amplitude = 0.0;
  double t0 = 0.0;
  double tau = 150.0;
  double sigma = 50.0;

  void validate() const;
  /// Latest time with non-negligible envelope (t0 + tau + 4 sigma).
  double end() const { return t0 + tau + 4.0 * sigma; }
  double start() const { return t0 - 4.0 * sigma; }
};

double pulse_envelope(const FlatTopPulse& p, double t);
/// Integral of the envelope over [a, b] (closed form).
double pulse_envelope_integral(const FlatTopPulse& p, double a, double b);

struct FluxMap {
  enum class Kind { direct_detuning, cosine_flux };
  Kind kind = Kind::direct_detuning;
  /// cosine_flux: omega(phi) = omega_max * sqrt(|cos(pi * phi)|).
  double omega_max_ghz = 7.0;
};

struct PulseSchedule {
  std::map<Site, std::vector<FlatTopPulse>> channels;
  /// Virtual-Z phases (radians) for Q1, Q2, Q3 applied after the pulses.
  std::array<double, 3> virtual_z{0.0, 0.0, 0.0};
  double total_time = 0.0;
  FluxMap flux_map;

  void validate() const;
  double envelope_sum(Site coupler, double t) const;
  bool empty() const;

  /// Pulses of `other` shifted by `total_time`; virtual-Z phases add.
  PulseSchedule then(const PulseSchedule& other) const;
};

/// A window of length `window` with one flat-top pulse per listed coupler:
/// sigma = edge_fraction * window, 4 sigma of padding on each side, so the
/// envelope has decayed at both window ends.
PulseSchedule segment_schedule(double window, const std::map<Site, double>& amplitudes, double edge_fraction = 1.0 / 12.0);

/// Instantaneous coupler frequency in GHz.
double coupler_frequency(const PulseSchedule& schedule, const DeviceModel& device, Site site, double t);

/// Flux offset that reproduces the idle frequency under the cosine map.
double idle_flux(const FluxMap& map, double idle_ghz);

std::string schedule_to_json(const PulseSchedule& s);
PulseSchedule schedule_from_json(const std::string& text);

}  // namespace ccz
