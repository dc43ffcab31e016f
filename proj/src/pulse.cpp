#include "cczsim/pulse.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace ccz {

void FlatTopPulse::validate() const {
  if (!(sigma > 0)) throw InvalidArgument("pulse sigma must be positive");
  if (!(tau > 0)) throw InvalidArgument("pulse duration must be positive");
}

double pulse_envelope(const FlatTopPulse& p, double t) {
  const double s = std::sqrt(2.0) * p.sigma;
  return 0.5 * p.amplitude * (std::erf((p.t0 + p.tau - t) / s) - std::erf((p.t0 - t) / s));
}

namespace {

// Antiderivative in t of erf((c - t)/s).
double erf_antiderivative(double c, double s, double t) {
  const double u = (c - t) / s;
  return -s * (u * std::erf(u) + std::exp(-u * u) / std::sqrt(kPi));
}

}  // namespace

double pulse_envelope_integral(const FlatTopPulse& p, double a, double b) {
  const double s = std::sqrt(2.0) * p.sigma;
  const double hi = erf_antiderivative(p.t0 + p.tau, s, b) - erf_antiderivative(p.t0 + p.tau, s, a);
  const double lo = erf_antiderivative(p.t0, s, b) - erf_antiderivative(p.t0, s, a);
  return 0.5 * p.amplitude * (hi - lo);
}

void PulseSchedule::validate() const {
  double latest = 0.0;
  for (const auto& [site, pulses] : channels) {
    if (!is_coupler(site)) throw InvalidArgument("pulse channel " + site_name(site) + " is not a coupler");
    auto sorted = pulses;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.t0 < b.t0; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      sorted[i].validate();
      if (i + 1 < sorted.size() && sorted[i].end() > sorted[i + 1].start() + 1e-9)
        throw InvalidArgument("overlapping pulses on " + site_name(site));
      latest = std::max(latest, sorted[i].end());
    }
  }
  if (total_time + 1e-9 < latest) throw InvalidArgument("schedule total_time shorter than pulse support");
}

double PulseSchedule::envelope_sum(Site coupler, double t) const {
  auto it = channels.find(coupler);
  if (it == channels.end()) return 0.0;
  double v = 0.0;
  for (const auto& p : it->second) v += pulse_envelope(p, t);
  return v;
}

bool PulseSchedule::empty() const {
  for (const auto& [site, pulses] : channels)
    for (const auto& p : pulses)
      if (p.amplitude != 0.0) return false;
  return true;
}

PulseSchedule PulseSchedule::then(const PulseSchedule& other) const {
  PulseSchedule out = *this;
  for (const auto& [site, pulses] : other.channels) {
    for (auto p : pulses) {
      p.t0 += total_time;
      out.channels[site].push_back(p);
    }
  }
  for (int q = 0; q < 3; ++q) out.virtual_z[q] += other.virtual_z[q];
  out.total_time = total_time + other.total_time;
  return out;
}

PulseSchedule segment_schedule(double window, const std::map<Site, double>& amplitudes, double edge_fraction) {
  if (!(window > 0)) throw InvalidArgument("segment window must be positive");
  if (!(edge_fraction > 0 && edge_fraction < 0.125)) throw InvalidArgument("edge fraction must be in (0, 1/8)");
  PulseSchedule s;
  s.total_time = window;
  const double sigma = window * edge_fraction;
  for (const auto& [site, amp] : amplitudes) {
    if (!is_coupler(site)) throw InvalidArgument(site_name(site) + " is not a coupler");
    s.channels[site].push_back(FlatTopPulse{amp, 4.0 * sigma, window - 8.0 * sigma, sigma});
  }
  return s;
}

double idle_flux(const FluxMap& map, double idle_ghz) {
  const double r = idle_ghz / map.omega_max_ghz;
  if (r <= 0.0 || r > 1.0) throw InvalidArgument("idle frequency outside the cosine flux map range");
  return std::acos(r * r) / kPi;
}

double coupler_frequency(const PulseSchedule& schedule, const DeviceModel& device, Site site, double t) {
  if (!is_coupler(site)) throw InvalidArgument(site_name(site) + " is not a coupler");
  const double idle = device.transmon(site).frequency_ghz;
  const double env = schedule.envelope_sum(site, t);
  if (schedule.flux_map.kind == FluxMap::Kind::direct_detuning) return idle + env;
  const double phi = idle_flux(schedule.flux_map, idle) + env;
  return schedule.flux_map.omega_max_ghz * std::sqrt(std::abs(std::cos(kPi * phi)));
}

using nlohmann::json;

std::string schedule_to_json(const PulseSchedule& s) {
  json j;
  j["total_time_ns"] = s.total_time;
  j["virtual_z"] = s.virtual_z;
  j["flux_map"] = {{"kind", s.flux_map.kind == FluxMap::Kind::direct_detuning ? "direct_detuning" : "cosine_flux"},
                   {"omega_max_ghz", s.flux_map.omega_max_ghz}};
  j["channels"] = json::object();
  for (const auto& [site, pulses] : s.channels) {
    json arr = json::array();
    for (const auto& p : pulses)
      arr.push_back({{"amplitude", p.amplitude}, {"t0", p.t0}, {"tau", p.tau}, {"sigma", p.sigma}});
    j["channels"][site_name(site)] = arr;
  }
  return j.dump(2);
}

PulseSchedule schedule_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    PulseSchedule s;
    s.total_time = j.at("total_time_ns").get<double>();
    if (j.contains("virtual_z")) s.virtual_z = j["virtual_z"].get<std::array<double, 3>>();
    if (j.contains("flux_map")) {
      const auto& f = j["flux_map"];
      const auto kind = f.value("kind", std::string("direct_detuning"));
      if (kind == "direct_detuning") {
        s.flux_map.kind = FluxMap::Kind::direct_detuning;
      } else if (kind == "cosine_flux") {
        s.flux_map.kind = FluxMap::Kind::cosine_flux;
      } else {
        throw ConfigError("unknown flux map '" + kind + "'");
      }
      s.flux_map.omega_max_ghz = f.value("omega_max_ghz", s.flux_map.omega_max_ghz);
    }
    if (j.contains("channels")) {
      for (auto it = j["channels"].begin(); it != j["channels"].end(); ++it) {
        auto& list = s.channels[parse_site(it.key())];
        for (const auto& p : it.value())
          list.push_back({p.at("amplitude").get<double>(), p.at("t0").get<double>(), p.at("tau").get<double>(),
                          p.at("sigma").get<double>()});
      }
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid schedule: ") + e.what());
  }
}

}  // namespace ccz
