#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cczsim/types.hpp"

namespace ccz {

/// Transmon sites in tensor-product order (Q1 is the slowest index).
enum class Site : int { Q1 = 0, C1 = 1, Q2 = 2, C2 = 3, Q3 = 4 };

inline constexpr int kNumSites = 5;
inline constexpr std::array<Site, 3> kQubits{Site::Q1, Site::Q2, Site::Q3};
inline constexpr std::array<Site, 2> kCouplers{Site::C1, Site::C2};

inline int site_index(Site s) { return static_cast<int>(s); }
std::string site_name(Site s);
Site parse_site(const std::string& name);
bool is_coupler(Site s);
/// Qubit number 0,1,2 for Q1,Q2,Q3.
int qubit_number(Site s);
Site qubit_site(int q);

struct TransmonSpec {
  Site label = Site::Q1;
  double frequency_ghz = 5.0;
  double anharmonicity_mhz = -200.0;
  int levels = 3;
};

struct Coupling {
  Site a;
  Site b;
  double g_mhz;
};

/// Symmetric, self-edge-free coupling graph.
class CouplingGraph {
 public:
  CouplingGraph() = default;
  explicit CouplingGraph(std::vector<Coupling> edges);

  double g(Site a, Site b) const;
  void set(Site a, Site b, double g_mhz);
  const std::vector<Coupling>& edges() const { return edges_; }

 private:
  std::vector<Coupling> edges_;
};

struct NoiseSpec {
  std::map<Site, double> t1_us;
  std::map<Site, double> t2_us;
  std::map<Site, double> readout_f0;
  std::map<Site, double> readout_f1;

  void validate() const;
  static NoiseSpec reference();
  /// Numerically noiseless (T1 = T2 = 1e12 us).
  static NoiseSpec noiseless();
};

/// Immutable description of the three-qubit, two-coupler device.
class DeviceModel {
 public:
  DeviceModel(std::array<TransmonSpec, kNumSites> transmons, CouplingGraph couplings);

  static DeviceModel reference();

  const TransmonSpec& transmon(Site s) const { return transmons_[site_index(s)]; }
  const std::array<TransmonSpec, kNumSites>& transmons() const { return transmons_; }
  const CouplingGraph& couplings() const { return couplings_; }
  std::array<int, kNumSites> levels() const;
  std::size_t hilbert_dim() const { return hilbert_dim_; }

  /// Copy with both coupler frequencies replaced.
  DeviceModel with_couplers(double omega_c1_ghz, double omega_c2_ghz) const;
  DeviceModel with_levels(int levels) const;
  DeviceModel with_coupling(Site a, Site b, double g_mhz) const;
  DeviceModel with_transmon(const TransmonSpec& spec) const;

 private:
  std::array<TransmonSpec, kNumSites> transmons_;
  CouplingGraph couplings_;
  std::size_t hilbert_dim_;
};

/// Device plus noise, as read from a configuration file.
struct DeviceConfig {
  DeviceModel device;
  NoiseSpec noise;
};

DeviceConfig load_device_config(const std::string& path);
DeviceConfig parse_device_config(const std::string& json_text);
std::string device_config_to_json(const DeviceConfig& cfg);

}  // namespace ccz
