#pragma once

#include <string>
#include <vector>

#include "cczsim/device.hpp"
#include "cczsim/hamiltonian.hpp"

namespace ccz {

enum class ZetaMethod { order2, order3, order4, perturbative_sum, exact };

std::string to_string(ZetaMethod m);

/// Effective diagonal couplings at one coupler-frequency point (MHz).
struct CouplingReport {
  double omega_c1_ghz = 0.0;
  double omega_c2_ghz = 0.0;
  double zeta12 = 0.0;
  double zeta23 = 0.0;
  double zeta13 = 0.0;
  double zeta123_total = 0.0;
  double zeta_zzz_irreducible = 0.0;
  ZetaMethod method = ZetaMethod::order2;
  /// Empty for a valid point; otherwise the reason the point could not be evaluated.
  std::string flag;

  bool flagged() const { return !flag.empty(); }
};

/// Which anharmonicity enters the second term of the fourth-order (2,3) pair
/// correction. `as_printed` uses alpha_3; `lower_qubit` uses alpha_2, by analogy
/// with the (1,2) term.
enum class Order4Variant { as_printed, lower_qubit };

CouplingReport zeta_order2(const DeviceModel& device);
CouplingReport zeta_order3(const DeviceModel& device);
CouplingReport zeta_order4(const DeviceModel& device, Order4Variant variant = Order4Variant::as_printed);
CouplingReport zeta_perturbative(const DeviceModel& device, double omega_c1_ghz, double omega_c2_ghz,
                                 Order4Variant variant = Order4Variant::as_printed);

struct ExactOptions {
  Frame frame = Frame::full;
  double overlap_floor = 0.5;
};

CouplingReport zeta_exact(const DeviceModel& device, double omega_c1_ghz, double omega_c2_ghz,
                          const ExactOptions& opts = {});

struct CouplerGrid {
  std::vector<double> omega_c1_ghz;
  std::vector<double> omega_c2_ghz;

  std::size_t size() const { return omega_c1_ghz.size() * omega_c2_ghz.size(); }
  /// n evenly spaced values in [lo, hi] (n == 1 gives lo).
  static std::vector<double> linspace(double lo, double hi, std::size_t n);
};

enum class SweepMethod { exact, perturbative };

/// One report per grid point, c1 slowest. Unevaluable points are flagged.
std::vector<CouplingReport> sweep_couplings(const DeviceModel& device, const CouplerGrid& grid, SweepMethod method,
                                            const ExactOptions& opts = {}, int jobs = 1);

std::string sweep_to_csv(const std::vector<CouplingReport>& reports);

enum class ZetaComponent { z12, z23, z13, z123_total };

struct ContourSegment {
  double c1_a, c2_a;
  double c1_b, c2_b;
};

/// Zero set of a scalar map sampled on a rectangular grid (values indexed c1-major).
std::vector<ContourSegment> zero_contour(const std::vector<double>& c1, const std::vector<double>& c2,
                                         const std::vector<double>& values);
std::vector<ContourSegment> zero_contour(const CouplerGrid& grid, const std::vector<CouplingReport>& sweep,
                                         ZetaComponent which);

struct IdlePoint {
  double omega_c1_ghz;
  double omega_c2_ghz;
  CouplingReport report;
};

/// Coupler frequencies where the exact zeta12 and zeta23 vanish, searched
/// above the qubit band within [lo, hi] GHz.
IdlePoint find_idle_point(const DeviceModel& device, const ExactOptions& opts = {}, double lo_ghz = 5.6,
                          double hi_ghz = 9.0);

}  // namespace ccz
