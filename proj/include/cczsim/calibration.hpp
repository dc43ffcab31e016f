#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cczsim/gate.hpp"

namespace ccz {

/// Conditional phases in radians, each reduced to (-pi, pi].
struct PhaseSet {
  double phi12 = 0.0;
  double phi23 = 0.0;
  double phi13 = 0.0;
  double phi123 = 0.0;
  /// phi123 - phi12 - phi23 - phi13, reduced.
  double phi_ccz = 0.0;

  static PhaseSet from_components(double phi12, double phi23, double phi13, double phi123);
};

/// Probe product states used for conditional-phase measurement, in order
/// |0+0>, |1+0>, |0+1>, |1+1>, |00+>, |10+>.
std::array<Vec8, 6> phase_probe_states();

/// Phase of a qubit's reduced state, atan2(<Y>, <X>). Throws SignalLoss when
/// the reduced purity is below 0.1.
double qubit_phase(const Mat2& reduced);

/// Conditional phases of an 8x8 evolution applied to the probe states.
PhaseSet conditional_phases(const Mat8& evolution);
/// Conditional phases from evolved computational columns (dim x 8).
PhaseSet conditional_phases(const GateSimulator& sim, const CMat& columns);
PhaseSet measure_conditional_phases(const GateSimulator& sim, const PulseSchedule& schedule,
                                    SimMode mode = SimMode::ideal);

/// 1 - P(|111> -> |111>) with couplers in ground.
double measure_leakage(const GateSimulator& sim, const PulseSchedule& schedule, SimMode mode = SimMode::ideal);

struct OperatingPoint {
  double amp_c1 = 0.0;
  double amp_c2 = 0.0;
  double tau = 150.0;
  double leakage = 1.0;
  PhaseSet phases;
  /// Distance of |phi_ccz| from pi (radians).
  double score = kPi;
};

/// First CCZ segment: both couplers pulsed inside one window.
PulseSchedule ccz_segment(double amp_c1, double amp_c2, double window = 150.0);
OperatingPoint evaluate_operating_point(const GateSimulator& sim, double amp_c1, double amp_c2,
                                        double window = 150.0);

struct SweepOptions {
  double window = 150.0;
  double phase_tol = 0.05;
  int jobs = 1;
  /// Polish the best grid point with a local search before selection.
  bool refine = true;
  /// With no feasible point, select the nearest miss instead of throwing.
  bool allow_nearest_miss = false;
};

struct SweepResult {
  std::vector<OperatingPoint> points;
  /// Feasible points, best first.
  std::vector<OperatingPoint> candidates;
  OperatingPoint selected;
  /// False when `selected` is a nearest miss (allow_nearest_miss only).
  bool feasible = true;
};

/// True when `a` precedes `b` in the (leakage, |phi13|) order.
bool better_operating_point(const OperatingPoint& a, const OperatingPoint& b);

SweepResult sweep_operating_point(const GateSimulator& sim, const std::vector<double>& amps_c1,
                                  const std::vector<double>& amps_c2, const SweepOptions& opts = {});
/// Applies the feasibility filter and selection to evaluated points.
std::vector<OperatingPoint> select_candidates(const std::vector<OperatingPoint>& points, double phase_tol);
/// Rough infidelity proxy used to rank infeasible points: leakage plus the
/// squared phi_ccz and phi13 errors over 8.
double miss_cost(const OperatingPoint& p);

std::string sweep_to_csv(const std::vector<OperatingPoint>& points);

enum class QubitPair { q12, q23 };

struct CphaseOptions {
  double window = 0.0;  // 0 selects 62 ns for (1,2) and 44 ns for (2,3)
  double phase_tol = 0.01;
  double max_leakage = 0.01;
  double amp_min = -3.0;
  int scan_points = 121;
  /// When the target is unreachable, retry with windows 25% longer up to this length.
  double max_window = 0.0;
  /// Return the closest scanned pulse instead of throwing.
  bool best_effort = false;
};

/// Single-coupler pulse whose pair conditional phase equals the target.
PulseSchedule calibrate_cphase(const GateSimulator& sim, QubitPair pair, double target_phase,
                               const CphaseOptions& opts = {});
double pair_phase(const PhaseSet& p, QubitPair pair);

struct CczGate {
  OperatingPoint operating_point;
  PulseSchedule segment1;
  PulseSchedule cphase12;
  PulseSchedule cphase23;
  std::array<double, 3> virtual_z{0.0, 0.0, 0.0};

  /// All segments in sequence with the virtual-Z phases applied at the end.
  PulseSchedule composite() const;
  double total_ns() const;
};

std::string gate_to_json(const CczGate& gate);
CczGate gate_from_json(const std::string& text);

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes f with coefficients reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5; stops when the simplex diameter falls below `tol`.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             double step, double tol = 1e-4, int max_iter = 200);

enum class VzObjective { process_fidelity, phase_residual };

struct VirtualZResult {
  std::array<double, 3> theta{0.0, 0.0, 0.0};
  /// Process fidelity, or the phase residual in radians^2.
  double objective = 0.0;
  int iterations = 0;
};

/// Single-qubit phases of |+> on each qubit (others in |0>) after an evolution.
std::array<double, 3> ramsey_phases(const Mat8& evolution);
/// Process fidelity |Tr(U^dag M)|^2 / 64 of a computational block against an ideal unitary.
double unitary_process_fidelity(const Mat8& block, const Mat8& ideal);
Mat8 apply_virtual_z(const Mat8& block, const std::array<double, 3>& theta);
/// Computational rows of evolved logical columns.
Mat8 computational_block(const GateSimulator& sim, const CMat& columns);

/// Optimizes virtual-Z phases for a fixed computational-block evolution
/// against `ideal` (the CCZ unless stated).
VirtualZResult optimize_virtual_z(const Mat8& block, VzObjective objective = VzObjective::process_fidelity,
                                  const Mat8& ideal = ccz_ideal());
VirtualZResult optimize_virtual_z(const GateSimulator& sim, const CczGate& gate,
                                  VzObjective objective = VzObjective::process_fidelity);

struct AssembleOptions {
  std::vector<double> amps_c1;
  std::vector<double> amps_c2;
  SweepOptions sweep;
  double window12 = 62.0;
  double window23 = 44.0;
  /// Base settings for both compensation pulses (the window is set per pair).
  CphaseOptions cphase;
  VzObjective objective = VzObjective::process_fidelity;
};

/// Default amplitude grid around the |111> <-> |102> resonance.
AssembleOptions default_assemble_options();

struct AssembleReport {
  CczGate gate;
  SweepResult sweep;
  PhaseSet composite_phases;
  double process_fidelity = 0.0;
};

AssembleReport assemble_ccz(const GateSimulator& sim, const AssembleOptions& opts = default_assemble_options());

}  // namespace ccz
