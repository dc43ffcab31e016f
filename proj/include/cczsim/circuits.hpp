#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cczsim/calibration.hpp"

namespace ccz {

enum class GateKind { H, X, T, Tdg, Rz, CZ, CNOT, CCZ_direct, CCZ_decomposed, Toffoli };
enum class CircuitMode { ideal, pulse, lindblad };

CircuitMode parse_circuit_mode(const std::string& s);

struct Gate {
  GateKind kind = GateKind::H;
  /// 0-based qubits; for CNOT the control comes first.
  std::vector<int> targets;
  double theta = 0.0;

  static Gate h(int q) { return {GateKind::H, {q}}; }
  static Gate x(int q) { return {GateKind::X, {q}}; }
  static Gate t(int q) { return {GateKind::T, {q}}; }
  static Gate tdg(int q) { return {GateKind::Tdg, {q}}; }
  static Gate rz(int q, double theta) { return {GateKind::Rz, {q}, theta}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, {a, b}}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}}; }
  static Gate ccz_direct() { return {GateKind::CCZ_direct, {0, 1, 2}}; }
  static Gate ccz_decomposed() { return {GateKind::CCZ_decomposed, {0, 1, 2}}; }
  /// Target q2, controls q1 and q3.
  static Gate toffoli() { return {GateKind::Toffoli, {0, 1, 2}}; }

  void validate() const;
  Mat8 ideal_unitary() const;
};

struct Circuit {
  std::vector<Gate> gates;

  Circuit& add(const Gate& g);
  Mat8 ideal_unitary() const;
  int count(GateKind kind) const;
  /// Requires every two-qubit gate to act on (q1, q2) or (q2, q3).
  bool nearest_neighbor() const;
};

/// Eight nearest-neighbor CNOTs and seven T / T^dag gates.
Circuit decomposed_ccz();
/// H on q2, CCZ, H on q2.
Gate toffoli();

/// Calibrated schedules used by the pulse and lindblad modes. Missing
/// entries raise UncalibratedGate when a circuit needs them.
struct PulseLibrary {
  std::optional<PulseSchedule> ccz;
  std::optional<PulseSchedule> cz12;
  std::optional<PulseSchedule> cz23;

  const PulseSchedule& schedule_for(const Gate& g) const;
};

/// Single-coupler CZ on a pair with virtual-Z correction (80 ns window by default).
PulseSchedule calibrate_cz(const GateSimulator& sim, QubitPair pair, double window = 80.0,
                           const CphaseOptions& base = {});
/// Widened CZ search: windows grow up to 400 ns and the closest pulse is kept
/// when pi stays out of reach.
CphaseOptions relaxed_cz_options();
/// Direct CCZ composite plus both CZs.
PulseLibrary build_pulse_library(const GateSimulator& sim, const CczGate& gate, double cz_window = 80.0,
                                 const CphaseOptions& cz_base = {});

/// Sequence of primitive gates that run_circuit applies (composites expanded).
std::vector<Gate> expand(const Circuit& circuit);
/// Sum of schedule lengths; single-qubit gates take no time.
double circuit_duration(const Circuit& circuit, const PulseLibrary& lib);

struct CircuitResult {
  /// Computational-subspace state, renormalized.
  Mat8 rho = Mat8::Zero();
  /// Full-space state (pulse mode) or density matrix (lindblad mode).
  CVec psi;
  CMat rho_full;
  /// Population outside the computational subspace after each primitive gate.
  std::vector<double> leakage;
  double duration_ns = 0.0;
};

/// Ideal mode works without a simulator; other modes need both pointers.
CircuitResult run_circuit(const Circuit& circuit, CircuitMode mode, const Vec8& initial,
                          const GateSimulator* sim = nullptr, const PulseLibrary* lib = nullptr);

enum class CczImpl { direct, decomposed };

/// Cumulative leakage after 0..n_layers applications to |111>; entry 0 is 0.
std::vector<double> multilayer_leakage(const GateSimulator& sim, const PulseLibrary& lib, CczImpl impl, int n_layers,
                                       CircuitMode mode = CircuitMode::lindblad);

/// Oracle flipping the sign of |target>, built as X-conjugated CCZ.
Circuit grover_oracle(const std::string& target, GateKind ccz = GateKind::CCZ_direct);
Circuit grover_circuit(const std::string& target, int iterations, GateKind ccz = GateKind::CCZ_direct);
/// Outcome distribution over |000>..|111>.
RVec grover(const std::string& target, int iterations, CircuitMode mode, const GateSimulator* sim = nullptr,
            const PulseLibrary* lib = nullptr);
/// round((pi / 4) sqrt(N)).
int optimal_grover_iterations(int n_items);

/// 1 - (1 - p_gate / p_ref)(1 - 1/d).
double rb_fidelity(double p_ref, double p_gate, int d);

struct RbFit {
  double a = 0.0;
  double p = 0.0;
  double b = 0.0;
};

/// Least-squares fit of A p^m + B starting from A = B = 0.5, p = 0.99.
RbFit fit_rb_decay(const std::vector<double>& depths, const std::vector<double>& survival);

}  // namespace ccz
