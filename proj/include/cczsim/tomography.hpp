#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cczsim/gate.hpp"

namespace ccz {

enum class ProbeKind { probe64, probe216 };

struct Probe {
  std::string label;  // e.g. "I,X/2,Y/2" (q1 first)
  Vec8 state;
};

/// Product input states built from single-qubit preparations applied to |000>.
/// probe64 uses {I, X, X/2, Y/2}; probe216 adds -X/2 and -Y/2.
struct ProbeSet {
  ProbeKind kind = ProbeKind::probe64;
  std::vector<Probe> probes;

  static ProbeSet make(ProbeKind kind);
  std::size_t size() const { return probes.size(); }
};

/// Computational-subspace state after projecting out couplers and |2> levels.
struct ReducedState {
  Mat8 rho = Mat8::Zero();
  /// Discarded weight before renormalization.
  double leakage = 0.0;
};

/// Projects onto couplers in |0> and qubit levels {0, 1}, then renormalizes.
/// Throws DominanceError when more than half the weight is discarded.
ReducedState reduce_to_computational(const GateSimulator& sim, const CVec& psi);
ReducedState reduce_to_computational(const GateSimulator& sim, const CMat& rho);

/// A quantum process on the 3-qubit register, as seen through reduction.
using Channel = std::function<ReducedState(const Mat8& rho_in)>;

Channel unitary_channel(const Mat8& u);
/// Runs the schedule on the simulator; ideal mode evolves the eight logical
/// columns once and reuses them for every input.
Channel pulse_channel(const GateSimulator& sim, const PulseSchedule& schedule, SimMode mode);
/// Convex mixture p * a + (1 - p) * b.
Channel mix_channels(Channel a, Channel b, double p);

/// Pauli-basis label of index m, lexicographic in (I, X, Y, Z) with q1 slowest.
std::string pauli_label(int m);
/// The 8x8 Pauli string E_m.
Mat8 pauli_string(int m);

struct ChiMatrix {
  CMat entries = CMat::Zero(64, 64);

  double trace() const { return entries.trace().real(); }
  /// Largest eigenvalue divided by the trace.
  double purity_ratio() const;
};

/// Linear-inversion process tomography. Throws RankError if the probe inputs
/// do not span the operator space.
ChiMatrix qpt(const Channel& channel, const ProbeSet& probes);
/// chi_mn = c_m c_n^* with U = sum_m c_m E_m. Throws InvalidArgument if U is not unitary.
ChiMatrix ideal_chi(const Mat8& u);
/// Re Tr(chi_a chi_b).
double process_fidelity(const ChiMatrix& a, const ChiMatrix& b);

std::string chi_to_csv(const ChiMatrix& chi);

struct TruthTable {
  /// Rows are inputs |000>..|111>, columns measured outcomes.
  RMat probs = RMat::Zero(8, 8);
  /// Phase of <k|U|k> relative to <000|U|000>, when available.
  std::vector<double> phases;
  double visibility = 0.0;
};

/// Transfer matrix of the CCZ (identity) and of the Toffoli targeting q2.
RMat ccz_transfer();
RMat toffoli_transfer();

/// Runs all eight computational inputs; visibility = Tr(T_exp T_ideal^T) / 8.
TruthTable truth_table(const Channel& channel, const RMat& ideal_transfer = ccz_transfer());
double truth_table_visibility(const RMat& probs, const RMat& ideal_transfer);
std::string truth_table_to_csv(const TruthTable& table);

/// Mean over probes of <psi_ideal| rho_out |psi_ideal> with psi_ideal = U psi_probe.
double average_state_fidelity(const Channel& channel, const ProbeSet& probes, const Mat8& ideal);

/// Tensor product of per-qubit confusion matrices [[F0, 1-F1], [1-F0, F1]].
RMat readout_matrix(const NoiseSpec& noise);
/// Applies readout errors to an outcome distribution. Throws InvalidArgument
/// unless probs is a probability vector.
RVec readout_channel(const RVec& probs, const NoiseSpec& noise);

/// Multinomial outcome counts for `shots` draws.
std::array<std::int64_t, 8> sample_counts(const RVec& probs, std::int64_t shots, std::mt19937_64& rng);

struct SamplingOptions {
  std::int64_t shots = 1000;
  std::uint64_t seed = 0;
  bool readout_errors = true;
  /// Invert the confusion matrix before reconstruction.
  bool correct_readout = false;
};

/// State tomography from sampled Pauli-basis measurements (27 settings),
/// reconstructed by linear inversion.
Mat8 sampled_state_tomography(const Mat8& rho, const NoiseSpec& noise, const SamplingOptions& opts,
                              std::mt19937_64& rng);
/// Wraps a channel so each output is replaced by its sampled reconstruction.
/// The generator is seeded once, so repeated use is deterministic.
Channel sampled_channel(Channel channel, NoiseSpec noise, SamplingOptions opts);

}  // namespace ccz
