#pragma once

#include <array>

#include "cczsim/evolution.hpp"

namespace ccz {

enum class SimMode { ideal, lindblad };

using Mat2 = Eigen::Matrix2cd;

/// Options used for gate-level simulation: RWA coupling with at most three
/// excitations, dressed interaction picture, dt = 0.01 ns.
SimOptions gate_sim_options();

/// Runs pulse schedules on the device and reports results in the dressed
/// computational frame: states are expressed in the idle eigenbasis (labelled
/// by their bare partners) and rotate with the idle Hamiltonian, so an empty
/// schedule acts as the identity.
class GateSimulator {
 public:
  explicit GateSimulator(DeviceModel device, SimOptions opts = gate_sim_options(),
                         NoiseSpec noise = NoiseSpec::reference());

  const Evolver& evolver() const { return evolver_; }
  const DeviceModel& device() const { return evolver_.device(); }
  const NoiseSpec& noise() const { return noise_; }
  std::size_t dim() const { return evolver_.space().dim(); }
  /// Label indices of |000>, ..., |111> (q1 slowest).
  const std::array<long, 8>& computational() const { return comp_; }

  CVec embed(const Vec8& v) const;
  CMat embed(const Mat8& rho) const;
  Vec8 project(const CVec& psi) const;
  Mat8 project_rho(const CMat& rho) const;
  CVec product_state(const std::array<Eigen::Vector2cd, 3>& qubits) const;

  /// Pulses followed by the schedule's virtual-Z phases.
  CMat run_pure(const PulseSchedule& schedule, const CMat& states) const;
  CMat run_lindblad(const PulseSchedule& schedule, const CMat& rho) const;
  /// Evolved computational basis states as columns (dim x 8).
  CMat logical_columns(const PulseSchedule& schedule) const;

  /// exp(i sum_q theta_q n_q) on the qubit labels.
  CMat apply_virtual_z(const CMat& states, const std::array<double, 3>& theta) const;
  CMat apply_virtual_z_rho(const CMat& rho, const std::array<double, 3>& theta) const;
  /// Ideal single-qubit unitary on levels {0, 1} of one qubit (0-based), identity on |2>.
  SpMat single_qubit_operator(int qubit, const Mat2& u) const;

  /// Population outside the computational subspace (couplers in ground).
  double leakage(const CVec& psi) const;
  double leakage_rho(const CMat& rho) const;

 private:
  Evolver evolver_;
  NoiseSpec noise_;
  std::array<long, 8> comp_;
  RVec n_q_[3];
};

/// Simulator with both couplers moved to the zero-ZZ idle point of the
/// simulation frame (found by exact diagonalization).
GateSimulator idle_gate_simulator(const DeviceModel& device, const NoiseSpec& noise = NoiseSpec::reference(),
                                  SimOptions opts = gate_sim_options());

/// Reduced state of one qubit's {0, 1} levels (unnormalized when leaked).
Mat2 reduced_qubit(const GateSimulator& sim, const CVec& psi, int qubit);
Mat2 reduced_qubit_rho(const GateSimulator& sim, const CMat& rho, int qubit);
Mat2 reduced_qubit(const Vec8& psi, int qubit);

namespace gates {
Mat2 x();
Mat2 y();
Mat2 z();
Mat2 h();
Mat2 t();
Mat2 tdg();
Mat2 rx(double theta);
Mat2 ry(double theta);
Mat2 rz(double theta);
}  // namespace gates

/// Kronecker embedding of a single-qubit gate into the 8-dim register.
Mat8 embed_1q(const Mat2& u, int qubit);
Mat8 ccz_ideal();
/// diag(1, 1, 1, e^{i theta}) on the pair, identity on the third qubit.
Mat8 cphase_ideal(int qa, int qb, double theta);

}  // namespace ccz
