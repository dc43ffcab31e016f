#include "cczsim/gate.hpp"

#include <algorithm>
#include <cmath>

#include "cczsim/couplings.hpp"

namespace ccz {

SimOptions gate_sim_options() {
  SimOptions o;
  o.frame = Frame::rwa;
  o.max_excitations = 3;
  o.picture = SimOptions::Picture::dressed;
  return o;
}

GateSimulator idle_gate_simulator(const DeviceModel& device, const NoiseSpec& noise, SimOptions opts) {
  ExactOptions eo;
  eo.frame = opts.frame;
  const IdlePoint idle = find_idle_point(device, eo);
  return GateSimulator(device.with_couplers(idle.omega_c1_ghz, idle.omega_c2_ghz), opts, noise);
}

GateSimulator::GateSimulator(DeviceModel device, SimOptions opts, NoiseSpec noise)
    : evolver_(std::move(device), opts), noise_(std::move(noise)) {
  noise_.validate();
  comp_ = evolver_.space().computational_indices();
  for (long idx : comp_)
    if (idx < 0) throw InvalidDimension("computational states are outside the simulated space");
  for (int q = 0; q < 3; ++q) n_q_[q] = number_diagonal(evolver_.space(), qubit_site(q));
}

CVec GateSimulator::embed(const Vec8& v) const {
  CVec out = CVec::Zero(dim());
  for (int k = 0; k < 8; ++k) out(comp_[k]) = v(k);
  return out;
}

CMat GateSimulator::embed(const Mat8& rho) const {
  CMat out = CMat::Zero(dim(), dim());
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) out(comp_[r], comp_[c]) = rho(r, c);
  return out;
}

Vec8 GateSimulator::project(const CVec& psi) const {
  Vec8 out;
  for (int k = 0; k < 8; ++k) out(k) = psi(comp_[k]);
  return out;
}

Mat8 GateSimulator::project_rho(const CMat& rho) const {
  Mat8 out;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) out(r, c) = rho(comp_[r], comp_[c]);
  return out;
}

CVec GateSimulator::product_state(const std::array<Eigen::Vector2cd, 3>& qubits) const {
  Vec8 v;
  for (int k = 0; k < 8; ++k) v(k) = qubits[0]((k >> 2) & 1) * qubits[1]((k >> 1) & 1) * qubits[2](k & 1);
  return embed(v);
}

CMat GateSimulator::run_pure(const PulseSchedule& schedule, const CMat& states) const {
  if (states.rows() != static_cast<Eigen::Index>(dim()))
    throw DimensionMismatch("state dimension does not match the simulated space");
  CMat out = schedule.empty() ? states : evolver_.evolve_dressed_frame(schedule, states, schedule.total_time);
  return apply_virtual_z(out, schedule.virtual_z);
}

CMat GateSimulator::run_lindblad(const PulseSchedule& schedule, const CMat& rho) const {
  const CMat& w = evolver_.dressed_basis();
  const RVec& e = evolver_.dressed_energies();
  const CMat rho_bare = w * rho * w.adjoint();
  CMat out = evolver_.evolve_lindblad(schedule, noise_, rho_bare, schedule.total_time).rho;
  out = w.adjoint() * out * w;
  CVec r(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) r(i) = std::polar(1.0, e(i) * schedule.total_time * 1e-3);
  out = r.asDiagonal() * out * r.conjugate().asDiagonal();
  return apply_virtual_z_rho(out, schedule.virtual_z);
}

CMat GateSimulator::logical_columns(const PulseSchedule& schedule) const {
  CMat cols = CMat::Zero(dim(), 8);
  for (int k = 0; k < 8; ++k) cols(comp_[k], k) = 1.0;
  return run_pure(schedule, cols);
}

CMat GateSimulator::apply_virtual_z(const CMat& states, const std::array<double, 3>& theta) const {
  if (theta[0] == 0.0 && theta[1] == 0.0 && theta[2] == 0.0) return states;
  const RVec phi = theta[0] * n_q_[0] + theta[1] * n_q_[1] + theta[2] * n_q_[2];
  CVec p(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) p(i) = std::polar(1.0, phi(i));
  return p.asDiagonal() * states;
}

CMat GateSimulator::apply_virtual_z_rho(const CMat& rho, const std::array<double, 3>& theta) const {
  if (theta[0] == 0.0 && theta[1] == 0.0 && theta[2] == 0.0) return rho;
  const RVec phi = theta[0] * n_q_[0] + theta[1] * n_q_[1] + theta[2] * n_q_[2];
  CVec p(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) p(i) = std::polar(1.0, phi(i));
  return p.asDiagonal() * rho * p.conjugate().asDiagonal();
}

SpMat GateSimulator::single_qubit_operator(int qubit, const Mat2& u) const {
  if (qubit < 0 || qubit > 2) throw InvalidArgument("qubit index must be 0, 1 or 2");
  const auto& space = evolver_.space();
  const int s = site_index(qubit_site(qubit));
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const Occupation& occ = space.state(i);
    const int a = occ[s];
    Occupation flipped = occ;
    flipped[s] = 1 - a;
    const long j = a <= 1 ? space.index_of(flipped) : -1;
    if (j < 0) {
      // level 2, or partner outside the truncated space
      trips.emplace_back(i, i, 1.0);
      continue;
    }
    trips.emplace_back(i, i, u(a, a));
    trips.emplace_back(j, i, u(1 - a, a));
  }
  SpMat op(space.dim(), space.dim());
  op.setFromTriplets(trips.begin(), trips.end());
  return op;
}

double GateSimulator::leakage(const CVec& psi) const {
  double p = 0.0;
  for (long k : comp_) p += std::norm(psi(k));
  return std::clamp(psi.squaredNorm() - p, 0.0, 1.0);
}

double GateSimulator::leakage_rho(const CMat& rho) const {
  double p = 0.0;
  for (long k : comp_) p += rho(k, k).real();
  return std::clamp(rho.trace().real() - p, 0.0, 1.0);
}

Mat2 reduced_qubit(const GateSimulator& sim, const CVec& psi, int qubit) {
  return reduced_qubit_rho(sim, psi * psi.adjoint(), qubit);
}

Mat2 reduced_qubit_rho(const GateSimulator& sim, const CMat& rho, int qubit) {
  const auto& space = sim.evolver().space();
  const int s = site_index(qubit_site(qubit));
  Mat2 out = Mat2::Zero();
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const Occupation& occ = space.state(i);
    if (occ[s] != 0) continue;
    Occupation up = occ;
    up[s] = 1;
    const long j = space.index_of(up);
    out(0, 0) += rho(i, i);
    if (j < 0) continue;
    out(1, 1) += rho(j, j);
    out(0, 1) += rho(i, j);
    out(1, 0) += rho(j, i);
  }
  return out;
}

Mat2 reduced_qubit(const Vec8& psi, int qubit) {
  const int shift = 2 - qubit;
  Mat2 out = Mat2::Zero();
  for (int k = 0; k < 8; ++k) {
    if ((k >> shift) & 1) continue;
    const int j = k | (1 << shift);
    out(0, 0) += std::norm(psi(k));
    out(1, 1) += std::norm(psi(j));
    out(0, 1) += psi(k) * std::conj(psi(j));
    out(1, 0) += psi(j) * std::conj(psi(k));
  }
  return out;
}

namespace gates {

Mat2 x() { return (Mat2() << 0, 1, 1, 0).finished(); }
Mat2 y() { return (Mat2() << 0, cplx(0, -1), cplx(0, 1), 0).finished(); }
Mat2 z() { return (Mat2() << 1, 0, 0, -1).finished(); }
Mat2 h() { return (Mat2() << 1, 1, 1, -1).finished() / std::sqrt(2.0); }
Mat2 t() { return (Mat2() << 1, 0, 0, std::polar(1.0, kPi / 4)).finished(); }
Mat2 tdg() { return (Mat2() << 1, 0, 0, std::polar(1.0, -kPi / 4)).finished(); }
Mat2 rx(double th) {
  return (Mat2() << std::cos(th / 2), cplx(0, -std::sin(th / 2)), cplx(0, -std::sin(th / 2)), std::cos(th / 2))
      .finished();
}
Mat2 ry(double th) { return (Mat2() << std::cos(th / 2), -std::sin(th / 2), std::sin(th / 2), std::cos(th / 2)).finished(); }
Mat2 rz(double th) { return (Mat2() << std::polar(1.0, -th / 2), 0, 0, std::polar(1.0, th / 2)).finished(); }

}  // namespace gates

Mat8 embed_1q(const Mat2& u, int qubit) {
  if (qubit < 0 || qubit > 2) throw InvalidArgument("qubit index must be 0, 1 or 2");
  const int shift = 2 - qubit;
  Mat8 out = Mat8::Zero();
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) {
      if ((r & ~(1 << shift)) != (c & ~(1 << shift))) continue;
      out(r, c) = u((r >> shift) & 1, (c >> shift) & 1);
    }
  return out;
}

Mat8 ccz_ideal() {
  Mat8 u = Mat8::Identity();
  u(7, 7) = -1.0;
  return u;
}

Mat8 cphase_ideal(int qa, int qb, double theta) {
  if (qa == qb || qa < 0 || qb < 0 || qa > 2 || qb > 2) throw InvalidArgument("cphase needs two distinct qubits");
  Mat8 u = Mat8::Identity();
  for (int k = 0; k < 8; ++k)
    if (((k >> (2 - qa)) & 1) && ((k >> (2 - qb)) & 1)) u(k, k) = std::polar(1.0, theta);
  return u;
}

}  // namespace ccz
