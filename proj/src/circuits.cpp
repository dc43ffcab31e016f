#include "cczsim/circuits.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "cczsim/tomography.hpp"

namespace ccz {

CircuitMode parse_circuit_mode(const std::string& s) {
  if (s == "ideal") return CircuitMode::ideal;
  if (s == "pulse") return CircuitMode::pulse;
  if (s == "lindblad") return CircuitMode::lindblad;
  throw InvalidArgument("unknown circuit mode '" + s + "'");
}

namespace {

bool single_qubit(GateKind k) {
  return k == GateKind::H || k == GateKind::X || k == GateKind::T || k == GateKind::Tdg || k == GateKind::Rz;
}

Mat2 single_qubit_matrix(const Gate& g) {
  switch (g.kind) {
    case GateKind::H: return gates::h();
    case GateKind::X: return gates::x();
    case GateKind::T: return gates::t();
    case GateKind::Tdg: return gates::tdg();
    case GateKind::Rz: return gates::rz(g.theta);
    default: throw InvalidArgument("not a single-qubit gate");
  }
}

bool adjacent(int a, int b) { return std::abs(a - b) == 1; }

}  // namespace

void Gate::validate() const {
  std::size_t want = 3;
  if (single_qubit(kind)) want = 1;
  if (kind == GateKind::CZ || kind == GateKind::CNOT) want = 2;
  if (targets.size() != want) throw InvalidArgument("gate has the wrong number of qubits");
  for (int q : targets)
    if (q < 0 || q > 2) throw InvalidArgument("qubit index must be 0, 1 or 2");
  if (want == 2 && targets[0] == targets[1]) throw InvalidArgument("two-qubit gate needs distinct qubits");
}

Mat8 Gate::ideal_unitary() const {
  validate();
  if (single_qubit(kind)) return embed_1q(single_qubit_matrix(*this), targets[0]);
  switch (kind) {
    case GateKind::CZ: return cphase_ideal(targets[0], targets[1], kPi);
    case GateKind::CNOT: {
      const Mat8 h = embed_1q(gates::h(), targets[1]);
      return h * cphase_ideal(targets[0], targets[1], kPi) * h;
    }
    case GateKind::CCZ_direct: return ccz_ideal();
    case GateKind::CCZ_decomposed: return decomposed_ccz().ideal_unitary();
    default: {
      const Mat8 h = embed_1q(gates::h(), 1);
      return h * ccz_ideal() * h;
    }
  }
}

Circuit& Circuit::add(const Gate& g) {
  g.validate();
  gates.push_back(g);
  return *this;
}

Mat8 Circuit::ideal_unitary() const {
  Mat8 u = Mat8::Identity();
  for (const auto& g : gates) u = g.ideal_unitary() * u;
  return u;
}

int Circuit::count(GateKind kind) const {
  return static_cast<int>(std::count_if(gates.begin(), gates.end(), [&](const Gate& g) { return g.kind == kind; }));
}

bool Circuit::nearest_neighbor() const {
  for (const auto& g : gates)
    if ((g.kind == GateKind::CZ || g.kind == GateKind::CNOT) && !adjacent(g.targets[0], g.targets[1])) return false;
  return true;
}

Circuit decomposed_ccz() {
  // Phase polynomial of x1 x2 x3: T on x1, x2, x3 and x1^x2^x3, T^dag on the
  // pairwise parities, each parity visited once on the q1-q2-q3 line.
  Circuit c;
  c.add(Gate::t(0)).add(Gate::t(1)).add(Gate::t(2));
  c.add(Gate::cnot(1, 2)).add(Gate::tdg(2));  // x2^x3
  c.add(Gate::cnot(0, 1)).add(Gate::tdg(1));  // x1^x2
  c.add(Gate::cnot(1, 2)).add(Gate::tdg(2));  // x1^x3
  c.add(Gate::cnot(0, 1));
  c.add(Gate::cnot(1, 2)).add(Gate::t(2));  // x1^x2^x3
  c.add(Gate::cnot(0, 1)).add(Gate::cnot(1, 2)).add(Gate::cnot(0, 1));
  return c;
}

Gate toffoli() { return Gate::toffoli(); }

const PulseSchedule& PulseLibrary::schedule_for(const Gate& g) const {
  const std::optional<PulseSchedule>* slot = nullptr;
  if (g.kind == GateKind::CCZ_direct) {
    slot = &ccz;
  } else if (g.kind == GateKind::CZ) {
    const int lo = std::min(g.targets[0], g.targets[1]);
    const int hi = std::max(g.targets[0], g.targets[1]);
    if (lo == 0 && hi == 1) slot = &cz12;
    if (lo == 1 && hi == 2) slot = &cz23;
    if (!slot) throw UncalibratedGate("no coupler joins q1 and q3");
  } else {
    throw InvalidArgument("gate has no pulse schedule");
  }
  if (!slot->has_value()) throw UncalibratedGate("gate is not calibrated");
  return **slot;
}

PulseSchedule calibrate_cz(const GateSimulator& sim, QubitPair pair, double window, const CphaseOptions& base) {
  CphaseOptions o = base;
  o.window = window;
  PulseSchedule s = calibrate_cphase(sim, pair, kPi, o);
  const Mat8 block = computational_block(sim, sim.logical_columns(s));
  const Mat8 ideal = pair == QubitPair::q12 ? cphase_ideal(0, 1, kPi) : cphase_ideal(1, 2, kPi);
  s.virtual_z = optimize_virtual_z(block, VzObjective::process_fidelity, ideal).theta;
  return s;
}

CphaseOptions relaxed_cz_options() {
  CphaseOptions o;
  o.amp_min = -1.3;
  o.scan_points = 53;
  o.max_leakage = 0.03;
  o.max_window = 400.0;
  o.best_effort = true;
  return o;
}

PulseLibrary build_pulse_library(const GateSimulator& sim, const CczGate& gate, double cz_window,
                                 const CphaseOptions& cz_base) {
  PulseLibrary lib;
  lib.ccz = gate.composite();
  lib.cz12 = calibrate_cz(sim, QubitPair::q12, cz_window, cz_base);
  lib.cz23 = calibrate_cz(sim, QubitPair::q23, cz_window, cz_base);
  return lib;
}

std::vector<Gate> expand(const Circuit& circuit) {
  std::vector<Gate> out;
  for (const auto& g : circuit.gates) {
    switch (g.kind) {
      case GateKind::CNOT:
        out.push_back(Gate::h(g.targets[1]));
        out.push_back(Gate::cz(g.targets[0], g.targets[1]));
        out.push_back(Gate::h(g.targets[1]));
        break;
      case GateKind::CCZ_decomposed: {
        const auto inner = expand(decomposed_ccz());
        out.insert(out.end(), inner.begin(), inner.end());
        break;
      }
      case GateKind::Toffoli:
        out.push_back(Gate::h(1));
        out.push_back(Gate::ccz_direct());
        out.push_back(Gate::h(1));
        break;
      default: out.push_back(g);
    }
  }
  return out;
}

double circuit_duration(const Circuit& circuit, const PulseLibrary& lib) {
  double t = 0.0;
  for (const auto& g : expand(circuit))
    if (!single_qubit(g.kind)) t += lib.schedule_for(g).total_time;
  return t;
}

CircuitResult run_circuit(const Circuit& circuit, CircuitMode mode, const Vec8& initial, const GateSimulator* sim,
                          const PulseLibrary* lib) {
  for (const auto& g : circuit.gates) g.validate();
  CircuitResult r;
  if (mode == CircuitMode::ideal) {
    Vec8 psi = initial;
    for (const auto& g : circuit.gates) {
      psi = g.ideal_unitary() * psi;
      r.leakage.push_back(0.0);
    }
    r.rho = psi * psi.adjoint();
    r.psi = psi;
    return r;
  }
  if (!sim || !lib) throw UncalibratedGate("pulse and lindblad modes need a simulator and a pulse library");

  const auto prims = expand(circuit);
  if (mode == CircuitMode::pulse) {
    CVec psi = sim->embed(initial);
    for (const auto& g : prims) {
      if (single_qubit(g.kind)) {
        psi = sim->single_qubit_operator(g.targets[0], single_qubit_matrix(g)) * psi;
      } else {
        const auto& s = lib->schedule_for(g);
        psi = sim->run_pure(s, psi);
        r.duration_ns += s.total_time;
      }
      r.leakage.push_back(sim->leakage(psi));
    }
    r.psi = psi;
    r.rho = reduce_to_computational(*sim, psi).rho;
    return r;
  }

  CMat rho = sim->embed(Mat8(initial * initial.adjoint()));
  for (const auto& g : prims) {
    if (single_qubit(g.kind)) {
      const SpMat u = sim->single_qubit_operator(g.targets[0], single_qubit_matrix(g));
      rho = u * rho * u.adjoint();
    } else {
      const auto& s = lib->schedule_for(g);
      rho = sim->run_lindblad(s, rho);
      r.duration_ns += s.total_time;
    }
    r.leakage.push_back(sim->leakage_rho(rho));
  }
  r.rho_full = rho;
  r.rho = reduce_to_computational(*sim, rho).rho;
  return r;
}

std::vector<double> multilayer_leakage(const GateSimulator& sim, const PulseLibrary& lib, CczImpl impl, int n_layers,
                                       CircuitMode mode) {
  if (n_layers < 0) throw InvalidArgument("layer count must be non-negative");
  if (mode == CircuitMode::ideal) return std::vector<double>(n_layers + 1, 0.0);
  Circuit layer;
  layer.add(impl == CczImpl::direct ? Gate::ccz_direct() : Gate::ccz_decomposed());
  const auto prims = expand(layer);

  std::vector<double> out{0.0};
  Vec8 init = Vec8::Zero();
  init(7) = 1.0;
  CVec psi = sim.embed(init);
  CMat rho = psi * psi.adjoint();
  for (int n = 1; n <= n_layers; ++n) {
    for (const auto& g : prims) {
      if (single_qubit(g.kind)) {
        const SpMat u = sim.single_qubit_operator(g.targets[0], single_qubit_matrix(g));
        if (mode == CircuitMode::pulse)
          psi = u * psi;
        else
          rho = u * rho * u.adjoint();
      } else if (mode == CircuitMode::pulse) {
        psi = sim.run_pure(lib.schedule_for(g), psi);
      } else {
        rho = sim.run_lindblad(lib.schedule_for(g), rho);
      }
    }
    out.push_back(mode == CircuitMode::pulse ? sim.leakage(psi) : sim.leakage_rho(rho));
  }
  return out;
}

namespace {

int parse_target(const std::string& target) {
  if (target.size() != 3 || target.find_first_not_of("01") != std::string::npos)
    throw InvalidArgument("target must be a 3-bit string such as 111");
  return (target[0] - '0') * 4 + (target[1] - '0') * 2 + (target[2] - '0');
}

}  // namespace

Circuit grover_oracle(const std::string& target, GateKind ccz) {
  const int t = parse_target(target);
  Circuit c;
  for (int q = 0; q < 3; ++q)
    if (!((t >> (2 - q)) & 1)) c.add(Gate::x(q));
  c.add(Gate{ccz, {0, 1, 2}});
  for (int q = 0; q < 3; ++q)
    if (!((t >> (2 - q)) & 1)) c.add(Gate::x(q));
  return c;
}

Circuit grover_circuit(const std::string& target, int iterations, GateKind ccz) {
  if (iterations < 0) throw InvalidArgument("iteration count must be non-negative");
  const Circuit oracle = grover_oracle(target, ccz);
  Circuit c;
  for (int q = 0; q < 3; ++q) c.add(Gate::h(q));
  for (int k = 0; k < iterations; ++k) {
    for (const auto& g : oracle.gates) c.add(g);
    for (int q = 0; q < 3; ++q) c.add(Gate::h(q));
    for (int q = 0; q < 3; ++q) c.add(Gate::x(q));
    c.add(Gate{ccz, {0, 1, 2}});
    for (int q = 0; q < 3; ++q) c.add(Gate::x(q));
    for (int q = 0; q < 3; ++q) c.add(Gate::h(q));
  }
  return c;
}

RVec grover(const std::string& target, int iterations, CircuitMode mode, const GateSimulator* sim,
            const PulseLibrary* lib) {
  Vec8 init = Vec8::Zero();
  init(0) = 1.0;
  const auto r = run_circuit(grover_circuit(target, iterations), mode, init, sim, lib);
  RVec p(8);
  for (int k = 0; k < 8; ++k) p(k) = std::max(r.rho(k, k).real(), 0.0);
  return p / p.sum();
}

int optimal_grover_iterations(int n_items) {
  if (n_items < 1) throw InvalidArgument("search space must be non-empty");
  return static_cast<int>(std::lround(kPi / 4.0 * std::sqrt(static_cast<double>(n_items))));
}

double rb_fidelity(double p_ref, double p_gate, int d) {
  if (!(p_gate > 0.0 && p_gate <= p_ref && p_ref <= 1.0)) throw InvalidArgument("need 0 < p_gate <= p_ref <= 1");
  if (d < 2) throw InvalidArgument("dimension must be at least 2");
  return 1.0 - (1.0 - p_gate / p_ref) * (1.0 - 1.0 / d);
}

namespace {

struct DecayFunctor : Eigen::DenseFunctor<double> {
  const std::vector<double>& m;
  const std::vector<double>& y;
  DecayFunctor(const std::vector<double>& depths, const std::vector<double>& surv)
      : Eigen::DenseFunctor<double>(3, static_cast<int>(depths.size())), m(depths), y(surv) {}

  int operator()(const InputType& x, ValueType& f) const {
    for (std::size_t i = 0; i < m.size(); ++i) f(i) = x(0) * std::pow(x(1), m[i]) + x(2) - y[i];
    return 0;
  }
  int df(const InputType& x, JacobianType& j) const {
    for (std::size_t i = 0; i < m.size(); ++i) {
      j(i, 0) = std::pow(x(1), m[i]);
      j(i, 1) = m[i] == 0.0 ? 0.0 : x(0) * m[i] * std::pow(x(1), m[i] - 1);
      j(i, 2) = 1.0;
    }
    return 0;
  }
};

}  // namespace

RbFit fit_rb_decay(const std::vector<double>& depths, const std::vector<double>& survival) {
  if (depths.size() != survival.size()) throw InvalidArgument("depths and survival differ in length");
  std::vector<double> distinct = depths;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw InvalidArgument("RB fit needs at least three distinct depths");
  const auto [lo, hi] = std::minmax_element(survival.begin(), survival.end());
  if (*hi - *lo < 1e-12) throw FitDegenerate("survival probabilities are constant");

  DecayFunctor f(depths, survival);
  Eigen::LevenbergMarquardt<DecayFunctor> lm(f);
  lm.setXtol(1e-14);
  lm.setFtol(1e-14);
  lm.setMaxfev(2000);
  Eigen::VectorXd x(3);
  x << 0.5, 0.99, 0.5;
  lm.minimize(x);
  if (!std::isfinite(x(1)) || x(1) <= 0.0 || x(1) > 1.0 + 1e-9) throw FitDegenerate("decay parameter left (0, 1]");
  return RbFit{x(0), std::min(x(1), 1.0), x(2)};
}

}  // namespace ccz
