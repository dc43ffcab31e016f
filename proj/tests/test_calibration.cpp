#include <doctest.h>

#include <algorithm>
#include <random>

#include "cczsim/calibration.hpp"
#include "cczsim/couplings.hpp"

using namespace ccz;

namespace {

const GateSimulator& sim() {
  static const GateSimulator s = idle_gate_simulator(DeviceModel::reference());
  return s;
}

Mat8 diagonal(const std::array<double, 8>& th) {
  Mat8 u = Mat8::Zero();
  for (int k = 0; k < 8; ++k) u(k, k) = std::polar(1.0, th[k]);
  return u;
}

OperatingPoint point(double leak, double p13, double ccz) {
  OperatingPoint p;
  p.leakage = leak;
  p.phases = PhaseSet::from_components(0.0, 0.0, p13, ccz + p13);
  p.score = std::abs(std::abs(p.phases.phi_ccz) - kPi);
  return p;
}

}  // namespace

TEST_CASE("phase set reduction") {
  auto p = PhaseSet::from_components(0.1, 0.2, 0.3, 4.0);
  CHECK(p.phi_ccz == doctest::Approx(wrap_phase(4.0 - 0.6)));
  CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
}

TEST_CASE("conditional phases of reference unitaries") {
  auto id = conditional_phases(Mat8(Mat8::Identity()));
  CHECK(std::abs(id.phi12) < 1e-12);
  CHECK(std::abs(id.phi123) < 1e-12);
  CHECK(std::abs(id.phi_ccz) < 1e-12);

  auto c = conditional_phases(ccz_ideal());
  CHECK(std::abs(c.phi12) < 1e-12);
  CHECK(std::abs(c.phi23) < 1e-12);
  CHECK(std::abs(c.phi13) < 1e-12);
  CHECK(std::abs(c.phi123) == doctest::Approx(kPi));
  CHECK(std::abs(c.phi_ccz) == doctest::Approx(kPi));

  auto cp = conditional_phases(cphase_ideal(0, 1, 0.7));
  CHECK(cp.phi12 == doctest::Approx(0.7));
  CHECK(std::abs(cp.phi23) < 1e-12);
  CHECK(std::abs(cp.phi13) < 1e-12);
}

TEST_CASE("phase recovery on random diagonal unitaries") {
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<double, 8> th;
    for (auto& x : th) x = u(rng);
    auto p = conditional_phases(diagonal(th));
    // index = 4 q1 + 2 q2 + q3
    double p12 = th[6] - th[4] - th[2] + th[0];
    double p23 = th[3] - th[1] - th[2] + th[0];
    double p13 = th[5] - th[4] - th[1] + th[0];
    double p123 = th[7] - th[5] - th[2] + th[0];
    CHECK(std::abs(wrap_phase(p.phi12 - p12)) < 1e-9);
    CHECK(std::abs(wrap_phase(p.phi23 - p23)) < 1e-9);
    CHECK(std::abs(wrap_phase(p.phi13 - p13)) < 1e-9);
    CHECK(std::abs(wrap_phase(p.phi123 - p123)) < 1e-9);
    CHECK(std::abs(wrap_phase(p.phi_ccz - (p123 - p12 - p23 - p13))) < 1e-9);
  }
}

TEST_CASE("conditional phases ignore virtual Z") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::array<double, 8> th;
  for (auto& x : th) x = u(rng);
  auto base = conditional_phases(diagonal(th));
  auto shifted = conditional_phases(apply_virtual_z(diagonal(th), {0.4, -1.1, 2.5}));
  CHECK(std::abs(wrap_phase(base.phi_ccz - shifted.phi_ccz)) < 1e-12);
  CHECK(std::abs(wrap_phase(base.phi12 - shifted.phi12)) < 1e-12);
}

TEST_CASE("signal loss") {
  CHECK_THROWS_AS(qubit_phase(Mat2::Zero()), SignalLoss);
  Mat2 plus;
  plus << 0.5, 0.5, 0.5, 0.5;
  CHECK(std::abs(qubit_phase(plus)) < 1e-12);
}

TEST_CASE("selection contract") {
  std::vector<OperatingPoint> pts{point(0.01, 0.05, kPi), point(0.01, 0.02, -kPi + 0.01),
                                  point(0.001, 0.3, kPi - 0.2), point(0.03, 0.0, kPi)};
  auto c = select_candidates(pts, 0.05);
  REQUIRE(c.size() == 3);
  CHECK(c[0].phases.phi13 == doctest::Approx(0.02));
  for (const auto& q : c) CHECK_FALSE(better_operating_point(q, c[0]));

  std::mt19937_64 rng(3);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(pts.begin(), pts.end(), rng);
    auto d = select_candidates(pts, 0.05);
    CHECK(d[0].phases.phi13 == c[0].phases.phi13);
    CHECK(d[0].leakage == c[0].leakage);
  }
  CHECK(miss_cost(point(0.0, 0.0, kPi)) == doctest::Approx(0.0));
  CHECK(miss_cost(point(0.1, 0.0, kPi)) > miss_cost(point(0.01, 0.0, kPi)));
}

TEST_CASE("Nelder-Mead converges on a quadratic bowl") {
  auto f = [](const std::vector<double>& x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + 2.0 * (x[1] + 0.5) * (x[1] + 0.5) + 0.5 * x[2] * x[2];
  };
  auto r = nelder_mead(f, {0.0, 0.0, 0.0}, 0.5, 1e-6, 2000);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-4));
  CHECK(std::abs(r.x[2]) < 1e-4);
}

TEST_CASE("virtual Z recovers an injected rotation") {
  Mat8 block = embed_1q(gates::rz(0.3), 0) * ccz_ideal();
  auto r = optimize_virtual_z(block);
  // compare up to a global phase: only differences between qubits are fixed
  auto fixed = apply_virtual_z(block, r.theta);
  CHECK(unitary_process_fidelity(fixed, ccz_ideal()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.theta[0] == doctest::Approx(-0.3).epsilon(1e-3));
  CHECK(std::abs(r.theta[1]) < 1e-3);
  CHECK(std::abs(r.theta[2]) < 1e-3);

  auto already = optimize_virtual_z(ccz_ideal());
  for (double t : already.theta) CHECK(std::abs(t) < 1e-3);
  CHECK(already.objective == doctest::Approx(1.0).epsilon(1e-12));

  auto ramsey = ramsey_phases(block);
  CHECK(ramsey[0] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("gate record") {
  CczGate g;
  g.segment1 = ccz_segment(-1.0, -0.7);
  g.cphase12 = segment_schedule(62.0, {{Site::C1, -0.2}});
  g.cphase23 = segment_schedule(44.0, {{Site::C2, -0.1}});
  g.virtual_z = {0.1, 0.2, -0.3};
  g.operating_point.amp_c1 = -1.0;
  CHECK(g.total_ns() == doctest::Approx(256.0));
  auto comp = g.composite();
  CHECK(comp.total_time == doctest::Approx(256.0));
  CHECK(comp.virtual_z[2] == doctest::Approx(-0.3));
  auto back = gate_from_json(gate_to_json(g));
  CHECK(back.total_ns() == doctest::Approx(256.0));
  CHECK(back.virtual_z == g.virtual_z);
  CHECK(back.operating_point.amp_c1 == -1.0);
}

TEST_CASE("idle schedule leaves |111> in place") {
  PulseSchedule s;
  s.total_time = 150.0;
  CHECK(measure_leakage(sim(), s) < 1e-3);
  auto p = measure_conditional_phases(sim(), s);
  CHECK(std::abs(p.phi_ccz) < 1e-6);
}

TEST_CASE("mid-chevron point leaks") {
  auto p = evaluate_operating_point(sim(), -1.2, -0.6);
  CHECK(p.leakage > 0.2);
  CHECK(p.leakage <= 1.0);
}

TEST_CASE("plateau phase rate follows the static pair shifts") {
  // Lengthening the plateau by 2 ns adds -2 pi zeta t relative to the idle frame.
  const double a1 = -0.5, a2 = -0.3, sigma = 12.5;
  const auto idle = find_idle_point(DeviceModel::reference(), {Frame::rwa});
  const auto z = zeta_exact(DeviceModel::reference(), idle.omega_c1_ghz + a1, idle.omega_c2_ghz + a2, {Frame::rwa});
  auto phases = [&](double plateau) {
    const double w = plateau + 8.0 * sigma;
    return measure_conditional_phases(sim(), segment_schedule(w, {{Site::C1, a1}, {Site::C2, a2}}, sigma / w));
  };
  const PhaseSet p0 = phases(50.0), p1 = phases(52.0);
  const double to_mhz = -1.0 / (2.0 * 2.0 * kPi * 1e-3);
  CHECK(wrap_phase(p1.phi12 - p0.phi12) * to_mhz == doctest::Approx(z.zeta12 - idle.report.zeta12).epsilon(0.02));
  CHECK(wrap_phase(p1.phi23 - p0.phi23) * to_mhz == doctest::Approx(z.zeta23 - idle.report.zeta23).epsilon(0.02));
}

TEST_CASE("lindblad leakage measurement is consistent") {
  auto s = ccz_segment(-1.0, -0.6, 150.0);
  double pure = measure_leakage(sim(), s, SimMode::ideal);
  GateSimulator quiet(sim().device(), sim().evolver().options(), NoiseSpec::noiseless());
  double mixed = measure_leakage(quiet, s, SimMode::lindblad);
  CHECK(mixed == doctest::Approx(pure).epsilon(1e-5));
  double noisy = measure_leakage(sim(), s, SimMode::lindblad);
  CHECK(noisy > pure);
}

TEST_CASE("sweep far from resonance has no operating point") {
  SweepOptions o;
  o.refine = false;
  CHECK_THROWS_AS(sweep_operating_point(sim(), {-0.1}, {-0.1}, o), NoOperatingPoint);
  o.allow_nearest_miss = true;
  auto r = sweep_operating_point(sim(), {-0.1}, {-0.1}, o);
  CHECK_FALSE(r.feasible);
  CHECK(r.selected.amp_c1 == -0.1);
  CHECK_THROWS_AS(sweep_operating_point(sim(), {}, {-0.1}, o), InvalidArgument);
}

TEST_CASE("compensation pulse calibration") {
  CphaseOptions o;
  o.scan_points = 9;
  auto zero = calibrate_cphase(sim(), QubitPair::q12, 0.0, o);
  CHECK(zero.envelope_sum(Site::C1, 0.5 * zero.total_time) == 0.0);

  o.window = 150.0;
  o.amp_min = -1.3;
  o.scan_points = 27;
  auto s = calibrate_cphase(sim(), QubitPair::q12, 0.5, o);
  auto p = measure_conditional_phases(sim(), s);
  CHECK(std::abs(wrap_phase(p.phi12 - 0.5)) < 0.01);
  CHECK(measure_leakage(sim(), s) < 0.05);

  CphaseOptions tight;
  tight.window = 44.0;
  tight.scan_points = 9;
  CHECK_THROWS_AS(calibrate_cphase(sim(), QubitPair::q23, kPi, tight), UnreachableTarget);
  tight.best_effort = true;
  CHECK_NOTHROW(calibrate_cphase(sim(), QubitPair::q23, kPi, tight));
}
