#include "cczsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cczsim/couplings.hpp"

namespace ccz {

PhaseSet PhaseSet::from_components(double phi12, double phi23, double phi13, double phi123) {
  PhaseSet p;
  p.phi12 = wrap_phase(phi12);
  p.phi23 = wrap_phase(phi23);
  p.phi13 = wrap_phase(phi13);
  p.phi123 = wrap_phase(phi123);
  p.phi_ccz = wrap_phase(phi123 - phi12 - phi23 - phi13);
  return p;
}

std::array<Vec8, 6> phase_probe_states() {
  const Eigen::Vector2cd zero(1.0, 0.0);
  const Eigen::Vector2cd one(0.0, 1.0);
  const Eigen::Vector2cd plus = Eigen::Vector2cd(1.0, 1.0) / std::sqrt(2.0);
  auto prod = [](const Eigen::Vector2cd& a, const Eigen::Vector2cd& b, const Eigen::Vector2cd& c) {
    Vec8 v;
    for (int k = 0; k < 8; ++k) v(k) = a((k >> 2) & 1) * b((k >> 1) & 1) * c(k & 1);
    return v;
  };
  return {prod(zero, plus, zero), prod(one, plus, zero), prod(zero, plus, one),
          prod(one, plus, one),   prod(zero, zero, plus), prod(one, zero, plus)};
}

double qubit_phase(const Mat2& r) {
  if ((r * r).trace().real() < 0.1) throw SignalLoss("reduced qubit state has purity below 0.1");
  const double ex = 2.0 * r(0, 1).real();
  const double ey = -2.0 * r(0, 1).imag();
  return std::atan2(ey, ex);
}

namespace {

// Probe index and measured qubit for each probe.
constexpr std::array<int, 6> kProbeQubit{1, 1, 1, 1, 2, 2};

PhaseSet assemble_phases(const std::array<double, 6>& ph) {
  return PhaseSet::from_components(ph[1] - ph[0], ph[2] - ph[0], ph[5] - ph[4], ph[3] - ph[0]);
}

}  // namespace

PhaseSet conditional_phases(const Mat8& evolution) {
  const auto probes = phase_probe_states();
  std::array<double, 6> ph{};
  for (int i = 0; i < 6; ++i) ph[i] = qubit_phase(reduced_qubit(Vec8(evolution * probes[i]), kProbeQubit[i]));
  return assemble_phases(ph);
}

PhaseSet conditional_phases(const GateSimulator& sim, const CMat& columns) {
  if (columns.cols() != 8) throw DimensionMismatch("expected 8 evolved computational columns");
  const auto probes = phase_probe_states();
  std::array<double, 6> ph{};
  for (int i = 0; i < 6; ++i) {
    const CVec psi = columns * probes[i];
    ph[i] = qubit_phase(reduced_qubit(sim, psi, kProbeQubit[i]));
  }
  return assemble_phases(ph);
}

PhaseSet measure_conditional_phases(const GateSimulator& sim, const PulseSchedule& schedule, SimMode mode) {
  if (mode == SimMode::ideal) return conditional_phases(sim, sim.logical_columns(schedule));
  const auto probes = phase_probe_states();
  std::array<double, 6> ph{};
  for (int i = 0; i < 6; ++i) {
    const CVec psi0 = sim.embed(probes[i]);
    const CMat rho = sim.run_lindblad(schedule, psi0 * psi0.adjoint());
    const Mat2 r = reduced_qubit_rho(sim, rho, kProbeQubit[i]);
    ph[i] = std::atan2(-2.0 * r(0, 1).imag(), 2.0 * r(0, 1).real());
  }
  return assemble_phases(ph);
}

double measure_leakage(const GateSimulator& sim, const PulseSchedule& schedule, SimMode mode) {
  const long i111 = sim.computational()[7];
  CVec psi0 = CVec::Zero(sim.dim());
  psi0(i111) = 1.0;
  if (mode == SimMode::ideal) {
    const CVec psi = sim.run_pure(schedule, psi0);
    return std::clamp(1.0 - std::norm(psi(i111)), 0.0, 1.0);
  }
  const CMat rho = sim.run_lindblad(schedule, psi0 * psi0.adjoint());
  return std::clamp(1.0 - rho(i111, i111).real(), 0.0, 1.0);
}

PulseSchedule ccz_segment(double amp_c1, double amp_c2, double window) {
  return segment_schedule(window, {{Site::C1, amp_c1}, {Site::C2, amp_c2}});
}

OperatingPoint evaluate_operating_point(const GateSimulator& sim, double amp_c1, double amp_c2, double window) {
  OperatingPoint op;
  op.amp_c1 = amp_c1;
  op.amp_c2 = amp_c2;
  op.tau = window;
  const CMat cols = sim.logical_columns(ccz_segment(amp_c1, amp_c2, window));
  op.leakage = std::clamp(1.0 - std::norm(cols(sim.computational()[7], 7)), 0.0, 1.0);
  try {
    op.phases = conditional_phases(sim, cols);
    op.score = std::abs(std::abs(op.phases.phi_ccz) - kPi);
  } catch (const SignalLoss&) {
    op.score = kPi;
  }
  return op;
}

bool better_operating_point(const OperatingPoint& a, const OperatingPoint& b) {
  if (a.leakage != b.leakage) return a.leakage < b.leakage;
  const double fa = std::abs(a.phases.phi13);
  const double fb = std::abs(b.phases.phi13);
  if (fa != fb) return fa < fb;
  // deterministic tie-break independent of enumeration order
  if (a.amp_c1 != b.amp_c1) return a.amp_c1 < b.amp_c1;
  return a.amp_c2 < b.amp_c2;
}

std::vector<OperatingPoint> select_candidates(const std::vector<OperatingPoint>& points, double phase_tol) {
  std::vector<OperatingPoint> out;
  for (const auto& p : points)
    if (p.score < phase_tol) out.push_back(p);
  std::sort(out.begin(), out.end(), better_operating_point);
  return out;
}

double miss_cost(const OperatingPoint& p) {
  return p.leakage + (p.score * p.score + p.phases.phi13 * p.phases.phi13) / 8.0;
}

namespace {

std::vector<OperatingPoint> evaluate_grid(const GateSimulator& sim, const std::vector<double>& a1,
                                          const std::vector<double>& a2, double window, int jobs) {
  std::vector<std::pair<double, double>> todo;
  for (double x : a1)
    for (double y : a2) todo.emplace_back(x, y);
  std::vector<OperatingPoint> out(todo.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(todo.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < todo.size(); ++i)
      out[i] = evaluate_operating_point(sim, todo[i].first, todo[i].second, window);
    return out;
  }
  std::vector<std::future<void>> fut;
  for (int w = 0; w < workers; ++w)
    fut.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < todo.size(); i += workers)
        out[i] = evaluate_operating_point(sim, todo[i].first, todo[i].second, window);
    }));
  for (auto& f : fut) f.get();
  return out;
}

// Smooth penalty used to polish a point toward |phi_ccz| = pi with low leakage.
double refine_cost(const OperatingPoint& p, double phase_tol) {
  const double d = p.score / phase_tol;
  return p.leakage + 0.01 * d * d + 0.01 * std::abs(p.phases.phi13);
}

}  // namespace

SweepResult sweep_operating_point(const GateSimulator& sim, const std::vector<double>& amps_c1,
                                  const std::vector<double>& amps_c2, const SweepOptions& opts) {
  if (amps_c1.empty() || amps_c2.empty()) throw InvalidArgument("operating-point grid is empty");
  SweepResult res;
  res.points = evaluate_grid(sim, amps_c1, amps_c2, opts.window, opts.jobs);
  res.candidates = select_candidates(res.points, opts.phase_tol);

  if (opts.refine) {
    // polish the best few starting points (feasible first, then nearest misses)
    std::vector<OperatingPoint> starts = res.candidates;
    if (starts.empty()) {
      starts = res.points;
      std::sort(starts.begin(), starts.end(), [&](const auto& a, const auto& b) {
        return refine_cost(a, opts.phase_tol) < refine_cost(b, opts.phase_tol);
      });
    }
    if (starts.size() > 2) starts.resize(2);
    const double step = std::max(amps_c1.size() > 1 ? std::abs(amps_c1[1] - amps_c1[0]) : 0.05,
                                 amps_c2.size() > 1 ? std::abs(amps_c2[1] - amps_c2[0]) : 0.05);
    for (const auto& s : starts) {
      OperatingPoint best = s;
      auto f = [&](const std::vector<double>& x) {
        const OperatingPoint p = evaluate_operating_point(sim, x[0], x[1], opts.window);
        if (refine_cost(p, opts.phase_tol) < refine_cost(best, opts.phase_tol)) best = p;
        return refine_cost(p, opts.phase_tol);
      };
      nelder_mead(f, {s.amp_c1, s.amp_c2}, 0.25 * step, 1e-5, 60);
      res.points.push_back(best);
    }
    res.candidates = select_candidates(res.points, opts.phase_tol);
  }

  if (res.candidates.empty() && opts.allow_nearest_miss) {
    res.selected = *std::min_element(res.points.begin(), res.points.end(),
                                     [](const auto& a, const auto& b) { return miss_cost(a) < miss_cost(b); });
    res.feasible = false;
    return res;
  }
  if (res.candidates.empty()) {
    const auto nearest = *std::min_element(res.points.begin(), res.points.end(),
                                           [](const auto& a, const auto& b) { return a.score < b.score; });
    std::ostringstream msg;
    msg.precision(6);
    msg << "no operating point with |phi_ccz| within " << opts.phase_tol << " rad of pi; nearest miss at amp_c1="
        << nearest.amp_c1 << ", amp_c2=" << nearest.amp_c2 << " with phi_ccz=" << nearest.phases.phi_ccz
        << ", leakage=" << nearest.leakage;
    throw NoOperatingPoint(msg.str());
  }
  res.selected = res.candidates.front();
  return res;
}

std::string sweep_to_csv(const std::vector<OperatingPoint>& points) {
  std::ostringstream out;
  out.precision(15);
  out << "amp_c1,amp_c2,leakage,phi12,phi23,phi13,phi123,phi_ccz\n";
  for (const auto& p : points)
    out << p.amp_c1 << ',' << p.amp_c2 << ',' << p.leakage << ',' << p.phases.phi12 << ',' << p.phases.phi23 << ','
        << p.phases.phi13 << ',' << p.phases.phi123 << ',' << p.phases.phi_ccz << '\n';
  return out.str();
}

double pair_phase(const PhaseSet& p, QubitPair pair) { return pair == QubitPair::q12 ? p.phi12 : p.phi23; }

namespace {

struct PairSample {
  double amp;
  double phase;
  double leakage;
};

PairSample sample_pair(const GateSimulator& sim, QubitPair pair, double window, double amp) {
  const Site coupler = pair == QubitPair::q12 ? Site::C1 : Site::C2;
  const CMat cols = sim.logical_columns(segment_schedule(window, {{coupler, amp}}));
  const int k11 = pair == QubitPair::q12 ? 6 : 3;  // |110> or |011>
  PairSample s{amp, 0.0, sim.leakage(cols.col(k11))};
  try {
    s.phase = pair_phase(conditional_phases(sim, cols), pair);
  } catch (const SignalLoss&) {
    s.phase = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

}  // namespace

namespace {

double miss(const PairSample& s, double target) {
  return std::isnan(s.phase) ? 1e9 : std::abs(wrap_phase(s.phase - target)) + 10.0 * s.leakage;
}

// Scan one window; returns the accepted amplitude or nothing, tracking the closest sample.
std::optional<double> cphase_at_window(const GateSimulator& sim, QubitPair pair, double target, double window,
                                       const CphaseOptions& opts, PairSample& closest) {
  const PairSample zero = sample_pair(sim, pair, window, 0.0);
  if (miss(zero, target) < miss(closest, target)) closest = zero;
  if (std::abs(wrap_phase(zero.phase - target)) < opts.phase_tol && zero.leakage < opts.max_leakage) return 0.0;

  // scan toward the qubits, unwrapping the phase along the way
  std::vector<PairSample> scan{zero};
  double unwrapped_prev = zero.phase;
  std::vector<double> unwrapped{zero.phase};
  for (int k = 1; k < opts.scan_points; ++k) {
    const double amp = opts.amp_min * k / (opts.scan_points - 1);
    PairSample s = sample_pair(sim, pair, window, amp);
    if (std::isnan(s.phase)) break;
    if (miss(s, target) < miss(closest, target)) closest = s;
    const double u = unwrapped_prev + wrap_phase(s.phase - unwrapped_prev);
    scan.push_back(s);
    unwrapped.push_back(u);
    unwrapped_prev = u;

    const std::size_t i = scan.size() - 1;
    const double lo = std::min(unwrapped[i - 1], unwrapped[i]);
    const double hi = std::max(unwrapped[i - 1], unwrapped[i]);
    // smallest branch of the target inside [lo, hi]
    const double branch = target + kTwoPi * std::ceil((lo - target) / kTwoPi);
    if (branch > hi) continue;
    if (scan[i - 1].leakage > 10 * opts.max_leakage && scan[i].leakage > 10 * opts.max_leakage) continue;

    // bisection on the bracket
    double a = scan[i - 1].amp;
    double b = scan[i].amp;
    double fa = unwrapped[i - 1] - branch;
    PairSample best = std::abs(fa) < std::abs(unwrapped[i] - branch) ? scan[i - 1] : scan[i];
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (a + b);
      const PairSample sm = sample_pair(sim, pair, window, m);
      const double um = unwrapped[i - 1] + wrap_phase(sm.phase - unwrapped[i - 1]);
      const double fm = um - branch;
      if (std::abs(wrap_phase(sm.phase - target)) < std::abs(wrap_phase(best.phase - target))) best = sm;
      if (miss(sm, target) < miss(closest, target)) closest = sm;
      if (std::abs(fm) < 0.1 * opts.phase_tol) break;
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    if (std::abs(wrap_phase(best.phase - target)) < opts.phase_tol && best.leakage < opts.max_leakage)
      return best.amp;
  }
  return std::nullopt;
}

}  // namespace

PulseSchedule calibrate_cphase(const GateSimulator& sim, QubitPair pair, double target, const CphaseOptions& opts) {
  if (!(target > -kPi - 1e-12 && target <= kPi + 1e-12)) throw InvalidArgument("target phase must lie in (-pi, pi]");
  const double nominal = opts.window > 0 ? opts.window : (pair == QubitPair::q12 ? 62.0 : 44.0);
  const Site coupler = pair == QubitPair::q12 ? Site::C1 : Site::C2;

  PairSample closest{0.0, std::numeric_limits<double>::quiet_NaN(), 1.0};
  double closest_window = nominal;
  for (double window = nominal;; window *= 1.25) {
    PairSample here = closest;
    if (const auto amp = cphase_at_window(sim, pair, target, window, opts, here))
      return segment_schedule(window, {{coupler, *amp}});
    if (miss(here, target) < miss(closest, target)) {
      closest = here;
      closest_window = window;
    }
    if (window * 1.25 > opts.max_window + 1e-9) break;
  }
  if (opts.best_effort && !std::isnan(closest.phase)) return segment_schedule(closest_window, {{coupler, closest.amp}});
  std::ostringstream msg;
  msg << "conditional phase " << target << " rad not reachable with leakage below " << opts.max_leakage
      << " within amplitude bound " << opts.amp_min;
  throw UnreachableTarget(msg.str());
}

PulseSchedule CczGate::composite() const {
  PulseSchedule s = segment1.then(cphase12).then(cphase23);
  s.virtual_z = virtual_z;
  return s;
}

double CczGate::total_ns() const { return segment1.total_time + cphase12.total_time + cphase23.total_time; }

using nlohmann::json;

namespace {

json phases_json(const PhaseSet& p) {
  return {{"phi12", p.phi12}, {"phi23", p.phi23}, {"phi13", p.phi13}, {"phi123", p.phi123}, {"phi_ccz", p.phi_ccz}};
}

}  // namespace

std::string gate_to_json(const CczGate& g) {
  json j;
  j["format"] = "cczsim.gate";
  j["version"] = 1;
  const auto& op = g.operating_point;
  j["operating_point"] = {{"amp_c1", op.amp_c1}, {"amp_c2", op.amp_c2}, {"tau", op.tau},
                          {"leakage", op.leakage}, {"score", op.score}, {"phases", phases_json(op.phases)}};
  j["segment1"] = json::parse(schedule_to_json(g.segment1));
  j["cphase12"] = json::parse(schedule_to_json(g.cphase12));
  j["cphase23"] = json::parse(schedule_to_json(g.cphase23));
  j["virtual_z"] = g.virtual_z;
  j["total_ns"] = g.total_ns();
  return j.dump(2);
}

CczGate gate_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("version", 0) != 1) throw ConfigError("unsupported gate file version");
    CczGate g;
    const auto& op = j.at("operating_point");
    g.operating_point.amp_c1 = op.at("amp_c1").get<double>();
    g.operating_point.amp_c2 = op.at("amp_c2").get<double>();
    g.operating_point.tau = op.at("tau").get<double>();
    g.operating_point.leakage = op.at("leakage").get<double>();
    g.operating_point.score = op.value("score", 0.0);
    const auto& ph = op.at("phases");
    g.operating_point.phases = PhaseSet::from_components(ph.at("phi12").get<double>(), ph.at("phi23").get<double>(),
                                                         ph.at("phi13").get<double>(), ph.at("phi123").get<double>());
    g.segment1 = schedule_from_json(j.at("segment1").dump());
    g.cphase12 = schedule_from_json(j.at("cphase12").dump());
    g.cphase23 = schedule_from_json(j.at("cphase23").dump());
    g.virtual_z = j.at("virtual_z").get<std::array<double, 3>>();
    return g;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid gate file: ") + e.what());
  }
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             double step, double tol, int max_iter) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex{x0};
  for (std::size_t i = 0; i < n; ++i) {
    auto v = x0;
    v[i] += step;
    simplex.push_back(v);
  }
  std::vector<double> fv;
  for (const auto& v : simplex) fv.push_back(f(v));

  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 0; i < simplex.size(); ++i)
      for (std::size_t j = i + 1; j < simplex.size(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += (simplex[i][k] - simplex[j][k]) * (simplex[i][k] - simplex[j][k]);
        d = std::max(d, std::sqrt(s));
      }
    return d;
  };
  auto combine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] + t * (b[k] - a[k]);
    return out;
  };

  NelderMeadResult res;
  int it = 0;
  for (; it < max_iter; ++it) {
    std::vector<std::size_t> order(simplex.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (auto i : order) {
      s2.push_back(simplex[i]);
      f2.push_back(fv[i]);
    }
    simplex = std::move(s2);
    fv = std::move(f2);
    if (diameter() < tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / n;
    const auto& worst = simplex[n];

    const auto xr = combine(centroid, worst, -1.0);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const auto xe = combine(centroid, worst, -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
      continue;
    }
    // contraction (outside when the reflection improved on the worst point)
    const bool outside = fr < fv[n];
    const auto xc = outside ? combine(centroid, xr, 0.5) : combine(centroid, worst, 0.5);
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[n])) {
      simplex[n] = xc;
      fv[n] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      simplex[i] = combine(simplex[0], simplex[i], 0.5);
      fv[i] = f(simplex[i]);
    }
  }
  const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
  res.x = simplex[best];
  res.value = fv[best];
  res.iterations = it;
  return res;
}

std::array<double, 3> ramsey_phases(const Mat8& evolution) {
  std::array<double, 3> out{};
  for (int q = 0; q < 3; ++q) {
    Vec8 v = Vec8::Zero();
    v(0) = 1.0 / std::sqrt(2.0);
    v(1 << (2 - q)) = 1.0 / std::sqrt(2.0);
    out[q] = qubit_phase(reduced_qubit(Vec8(evolution * v), q));
  }
  return out;
}

double unitary_process_fidelity(const Mat8& block, const Mat8& ideal) {
  return std::norm((ideal.adjoint() * block).trace()) / 64.0;
}

Mat8 apply_virtual_z(const Mat8& block, const std::array<double, 3>& theta) {
  Vec8 p;
  for (int k = 0; k < 8; ++k)
    p(k) = std::polar(1.0, theta[0] * ((k >> 2) & 1) + theta[1] * ((k >> 1) & 1) + theta[2] * (k & 1));
  return p.asDiagonal() * block;
}

VirtualZResult optimize_virtual_z(const Mat8& block, VzObjective objective, const Mat8& ideal) {
  const auto seed = ramsey_phases(block);
  auto to_theta = [](const std::vector<double>& x) { return std::array<double, 3>{x[0], x[1], x[2]}; };
  std::function<double(const std::vector<double>&)> f;
  if (objective == VzObjective::process_fidelity) {
    f = [&](const std::vector<double>& x) { return -unitary_process_fidelity(apply_virtual_z(block, to_theta(x)), ideal); };
  } else {
    f = [&](const std::vector<double>& x) {
      const auto ph = ramsey_phases(apply_virtual_z(block, to_theta(x)));
      return ph[0] * ph[0] + ph[1] * ph[1] + ph[2] * ph[2];
    };
  }
  const auto nm = nelder_mead(f, {-seed[0], -seed[1], -seed[2]}, 0.05, 1e-4, 200);
  VirtualZResult r;
  for (int q = 0; q < 3; ++q) r.theta[q] = wrap_phase(nm.x[q]);
  r.objective = objective == VzObjective::process_fidelity ? -nm.value : nm.value;
  r.iterations = nm.iterations;
  return r;
}

Mat8 computational_block(const GateSimulator& sim, const CMat& cols) {
  Mat8 m;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) m(r, c) = cols(sim.computational()[r], c);
  return m;
}

VirtualZResult optimize_virtual_z(const GateSimulator& sim, const CczGate& gate, VzObjective objective) {
  CczGate bare = gate;
  bare.virtual_z = {0.0, 0.0, 0.0};
  return optimize_virtual_z(computational_block(sim, sim.logical_columns(bare.composite())), objective);
}

AssembleOptions default_assemble_options() {
  AssembleOptions o;
  // c1 near 5.1-5.3 GHz, c2 near 5.05-5.45 GHz
  o.amps_c1 = CouplerGrid::linspace(-1.10, -0.90, 21);
  o.amps_c2 = CouplerGrid::linspace(-0.95, -0.55, 21);
  return o;
}

AssembleReport assemble_ccz(const GateSimulator& sim, const AssembleOptions& opts) {
  AssembleReport rep;
  rep.sweep = sweep_operating_point(sim, opts.amps_c1, opts.amps_c2, opts.sweep);
  const auto& op = rep.sweep.selected;
  CczGate g;
  g.operating_point = op;
  g.segment1 = ccz_segment(op.amp_c1, op.amp_c2, opts.sweep.window);
  CphaseOptions c12 = opts.cphase;
  c12.window = opts.window12;
  CphaseOptions c23 = opts.cphase;
  c23.window = opts.window23;
  g.cphase12 = calibrate_cphase(sim, QubitPair::q12, wrap_phase(-op.phases.phi12), c12);
  g.cphase23 = calibrate_cphase(sim, QubitPair::q23, wrap_phase(-op.phases.phi23), c23);
  const CMat cols = sim.logical_columns(g.composite());
  rep.composite_phases = conditional_phases(sim, cols);
  const auto vz = optimize_virtual_z(computational_block(sim, cols), opts.objective);
  g.virtual_z = vz.theta;
  rep.process_fidelity =
      unitary_process_fidelity(apply_virtual_z(computational_block(sim, cols), g.virtual_z), ccz_ideal());
  rep.gate = g;
  return rep;
}

}  // namespace ccz
