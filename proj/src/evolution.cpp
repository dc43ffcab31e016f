#include "cczsim/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace ccz {

namespace {

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kGlX{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                     0.9061798459386640};
constexpr std::array<double, 5> kGlW{0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                     0.2369268850561891};

double detuning_ghz(const PulseSchedule& s, const DeviceModel& d, Site c, double t) {
  return coupler_frequency(s, d, c, t) - d.transmon(c).frequency_ghz;
}

double gauss_legendre(const PulseSchedule& s, const DeviceModel& d, Site c, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (int k = 0; k < 5; ++k) acc += kGlW[k] * detuning_ghz(s, d, c, mid + half * kGlX[k]);
  return acc * half;
}

// Phase 2*pi * integral_0^t (omega_c - omega_idle) dt' sampled on a uniform grid t_k = k * step.
std::vector<double> coupler_phase_grid(const PulseSchedule& s, const DeviceModel& d, Site c, double step,
                                       std::size_t count) {
  std::vector<double> out(count, 0.0);
  auto it = s.channels.find(c);
  if (it == s.channels.end() || it->second.empty()) return out;
  if (s.flux_map.kind == FluxMap::Kind::direct_detuning) {
    for (std::size_t k = 0; k < count; ++k) {
      double v = 0.0;
      for (const auto& p : it->second) v += pulse_envelope_integral(p, 0.0, k * step);
      out[k] = kTwoPi * v;
    }
    return out;
  }
  double acc = 0.0;
  for (std::size_t k = 1; k < count; ++k) {
    acc += gauss_legendre(s, d, c, (k - 1) * step, k * step);
    out[k] = kTwoPi * acc;
  }
  return out;
}

void check_dt(double dt) {
  if (!(dt > 0)) throw InvalidArgument("time step must be positive");
}

void check_span(double t_span) {
  if (!(t_span >= 0)) throw InvalidArgument("evolution time must be non-negative");
}

}  // namespace

Evolver::Evolver(DeviceModel device, SimOptions opts)
    : device_(std::move(device)), opts_(opts), space_(device_, opts.max_excitations) {
  check_dt(opts_.dt);
  bare_ = bare_diagonal(device_, space_);
  n_c1_ = number_diagonal(space_, Site::C1);
  n_c2_ = number_diagonal(space_, Site::C2);
  v_ = interaction_sparse(device_, space_, opts_.frame);
  CMat h = CMat(v_);
  h.diagonal() += bare_.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  // Reorder eigenvectors so column i is the dressed partner of bare state i
  // (greedy by overlap), with a real positive overlap.
  const auto d = static_cast<Eigen::Index>(space_.dim());
  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < d; ++i) {
      const double ov = std::norm(es.eigenvectors()(i, k));
      if (ov > 1e-6) pairs.emplace_back(ov, i, k);
    }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::vector<Eigen::Index> bare_of(d, -1);
  std::vector<bool> used(d, false);
  for (const auto& [ov, i, k] : pairs) {
    if (used[i] || bare_of[k] >= 0) continue;
    used[i] = true;
    bare_of[k] = i;
  }
  w_.resize(d, d);
  e_.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    if (bare_of[k] < 0) throw AssignmentAmbiguity("could not label the idle eigenbasis");
    const Eigen::Index i = bare_of[k];
    const cplx ov = es.eigenvectors()(i, k);
    w_.col(i) = es.eigenvectors().col(k) * (std::abs(ov) > 0 ? std::conj(ov) / std::abs(ov) : cplx(1.0));
    e_(i) = es.eigenvalues()(k);
  }
  m1_ = w_.adjoint() * n_c1_.cast<cplx>().asDiagonal() * w_;
  m2_ = w_.adjoint() * n_c2_.cast<cplx>().asDiagonal() * w_;
  std::vector<Eigen::Triplet<cplx>> trips;
  const double tol = 1e-13;
  for (Eigen::Index c = 0; c < m1_.cols(); ++c)
    for (Eigen::Index r = 0; r < m1_.rows(); ++r)
      if (r != c && (std::abs(m1_(r, c)) > tol || std::abs(m2_(r, c)) > tol)) trips.emplace_back(r, c, cplx(1.0));
  o_pattern_ = SpMat(m1_.rows(), m1_.cols());
  o_pattern_.setFromTriplets(trips.begin(), trips.end());
  o_pattern_.makeCompressed();
  o1_vals_.resize(o_pattern_.nonZeros());
  o2_vals_.resize(o_pattern_.nonZeros());
  for (Eigen::Index r = 0; r < o_pattern_.outerSize(); ++r)
    for (auto q = o_pattern_.outerIndexPtr()[r]; q < o_pattern_.outerIndexPtr()[r + 1]; ++q) {
      o1_vals_[q] = m1_(r, o_pattern_.innerIndexPtr()[q]);
      o2_vals_[q] = m2_(r, o_pattern_.innerIndexPtr()[q]);
    }
  // terms below 1e-6 of the pulse amplitude are left out of the step bound
  for (Eigen::Index c = 0; c < m1_.cols(); ++c)
    for (Eigen::Index r = 0; r < m1_.rows(); ++r)
      if (r != c && (std::abs(m1_(r, c)) > 1e-6 || std::abs(m2_(r, c)) > 1e-6))
        fast_dressed_ = std::max(fast_dressed_, std::abs(e_(r) - e_(c)) * 1e-3);
  for (Eigen::Index r = 0; r < v_.outerSize(); ++r)
    for (SpMat::InnerIterator it(v_, r); it; ++it)
      fast_bare_ = std::max(fast_bare_, std::abs(bare_(it.row()) - bare_(it.col())) * 1e-3);
}

std::size_t Evolver::step_count(const PulseSchedule& schedule, double t_span, bool dressed) const {
  check_span(t_span);
  if (t_span == 0.0) return 0;
  double shift = 0.0;
  if (!schedule.empty())
    for (Site c : kCouplers)
      for (double t = 0.0; t <= t_span; t += 0.5) shift = std::max(shift, std::abs(detuning_ghz(schedule, device_, c, t)));
  const double rate = (dressed ? fast_dressed_ : fast_bare_) + ghz_to_angular(shift) * 1e-3;
  // the bare-picture integrand carries couplings at full strength, so it gets half the phase budget
  const double budget = dressed ? opts_.max_step_phase : 0.5 * opts_.max_step_phase;
  double h = opts_.dt;
  if (rate > 0.0 && budget > 0.0) h = std::min(h, budget / rate);
  return static_cast<std::size_t>(std::ceil(t_span / h - 1e-9));
}

RVec Evolver::diagonal_phase(const PulseSchedule& schedule, double t) const {
  double th1 = 0.0;
  double th2 = 0.0;
  if (t > 0.0) {
    const std::size_t panels = static_cast<std::size_t>(std::ceil(t / 0.05));
    const double step = t / panels;
    th1 = coupler_phase_grid(schedule, device_, Site::C1, step, panels + 1).back();
    th2 = coupler_phase_grid(schedule, device_, Site::C2, step, panels + 1).back();
  }
  return bare_ * (t * 1e-3) + n_c1_ * th1 + n_c2_ * th2;
}

CMat Evolver::hamiltonian(const PulseSchedule& schedule, double t) const {
  const double d1 = ghz_to_angular(detuning_ghz(schedule, device_, Site::C1, t));
  const double d2 = ghz_to_angular(detuning_ghz(schedule, device_, Site::C2, t));
  CMat h = CMat(v_);
  const RVec diag = bare_ + n_c1_ * d1 + n_c2_ * d2;
  h.diagonal() += diag.cast<cplx>();
  return h;
}

std::string Evolver::state_label(std::size_t i) const {
  std::string s;
  for (int v : space_.state(i)) s += static_cast<char>('0' + v);
  return s;
}

CVec Evolver::basis_state(const Occupation& occ) const {
  const long idx = space_.index_of(occ);
  if (idx < 0) throw InvalidArgument("basis state outside the simulated space");
  CVec v = CVec::Zero(space_.dim());
  v(idx) = 1.0;
  return v;
}

CMat Evolver::integrate_columns(const PulseSchedule& schedule, CMat c, double t_span, PopulationTrace* trace) const {
  if (opts_.picture == SimOptions::Picture::dressed) return integrate_dressed(schedule, std::move(c), t_span, trace);
  return integrate_bare(schedule, std::move(c), t_span, trace);
}

CMat Evolver::evolve_dressed_frame(const PulseSchedule& schedule, const CMat& columns, double t_span) const {
  if (columns.rows() != static_cast<Eigen::Index>(space_.dim()))
    throw DimensionMismatch("column dimension does not match the simulated space");
  return integrate_dressed(schedule, columns, t_span, nullptr, true);
}

CMat Evolver::integrate_dressed(const PulseSchedule& schedule, CMat c, double t_span, PopulationTrace* trace,
                                bool rotating_io) const {
  const std::size_t n = step_count(schedule, t_span, true);
  const double h = n ? t_span / n : 0.0;
  const auto th1 = coupler_phase_grid(schedule, device_, Site::C1, 0.5 * h, 2 * n + 1);
  const auto th2 = coupler_phase_grid(schedule, device_, Site::C2, 0.5 * h, 2 * n + 1);
  const RVec d1 = m1_.diagonal().real();
  const RVec d2 = m2_.diagonal().real();
  const bool pulsed = !schedule.empty();
  auto phase = [&](std::size_t k) -> CVec {
    const RVec phi = e_ * (0.5 * h * k * 1e-3) + d1 * th1[k] + d2 * th2[k];
    CVec p(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) p(i) = std::polar(1.0, phi(i));
    return p;
  };
  // off-diagonal pulse operators on a shared sparsity pattern
  SpMat gen(o_pattern_);
  auto generator = [&](std::size_t k) -> const SpMat& {
    const double t = 0.5 * h * k;
    const double a1 = ghz_to_angular(detuning_ghz(schedule, device_, Site::C1, t));
    const double a2 = ghz_to_angular(detuning_ghz(schedule, device_, Site::C2, t));
    const CVec p = phase(k);
    cplx* val = gen.valuePtr();
    const auto* outer = gen.outerIndexPtr();
    const auto* inner = gen.innerIndexPtr();
    for (Eigen::Index row = 0; row < gen.outerSize(); ++row) {
      const cplx pr = cplx(0.0, -1e-3) * p(row);
      for (auto q = outer[row]; q < outer[row + 1]; ++q)
        val[q] = (a1 * o1_vals_[q] + a2 * o2_vals_[q]) * pr * std::conj(p(inner[q]));
    }
    return gen;
  };
  if (!rotating_io) c = w_.adjoint() * c;
  const std::size_t every =
      opts_.sample_interval > 0 && h > 0 ? std::max<std::size_t>(1, std::llround(opts_.sample_interval / h)) : 1;
  auto record = [&](std::size_t step) {
    if (!trace) return;
    const CVec p = phase(2 * step);
    const CVec psi = w_ * (p.conjugate().asDiagonal() * c.col(0));
    trace->times.push_back(step * h);
    trace->populations.push_back(psi.cwiseAbs2());
  };
  record(0);
  if (pulsed) {
    for (std::size_t j = 0; j < n; ++j) {
      const CMat k1 = generator(2 * j) * c;
      const SpMat& gm = generator(2 * j + 1);
      const CMat k2 = gm * (c + (0.5 * h) * k1);
      const CMat k3 = gm * (c + (0.5 * h) * k2);
      const CMat k4 = generator(2 * j + 2) * (c + h * k3);
      c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if ((j + 1) % every == 0 || j + 1 == n) record(j + 1);
    }
  } else if (trace) {
    for (std::size_t j = 0; j < n; ++j)
      if ((j + 1) % every == 0 || j + 1 == n) record(j + 1);
  }
  if (rotating_io) {
    CVec p(e_.size());
    for (Eigen::Index i = 0; i < e_.size(); ++i) p(i) = std::polar(1.0, -(d1(i) * th1.back() + d2(i) * th2.back()));
    return p.asDiagonal() * c;
  }
  return w_ * (phase(2 * n).conjugate().asDiagonal() * c);
}

CMat Evolver::integrate_bare(const PulseSchedule& schedule, CMat c, double t_span, PopulationTrace* trace) const {
  const std::size_t n = step_count(schedule, t_span, false);
  const double h = n ? t_span / n : 0.0;
  const auto th1 = coupler_phase_grid(schedule, device_, Site::C1, 0.5 * h, 2 * n + 1);
  const auto th2 = coupler_phase_grid(schedule, device_, Site::C2, 0.5 * h, 2 * n + 1);
  auto phase = [&](std::size_t k) -> CVec {
    const RVec phi = bare_ * (0.5 * h * k * 1e-3) + n_c1_ * th1[k] + n_c2_ * th2[k];
    CVec p(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) p(i) = std::polar(1.0, phi(i));
    return p;
  };
  const cplx scale(0.0, -1e-3);
  CMat tmp(c.rows(), c.cols());
  auto rhs = [&](const CVec& p, const CMat& x) -> CMat {
    tmp.noalias() = p.conjugate().asDiagonal() * x;
    CMat y = v_ * tmp;
    return scale * (p.asDiagonal() * y);
  };
  const std::size_t every =
      opts_.sample_interval > 0 && h > 0 ? std::max<std::size_t>(1, std::llround(opts_.sample_interval / h)) : 1;
  auto record = [&](std::size_t step) {
    if (!trace) return;
    trace->times.push_back(step * h);
    trace->populations.push_back(c.col(0).cwiseAbs2());
  };
  record(0);
  CVec p0 = phase(0);
  for (std::size_t j = 0; j < n; ++j) {
    const CVec pm = phase(2 * j + 1);
    const CVec p1 = phase(2 * j + 2);
    const CMat k1 = rhs(p0, c);
    const CMat k2 = rhs(pm, c + (0.5 * h) * k1);
    const CMat k3 = rhs(pm, c + (0.5 * h) * k2);
    const CMat k4 = rhs(p1, c + h * k3);
    c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    p0 = p1;
    if ((j + 1) % every == 0 || j + 1 == n) record(j + 1);
  }
  return p0.conjugate().asDiagonal() * c;
}

EvolutionResult Evolver::evolve_state(const PulseSchedule& schedule, const CVec& psi0, double t_span) const {
  if (psi0.size() != static_cast<Eigen::Index>(space_.dim()))
    throw DimensionMismatch("initial state dimension does not match the simulated space");
  if (std::abs(psi0.norm() - 1.0) > 1e-8) throw InvalidArgument("initial state is not normalized");
  EvolutionResult r;
  const std::size_t n = step_count(schedule, t_span, opts_.picture == SimOptions::Picture::dressed);
  r.dt_used = n ? t_span / n : 0.0;
  r.state = integrate_columns(schedule, psi0, t_span, opts_.record_trace ? &r.trace : nullptr).col(0);
  return r;
}

EvolutionResult Evolver::evolve_columns(const PulseSchedule& schedule, const CMat& columns, double t_span) const {
  if (columns.rows() != static_cast<Eigen::Index>(space_.dim()))
    throw DimensionMismatch("column dimension does not match the simulated space");
  EvolutionResult r;
  const std::size_t n = step_count(schedule, t_span, opts_.picture == SimOptions::Picture::dressed);
  r.dt_used = n ? t_span / n : 0.0;
  r.propagator = integrate_columns(schedule, columns, t_span, opts_.record_trace ? &r.trace : nullptr);
  return r;
}

EvolutionResult Evolver::evolve_propagator(const PulseSchedule& schedule, double t_span) const {
  return evolve_columns(schedule, CMat::Identity(space_.dim(), space_.dim()), t_span);
}

EvolutionResult Evolver::evolve_lindblad(const PulseSchedule& schedule, const NoiseSpec& noise, const CMat& rho0,
                                         double t_span) const {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (rho0.rows() != d || rho0.cols() != d)
    throw DimensionMismatch("density matrix dimension does not match the simulated space");
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(rho0.trace().real() - 1.0) > 1e-8) throw InvalidArgument("density matrix trace is not 1");
  if (Eigen::SelfAdjointEigenSolver<CMat>(rho0, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() < -1e-8)
    throw InvalidArgument("density matrix is not positive semidefinite");
  noise.validate();

  // Decay: per site, index of the state with one more excitation and the ladder amplitude.
  struct Decay {
    double gamma;
    std::vector<long> up;
    std::vector<double> amp;
  };
  std::vector<Decay> decays;
  RMat rates = RMat::Zero(d, d);
  for (int s = 0; s < kNumSites; ++s) {
    const Site site = static_cast<Site>(s);
    const double t1 = noise.t1_us.at(site) * 1e3;
    const double t2 = noise.t2_us.at(site) * 1e3;
    const RVec nn = number_diagonal(space_, site);
    Decay dec{1.0 / t1, std::vector<long>(d, -1), std::vector<double>(d, 0.0)};
    for (Eigen::Index r = 0; r < d; ++r) {
      Occupation occ = space_.state(r);
      occ[s] += 1;
      const long u = space_.index_of(occ);
      if (u >= 0) {
        dec.up[r] = u;
        dec.amp[r] = std::sqrt(static_cast<double>(occ[s]));
      }
    }
    double kappa = 0.0;
    RVec k;
    if (opts_.dephasing == Dephasing::as_printed) {
      kappa = 1.0 / (2.0 * t2);
      k = RVec::Ones(d) - nn;
    } else {
      kappa = std::max(0.0, 2.0 * (1.0 / t2 - 0.5 / t1));
      k = nn;
    }
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c)
        rates(r, c) += 0.5 * dec.gamma * (nn(r) + nn(c)) + 0.5 * kappa * (k(r) - k(c)) * (k(r) - k(c));
    decays.push_back(std::move(dec));
  }

  const std::size_t n = step_count(schedule, t_span, false);
  const double h = n ? t_span / n : 0.0;
  const auto th1 = coupler_phase_grid(schedule, device_, Site::C1, 0.5 * h, 2 * n + 1);
  const auto th2 = coupler_phase_grid(schedule, device_, Site::C2, 0.5 * h, 2 * n + 1);
  auto phase = [&](std::size_t k) -> CVec {
    const RVec phi = bare_ * (0.5 * h * k * 1e-3) + n_c1_ * th1[k] + n_c2_ * th2[k];
    CVec p(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) p(i) = std::polar(1.0, phi(i));
    return p;
  };
  const cplx mi(0.0, -1e-3);
  CMat y(d, d);
  CMat out(d, d);
  auto rhs = [&](const CVec& p, const CMat& x) -> CMat {
    // to the frame without the diagonal phase: y = P^dag x P
    for (Eigen::Index c = 0; c < d; ++c)
      for (Eigen::Index r = 0; r < d; ++r) y(r, c) = x(r, c) * std::conj(p(r)) * p(c);
    out.noalias() = v_ * y;
    CMat comm = mi * (out - out.adjoint());
    for (Eigen::Index c = 0; c < d; ++c)
      for (Eigen::Index r = 0; r < d; ++r) comm(r, c) -= rates(r, c) * y(r, c);
    for (const auto& dec : decays) {
      for (Eigen::Index c = 0; c < d; ++c) {
        const long uc = dec.up[c];
        if (uc < 0) continue;
        for (Eigen::Index r = 0; r < d; ++r) {
          const long ur = dec.up[r];
          if (ur < 0) continue;
          comm(r, c) += dec.gamma * dec.amp[r] * dec.amp[c] * y(ur, uc);
        }
      }
    }
    for (Eigen::Index c = 0; c < d; ++c)
      for (Eigen::Index r = 0; r < d; ++r) comm(r, c) *= p(r) * std::conj(p(c));
    return comm;
  };

  EvolutionResult res;
  res.dt_used = h;
  const std::size_t every =
      opts_.sample_interval > 0 && h > 0 ? std::max<std::size_t>(1, std::llround(opts_.sample_interval / h)) : 1;
  CMat rho = rho0;
  auto record = [&](std::size_t step) {
    if (!opts_.record_trace) return;
    res.trace.times.push_back(step * h);
    res.trace.populations.push_back(rho.diagonal().real());
  };
  record(0);
  CVec p0 = phase(0);
  for (std::size_t j = 0; j < n; ++j) {
    const CVec pm = phase(2 * j + 1);
    const CVec p1 = phase(2 * j + 2);
    const CMat k1 = rhs(p0, rho);
    const CMat k2 = rhs(pm, rho + (0.5 * h) * k1);
    const CMat k3 = rhs(pm, rho + (0.5 * h) * k2);
    const CMat k4 = rhs(p1, rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    p0 = p1;
    if ((j + 1) % every == 0 || j + 1 == n) record(j + 1);
  }
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) rho(r, c) *= std::conj(p0(r)) * p0(c);
  res.rho = 0.5 * (rho + rho.adjoint());
  return res;
}

CMat expm_hermitian(const CMat& h, double t_ns) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  const RVec& ev = es.eigenvalues();
  CVec ph(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) ph(i) = std::polar(1.0, -ev(i) * t_ns * 1e-3);
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

CVec evolve_piecewise_expm(const Evolver& ev, const PulseSchedule& schedule, const CVec& psi0, double t_span,
                           double dt) {
  check_dt(dt);
  check_span(t_span);
  const std::size_t n = t_span == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t_span / dt - 1e-9));
  const double h = n ? t_span / n : 0.0;
  CVec psi = psi0;
  if (schedule.empty()) {
    if (n) psi = expm_hermitian(ev.hamiltonian(schedule, 0.0), t_span) * psi;
    return psi;
  }
  for (std::size_t j = 0; j < n; ++j) psi = expm_hermitian(ev.hamiltonian(schedule, (j + 0.5) * h), h) * psi;
  return psi;
}

ThreeExcitationTrace three_excitation_model(double g12_mhz, double g23_mhz, double g13_mhz,
                                            const FrequencyProfile& omegas_ghz,
                                            const std::array<double, 3>& alphas_mhz, double t_span, double dt,
                                            double sample_interval, int initial) {
  check_dt(dt);
  check_span(t_span);
  if (initial < 0 || initial >= 7) throw InvalidArgument("initial three-excitation state index out of range");
  const double g12 = mhz_to_angular(g12_mhz);
  const double g23 = mhz_to_angular(g23_mhz);
  const double g13 = mhz_to_angular(g13_mhz);
  const double r2 = std::sqrt(2.0);
  // basis 210, 201, 120, 111, 102, 021, 012
  Eigen::Matrix<double, 7, 7> off;
  off << 0, -g23, -2 * g12, -r2 * g13, 0, 0, 0,
         -g23, 0, 0, -r2 * g12, -2 * g13, 0, 0,
         -2 * g12, 0, 0, -r2 * g23, 0, -g13, 0,
         -r2 * g13, -r2 * g12, -r2 * g23, 0, -r2 * g23, -r2 * g12, -r2 * g13,
         0, -2 * g13, 0, -r2 * g23, 0, 0, -g12,
         0, 0, -g13, -r2 * g12, 0, 0, -2 * g23,
         0, 0, 0, -r2 * g13, -g12, -2 * g23, 0;
  const double a1 = mhz_to_angular(alphas_mhz[0]);
  const double a2 = mhz_to_angular(alphas_mhz[1]);
  const double a3 = mhz_to_angular(alphas_mhz[2]);
  auto hamiltonian = [&](double t) {
    const auto w = omegas_ghz(t);
    const double w1 = ghz_to_angular(w[0]);
    const double w2 = ghz_to_angular(w[1]);
    const double w3 = ghz_to_angular(w[2]);
    CMat h = off.cast<cplx>();
    const double diag[7] = {2 * w1 + a1 + w2, 2 * w1 + a1 + w3, 2 * w2 + a2 + w1, w1 + w2 + w3,
                            2 * w3 + a3 + w1, 2 * w2 + a2 + w3, 2 * w3 + a3 + w2};
    for (int i = 0; i < 7; ++i) h(i, i) = diag[i];
    return h;
  };

  ThreeExcitationTrace out;
  const std::size_t n = t_span == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t_span / dt - 1e-9));
  const double h = n ? t_span / n : 0.0;
  const std::size_t every = sample_interval > 0 && h > 0 ? std::max<std::size_t>(1, std::llround(sample_interval / h)) : 1;
  CVec psi = CVec::Zero(7);
  psi(initial) = 1.0;
  auto record = [&](std::size_t step) {
    out.times.push_back(step * h);
    std::array<double, 7> pop{};
    for (int i = 0; i < 7; ++i) pop[i] = std::norm(psi(i));
    out.populations.push_back(pop);
  };
  record(0);
  for (std::size_t j = 0; j < n; ++j) {
    CMat hm = hamiltonian((j + 0.5) * h);
    // remove the common energy so the exponent stays small
    const cplx ref = hm(3, 3);
    hm.diagonal().array() -= ref;
    psi = expm_hermitian(hm, h) * psi;
    if ((j + 1) % every == 0 || j + 1 == n) record(j + 1);
  }
  return out;
}

}  // namespace ccz
