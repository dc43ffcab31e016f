#include "cczsim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace ccz {

namespace {

Mat2 pauli(int a) {
  switch (a) {
    case 0: return Mat2::Identity();
    case 1: return gates::x();
    case 2: return gates::y();
    default: return gates::z();
  }
}

Mat8 kron3(const Mat2& a, const Mat2& b, const Mat2& c) {
  Mat8 out;
  for (int r = 0; r < 8; ++r)
    for (int s = 0; s < 8; ++s) out(r, s) = a(r >> 2, s >> 2) * b((r >> 1) & 1, (s >> 1) & 1) * c(r & 1, s & 1);
  return out;
}

const std::array<Mat8, 64>& pauli_table() {
  static const std::array<Mat8, 64> table = [] {
    std::array<Mat8, 64> t;
    for (int m = 0; m < 64; ++m) t[m] = kron3(pauli(m >> 4), pauli((m >> 2) & 3), pauli(m & 3));
    return t;
  }();
  return table;
}

struct Prep {
  const char* label;
  Eigen::Vector2cd state;
};

std::vector<Prep> preparations(ProbeKind kind) {
  const Eigen::Vector2cd zero(1.0, 0.0);
  std::vector<Prep> p{{"I", zero},
                      {"X", gates::rx(kPi) * zero},
                      {"X/2", gates::rx(kPi / 2) * zero},
                      {"Y/2", gates::ry(kPi / 2) * zero}};
  if (kind == ProbeKind::probe216) {
    p.push_back({"-X/2", gates::rx(-kPi / 2) * zero});
    p.push_back({"-Y/2", gates::ry(-kPi / 2) * zero});
  }
  return p;
}

Eigen::Matrix<cplx, 64, 1> vec(const Mat8& m) { return Eigen::Map<const Eigen::Matrix<cplx, 64, 1>>(m.data()); }

ReducedState reduce_weighted(Mat8 block, double total) {
  const double kept = block.trace().real();
  ReducedState out;
  out.leakage = total > 0 ? std::clamp(1.0 - kept / total, 0.0, 1.0) : 1.0;
  if (out.leakage > 0.5) throw DominanceError("more than half the state lies outside the computational subspace");
  out.rho = block / kept;
  return out;
}

}  // namespace

ProbeSet ProbeSet::make(ProbeKind kind) {
  ProbeSet set;
  set.kind = kind;
  const auto preps = preparations(kind);
  for (const auto& a : preps)
    for (const auto& b : preps)
      for (const auto& c : preps) {
        Vec8 v;
        for (int k = 0; k < 8; ++k) v(k) = a.state(k >> 2) * b.state((k >> 1) & 1) * c.state(k & 1);
        set.probes.push_back({std::string(a.label) + "," + b.label + "," + c.label, v});
      }
  return set;
}

ReducedState reduce_to_computational(const GateSimulator& sim, const CVec& psi) {
  return reduce_weighted(sim.project_rho(psi * psi.adjoint()), psi.squaredNorm());
}

ReducedState reduce_to_computational(const GateSimulator& sim, const CMat& rho) {
  return reduce_weighted(sim.project_rho(rho), rho.trace().real());
}

Channel unitary_channel(const Mat8& u) {
  return [u](const Mat8& rho) { return ReducedState{u * rho * u.adjoint(), 0.0}; };
}

Channel pulse_channel(const GateSimulator& sim, const PulseSchedule& schedule, SimMode mode) {
  if (mode == SimMode::ideal) {
    auto cols = std::make_shared<const CMat>(sim.logical_columns(schedule));
    return [&sim, cols](const Mat8& rho) {
      const CMat full = *cols * rho * cols->adjoint();
      return reduce_to_computational(sim, full);
    };
  }
  return [&sim, schedule](const Mat8& rho) {
    return reduce_to_computational(sim, sim.run_lindblad(schedule, sim.embed(rho)));
  };
}

Channel mix_channels(Channel a, Channel b, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("mixture weight must lie in [0, 1]");
  return [a = std::move(a), b = std::move(b), p](const Mat8& rho) {
    const ReducedState ra = a(rho);
    const ReducedState rb = b(rho);
    return ReducedState{p * ra.rho + (1 - p) * rb.rho, p * ra.leakage + (1 - p) * rb.leakage};
  };
}

std::string pauli_label(int m) {
  if (m < 0 || m >= 64) throw InvalidArgument("Pauli index must lie in [0, 64)");
  static const char letters[] = "IXYZ";
  return {letters[m >> 4], letters[(m >> 2) & 3], letters[m & 3]};
}

Mat8 pauli_string(int m) {
  if (m < 0 || m >= 64) throw InvalidArgument("Pauli index must lie in [0, 64)");
  return pauli_table()[m];
}

double ChiMatrix::purity_ratio() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (entries + entries.adjoint()));
  return es.eigenvalues().maxCoeff() / trace();
}

ChiMatrix qpt(const Channel& channel, const ProbeSet& probes) {
  const Eigen::Index k = static_cast<Eigen::Index>(probes.size());
  CMat in(k, 64), out(k, 64);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Vec8& psi = probes.probes[i].state;
    const Mat8 rho = psi * psi.adjoint();
    in.row(i) = vec(rho).transpose();
    out.row(i) = vec(channel(rho).rho).transpose();
  }
  // S in = out, solved row-wise as in^T S^T = out^T
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(in);
  if (cod.rank() < 64) throw RankError("probe states are not informationally complete");
  const CMat st = cod.solve(out);  // 64 x 64, S^T
  const CMat s = st.transpose();

  // Choi matrix J = sum_ij |i><j| (x) L(|i><j|)
  CMat choi(64, 64);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const CVec col = s.col(i + 8 * j);
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) choi(i * 8 + a, j * 8 + b) = col(a + 8 * b);
    }
  // |E_m>> = sum_i |i> (x) E_m |i>
  CMat basis(64, 64);
  for (int m = 0; m < 64; ++m) {
    const Mat8& e = pauli_table()[m];
    for (int i = 0; i < 8; ++i)
      for (int a = 0; a < 8; ++a) basis(i * 8 + a, m) = e(a, i);
  }
  ChiMatrix chi;
  chi.entries = basis.adjoint() * choi * basis / 64.0;
  return chi;
}

ChiMatrix ideal_chi(const Mat8& u) {
  if ((u.adjoint() * u - Mat8::Identity()).cwiseAbs().maxCoeff() > 1e-8)
    throw InvalidArgument("ideal_chi needs a unitary matrix");
  CVec c(64);
  for (int m = 0; m < 64; ++m) c(m) = (pauli_table()[m] * u).trace() / 8.0;
  ChiMatrix chi;
  chi.entries = c * c.adjoint();
  return chi;
}

double process_fidelity(const ChiMatrix& a, const ChiMatrix& b) {
  if (a.entries.rows() != b.entries.rows() || a.entries.cols() != b.entries.cols())
    throw DimensionMismatch("chi matrices have different shapes");
  return (a.entries * b.entries).trace().real();
}

std::string chi_to_csv(const ChiMatrix& chi) {
  std::ostringstream os;
  os << "# basis: Pauli strings, lexicographic in (I,X,Y,Z), q1 slowest\nrow";
  for (int n = 0; n < 64; ++n) os << ',' << pauli_label(n) << "_re," << pauli_label(n) << "_im";
  os << '\n';
  for (int m = 0; m < 64; ++m) {
    os << pauli_label(m);
    for (int n = 0; n < 64; ++n)
      os << ',' << format_real(chi.entries(m, n).real()) << ',' << format_real(chi.entries(m, n).imag());
    os << '\n';
  }
  return os.str();
}

RMat ccz_transfer() { return RMat::Identity(8, 8); }

RMat toffoli_transfer() {
  RMat t = RMat::Identity(8, 8);
  // q2 flips when q1 = q3 = 1: |101> <-> |111>
  t(5, 5) = t(7, 7) = 0.0;
  t(5, 7) = t(7, 5) = 1.0;
  return t;
}

double truth_table_visibility(const RMat& probs, const RMat& ideal) {
  if (probs.rows() != 8 || probs.cols() != 8 || ideal.rows() != 8 || ideal.cols() != 8)
    throw DimensionMismatch("truth tables are 8x8");
  return (probs * ideal.transpose()).trace() / 8.0;
}

TruthTable truth_table(const Channel& channel, const RMat& ideal) {
  TruthTable t;
  for (int k = 0; k < 8; ++k) {
    Mat8 rho = Mat8::Zero();
    rho(k, k) = 1.0;
    const Mat8 out = channel(rho).rho;
    for (int j = 0; j < 8; ++j) t.probs(k, j) = std::max(out(j, j).real(), 0.0);
  }
  t.visibility = truth_table_visibility(t.probs, ideal);
  return t;
}

std::string truth_table_to_csv(const TruthTable& table) {
  std::ostringstream os;
  os << "input";
  for (int j = 0; j < 8; ++j) os << ",p" << ((j >> 2) & 1) << ((j >> 1) & 1) << (j & 1);
  os << '\n';
  for (int k = 0; k < 8; ++k) {
    os << ((k >> 2) & 1) << ((k >> 1) & 1) << (k & 1);
    for (int j = 0; j < 8; ++j) os << ',' << format_real(table.probs(k, j));
    os << '\n';
  }
  os << "# visibility," << format_real(table.visibility) << '\n';
  return os.str();
}

double average_state_fidelity(const Channel& channel, const ProbeSet& probes, const Mat8& ideal) {
  if (probes.probes.empty()) throw InvalidArgument("probe set is empty");
  double sum = 0.0;
  for (const auto& p : probes.probes) {
    const Vec8 target = ideal * p.state;
    const Mat8 out = channel(p.state * p.state.adjoint()).rho;
    sum += (target.adjoint() * out * target)(0, 0).real();
  }
  return sum / static_cast<double>(probes.size());
}

RMat readout_matrix(const NoiseSpec& noise) {
  std::array<Eigen::Matrix2d, 3> m;
  for (int q = 0; q < 3; ++q) {
    const Site s = qubit_site(q);
    const auto f0 = noise.readout_f0.find(s);
    const auto f1 = noise.readout_f1.find(s);
    const double a = f0 == noise.readout_f0.end() ? 1.0 : f0->second;
    const double b = f1 == noise.readout_f1.end() ? 1.0 : f1->second;
    m[q] << a, 1 - b, 1 - a, b;
  }
  RMat out(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) out(r, c) = m[0](r >> 2, c >> 2) * m[1]((r >> 1) & 1, (c >> 1) & 1) * m[2](r & 1, c & 1);
  return out;
}

RVec readout_channel(const RVec& probs, const NoiseSpec& noise) {
  if (probs.size() != 8) throw InvalidArgument("readout channel needs 8 probabilities");
  if (probs.minCoeff() < -1e-12 || std::abs(probs.sum() - 1.0) > 1e-9)
    throw InvalidArgument("readout channel input is not a probability vector");
  return readout_matrix(noise) * probs;
}

std::array<std::int64_t, 8> sample_counts(const RVec& probs, std::int64_t shots, std::mt19937_64& rng) {
  if (shots <= 0) throw InvalidArgument("shot count must be positive");
  std::vector<double> w(probs.data(), probs.data() + probs.size());
  for (double& x : w) x = std::max(x, 0.0);
  std::discrete_distribution<int> dist(w.begin(), w.end());
  std::array<std::int64_t, 8> counts{};
  for (std::int64_t s = 0; s < shots; ++s) ++counts[dist(rng)];
  return counts;
}

Mat8 sampled_state_tomography(const Mat8& rho, const NoiseSpec& noise, const SamplingOptions& opts,
                              std::mt19937_64& rng) {
  // basis changes mapping X and Y eigenbases onto Z
  const Mat2 sdg = (Mat2() << 1, 0, 0, cplx(0, -1)).finished();
  const std::array<Mat2, 3> rot{gates::h(), gates::h() * sdg, Mat2::Identity()};
  const RMat conf = readout_matrix(noise);
  const RMat conf_inv = conf.inverse();

  std::array<double, 64> sum{};
  std::array<int, 64> hits{};
  for (int setting = 0; setting < 27; ++setting) {
    const std::array<int, 3> b{setting / 9, (setting / 3) % 3, setting % 3};  // 0=X, 1=Y, 2=Z
    const Mat8 u = kron3(rot[b[0]], rot[b[1]], rot[b[2]]);
    const Mat8 r = u * rho * u.adjoint();
    RVec p(8);
    for (int k = 0; k < 8; ++k) p(k) = std::max(r(k, k).real(), 0.0);
    p /= p.sum();
    if (opts.readout_errors) p = conf * p;
    const auto counts = sample_counts(p, opts.shots, rng);
    RVec f(8);
    for (int k = 0; k < 8; ++k) f(k) = static_cast<double>(counts[k]) / static_cast<double>(opts.shots);
    if (opts.readout_errors && opts.correct_readout) f = conf_inv * f;

    for (int m = 0; m < 64; ++m) {
      const std::array<int, 3> a{m >> 4, (m >> 2) & 3, m & 3};
      bool compatible = true;
      for (int q = 0; q < 3; ++q)
        if (a[q] != 0 && a[q] - 1 != b[q]) compatible = false;
      if (!compatible) continue;
      double e = 0.0;
      for (int k = 0; k < 8; ++k) {
        int sign = 1;
        for (int q = 0; q < 3; ++q)
          if (a[q] != 0 && ((k >> (2 - q)) & 1)) sign = -sign;
        e += sign * f(k);
      }
      sum[m] += e;
      ++hits[m];
    }
  }
  Mat8 out = Mat8::Zero();
  for (int m = 0; m < 64; ++m) out += (sum[m] / hits[m]) * pauli_table()[m];
  return out / 8.0;
}

Channel sampled_channel(Channel channel, NoiseSpec noise, SamplingOptions opts) {
  auto rng = std::make_shared<std::mt19937_64>(opts.seed);
  return [channel = std::move(channel), noise = std::move(noise), opts, rng](const Mat8& rho) {
    ReducedState r = channel(rho);
    r.rho = sampled_state_tomography(r.rho, noise, opts, *rng);
    return r;
  };
}

}  // namespace ccz
