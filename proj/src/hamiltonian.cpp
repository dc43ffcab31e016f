#include "cczsim/hamiltonian.hpp"

#include <cmath>
#include <numeric>

namespace ccz {

CMat annihilation_operator(int levels) {
  if (levels < 2) throw InvalidDimension("annihilation operator needs levels >= 2");
  CMat b = CMat::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
  return b;
}

CMat embed_operator(const CMat& op, Site site, const DeviceModel& device) {
  const int target = site_index(site);
  const auto lv = device.levels();
  if (op.rows() != lv[target] || op.cols() != lv[target])
    throw DimensionMismatch("operator dimension does not match levels of " + site_name(site));
  CMat out = CMat::Identity(1, 1);
  for (int i = 0; i < kNumSites; ++i) {
    const CMat factor = (i == target) ? op : CMat::Identity(lv[i], lv[i]);
    CMat next(out.rows() * factor.rows(), out.cols() * factor.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c)
        next.block(r * factor.rows(), c * factor.cols(), factor.rows(), factor.cols()) = out(r, c) * factor;
    out = std::move(next);
  }
  return out;
}

CMat build_bare_hamiltonian(const DeviceModel& device) {
  FockSpace space(device);
  return bare_diagonal(device, space).cast<cplx>().asDiagonal();
}

CMat build_interaction(const DeviceModel& device, Frame frame) {
  FockSpace space(device);
  return CMat(interaction_sparse(device, space, frame));
}

FockSpace::FockSpace(const DeviceModel& device, std::optional<int> max_excitations)
    : levels_(device.levels()), cap_(max_excitations) {
  const std::size_t full = device.hilbert_dim();
  full_to_sub_.assign(full, -1);
  Occupation occ{};
  for (std::size_t idx = 0; idx < full; ++idx) {
    std::size_t rem = idx;
    for (int s = kNumSites - 1; s >= 0; --s) {
      occ[s] = static_cast<int>(rem % levels_[s]);
      rem /= levels_[s];
    }
    const int n = std::accumulate(occ.begin(), occ.end(), 0);
    if (cap_ && n > *cap_) continue;
    full_to_sub_[idx] = static_cast<long>(states_.size());
    states_.push_back(occ);
  }
}

std::size_t FockSpace::full_index(const Occupation& occ) const {
  std::size_t idx = 0;
  for (int s = 0; s < kNumSites; ++s) idx = idx * levels_[s] + occ[s];
  return idx;
}

long FockSpace::index_of(const Occupation& occ) const {
  for (int s = 0; s < kNumSites; ++s)
    if (occ[s] < 0 || occ[s] >= levels_[s]) return -1;
  return full_to_sub_[full_index(occ)];
}

int FockSpace::excitations(std::size_t i) const {
  return std::accumulate(states_[i].begin(), states_[i].end(), 0);
}

long FockSpace::computational_index(int q1, int q2, int q3) const {
  Occupation occ{};
  occ[site_index(Site::Q1)] = q1;
  occ[site_index(Site::Q2)] = q2;
  occ[site_index(Site::Q3)] = q3;
  return index_of(occ);
}

std::array<long, 8> FockSpace::computational_indices() const {
  std::array<long, 8> out{};
  for (int k = 0; k < 8; ++k) out[k] = computational_index((k >> 2) & 1, (k >> 1) & 1, k & 1);
  return out;
}

RVec bare_diagonal(const DeviceModel& device, const FockSpace& space) {
  RVec d(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) {
    double e = 0.0;
    for (int s = 0; s < kNumSites; ++s) {
      const auto& t = device.transmons()[s];
      const double n = space.state(i)[s];
      e += ghz_to_angular(t.frequency_ghz) * n + 0.5 * mhz_to_angular(t.anharmonicity_mhz) * n * (n - 1.0);
    }
    d(i) = e;
  }
  return d;
}

RVec number_diagonal(const FockSpace& space, Site site) {
  RVec d(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) d(i) = space.state(i)[site_index(site)];
  return d;
}

namespace {

// Applies a (raise/lower) ladder operator to one site of an occupation.
// Returns the amplitude, or 0 when the result leaves the truncation.
double ladder(Occupation& occ, int site, bool raise, const std::array<int, kNumSites>& levels) {
  if (raise) {
    if (occ[site] + 1 >= levels[site]) return 0.0;
    occ[site] += 1;
    return std::sqrt(static_cast<double>(occ[site]));
  }
  if (occ[site] == 0) return 0.0;
  const double amp = std::sqrt(static_cast<double>(occ[site]));
  occ[site] -= 1;
  return amp;
}

}  // namespace

SpMat interaction_sparse(const DeviceModel& device, const FockSpace& space, Frame frame) {
  struct Term {
    bool raise_j;
    bool raise_k;
    double sign;
  };
  // g (b_j^dag - b_j)(b_k - b_k^dag) expanded; rwa keeps the two hopping terms.
  const std::vector<Term> full_terms{{true, false, 1.0}, {true, true, -1.0}, {false, false, -1.0}, {false, true, 1.0}};
  const std::vector<Term> rwa_terms{{true, false, 1.0}, {false, true, 1.0}};
  const auto& terms = frame == Frame::full ? full_terms : rwa_terms;

  std::vector<Eigen::Triplet<cplx>> trips;
  const auto& lv = space.levels();
  for (const auto& e : device.couplings().edges()) {
    if (e.g_mhz == 0.0) continue;
    const double g = mhz_to_angular(e.g_mhz);
    const int j = site_index(e.a);
    const int k = site_index(e.b);
    for (std::size_t col = 0; col < space.dim(); ++col) {
      for (const auto& t : terms) {
        Occupation occ = space.state(col);
        // operator order: b_j-part acts after b_k-part; both commute (distinct sites)
        const double ak = ladder(occ, k, t.raise_k, lv);
        if (ak == 0.0) continue;
        const double aj = ladder(occ, j, t.raise_j, lv);
        if (aj == 0.0) continue;
        const long row = space.index_of(occ);
        if (row < 0) continue;
        trips.emplace_back(row, static_cast<long>(col), cplx(t.sign * g * aj * ak, 0.0));
      }
    }
  }
  SpMat v(space.dim(), space.dim());
  v.setFromTriplets(trips.begin(), trips.end());
  return v;
}

SpMat annihilation_sparse(const FockSpace& space, Site site) {
  std::vector<Eigen::Triplet<cplx>> trips;
  const int s = site_index(site);
  for (std::size_t col = 0; col < space.dim(); ++col) {
    Occupation occ = space.state(col);
    const double a = ladder(occ, s, false, space.levels());
    if (a == 0.0) continue;
    const long row = space.index_of(occ);
    if (row >= 0) trips.emplace_back(row, static_cast<long>(col), cplx(a, 0.0));
  }
  SpMat b(space.dim(), space.dim());
  b.setFromTriplets(trips.begin(), trips.end());
  return b;
}

}  // namespace ccz
