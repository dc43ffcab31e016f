#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cczsim/device.hpp"
#include "cczsim/types.hpp"

namespace ccz {

enum class Frame { full, rwa };

/// Truncated bosonic annihilation operator: entry (n-1, n) = sqrt(n).
CMat annihilation_operator(int levels);

/// I (x) ... (x) op (x) ... (x) I in the fixed site ordering.
CMat embed_operator(const CMat& op, Site site, const DeviceModel& device);

/// Dense bare Hamiltonian over the full product space, angular MHz.
CMat build_bare_hamiltonian(const DeviceModel& device);

/// Dense interaction Hamiltonian over the full product space, angular MHz.
CMat build_interaction(const DeviceModel& device, Frame frame);

using Occupation = std::array<int, kNumSites>;

/// Fock basis of the five transmons, optionally restricted to a maximum total
/// excitation number. Basis states keep the order of the full product space.
class FockSpace {
 public:
  explicit FockSpace(const DeviceModel& device, std::optional<int> max_excitations = std::nullopt);

  std::size_t dim() const { return states_.size(); }
  const Occupation& state(std::size_t i) const { return states_[i]; }
  const std::vector<Occupation>& states() const { return states_; }
  /// Index of an occupation, or -1 if it is outside the space.
  long index_of(const Occupation& occ) const;
  std::optional<int> max_excitations() const { return cap_; }
  const std::array<int, kNumSites>& levels() const { return levels_; }
  int excitations(std::size_t i) const;

  /// Index of the bare computational state |q1 q2 q3> with couplers in ground.
  long computational_index(int q1, int q2, int q3) const;
  /// The 8 computational indices, ordered |000>, |001>, ..., |111> (q1 slowest).
  std::array<long, 8> computational_indices() const;

 private:
  std::array<int, kNumSites> levels_;
  std::optional<int> cap_;
  std::vector<Occupation> states_;
  std::vector<long> full_to_sub_;
  std::size_t full_index(const Occupation& occ) const;
};

/// Diagonal of the bare Hamiltonian on a Fock space, angular MHz.
RVec bare_diagonal(const DeviceModel& device, const FockSpace& space);

/// Number operator diagonal for one site.
RVec number_diagonal(const FockSpace& space, Site site);

/// Sparse interaction on a Fock space (terms leaving the space are dropped).
SpMat interaction_sparse(const DeviceModel& device, const FockSpace& space, Frame frame);

/// Sparse single-site annihilation operator on a Fock space.
SpMat annihilation_sparse(const FockSpace& space, Site site);

}  // namespace ccz
