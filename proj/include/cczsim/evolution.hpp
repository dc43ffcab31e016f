#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cczsim/device.hpp"
#include "cczsim/hamiltonian.hpp"
#include "cczsim/pulse.hpp"

namespace ccz {

/// Dephasing operator used by the Lindblad integrator.
/// as_printed: K = (1 - n) / sqrt(2 T2).
/// standard:   L = sqrt(2 / T_phi) n with 1/T_phi = 1/T2 - 1/(2 T1).
enum class Dephasing { as_printed, standard };

struct SimOptions {
  Frame frame = Frame::full;
  double dt = 0.01;
  /// Keep only bare states with at most this many excitations.
  std::optional<int> max_excitations;
  bool record_trace = false;
  double sample_interval = 0.5;
  /// Upper bound on the phase (radians) any retained term may rotate through
  /// in one step; dt is shortened to respect it.
  double max_step_phase = 0.35;
  Dephasing dephasing = Dephasing::as_printed;
  /// Reference frame of the Schrodinger integrator: the bare diagonal of
  /// H(t), or the exactly diagonalized idle Hamiltonian plus the diagonal of
  /// the pulse term in that eigenbasis.
  enum class Picture { bare, dressed };
  Picture picture = Picture::dressed;
};

struct PopulationTrace {
  std::vector<double> times;
  /// Bare Fock-basis populations at each sample time.
  std::vector<RVec> populations;
};

struct EvolutionResult {
  CVec state;
  CMat rho;
  /// Columns evolved together (full propagator when all basis states are evolved).
  std::optional<CMat> propagator;
  PopulationTrace trace;
  double dt_used = 0.0;
};

/// Fixed-step RK4 integrator for a device driven by coupler pulses.
///
/// Integration runs in an interaction picture (see SimOptions::picture);
/// results are returned in the Schrodinger picture and the bare Fock basis.
/// The Lindblad integrator always uses the bare picture.
class Evolver {
 public:
  explicit Evolver(DeviceModel device, SimOptions opts = {});

  const DeviceModel& device() const { return device_; }
  const FockSpace& space() const { return space_; }
  const SimOptions& options() const { return opts_; }

  EvolutionResult evolve_state(const PulseSchedule& schedule, const CVec& psi0, double t_span) const;
  /// Evolves each column of `columns` as an independent state.
  EvolutionResult evolve_columns(const PulseSchedule& schedule, const CMat& columns, double t_span) const;
  EvolutionResult evolve_propagator(const PulseSchedule& schedule, double t_span) const;
  EvolutionResult evolve_lindblad(const PulseSchedule& schedule, const NoiseSpec& noise, const CMat& rho0,
                                  double t_span) const;

  /// Eigenbasis of the idle Hamiltonian; column i is the dressed partner of
  /// bare state i, phased so its overlap with that state is real positive.
  const CMat& dressed_basis() const { return w_; }
  /// Idle eigenenergies in the same order (angular MHz).
  const RVec& dressed_energies() const { return e_; }
  /// Evolves columns given in the dressed basis and returns dressed-basis
  /// amplitudes in the frame rotating with the idle Hamiltonian.
  CMat evolve_dressed_frame(const PulseSchedule& schedule, const CMat& columns, double t_span) const;

  /// Dense H(t) in angular MHz.
  CMat hamiltonian(const PulseSchedule& schedule, double t) const;
  /// Accumulated diagonal phase at time t (radians).
  RVec diagonal_phase(const PulseSchedule& schedule, double t) const;
  /// Label like "10200" in site order Q1 C1 Q2 C2 Q3.
  std::string state_label(std::size_t i) const;
  CVec basis_state(const Occupation& occ) const;

 private:
  DeviceModel device_;
  SimOptions opts_;
  FockSpace space_;
  RVec bare_;
  RVec n_c1_;
  RVec n_c2_;
  SpMat v_;
  // dressed picture: idle eigenbasis, energies, pulse operators in that basis
  CMat w_;
  RVec e_;
  CMat m1_;
  CMat m2_;
  SpMat o_pattern_;
  std::vector<cplx> o1_vals_;
  std::vector<cplx> o2_vals_;

  // fastest rotation of a non-negligible integrand term, rad/ns
  double fast_bare_ = 0.0;
  double fast_dressed_ = 0.0;

  /// Steps over t_span: dt, shortened so no retained term rotates by more
  /// than SimOptions::max_step_phase per step (pulse detunings included).
  std::size_t step_count(const PulseSchedule& schedule, double t_span, bool dressed) const;
  CMat integrate_bare(const PulseSchedule& schedule, CMat c, double t_span, PopulationTrace* trace) const;
  CMat integrate_dressed(const PulseSchedule& schedule, CMat c, double t_span, PopulationTrace* trace,
                         bool rotating_io = false) const;
  CMat integrate_columns(const PulseSchedule& schedule, CMat c, double t_span, PopulationTrace* trace) const;
};

/// exp(-i H t) for Hermitian H in angular MHz and t in ns.
CMat expm_hermitian(const CMat& h, double t_ns);

/// Piecewise-constant exponential stepping with H sampled at step midpoints.
CVec evolve_piecewise_expm(const Evolver& ev, const PulseSchedule& schedule, const CVec& psi0, double t_span,
                           double dt);

/// Populations of the seven-state three-excitation model.
struct ThreeExcitationTrace {
  static constexpr std::array<const char*, 7> labels{"210", "201", "120", "111", "102", "021", "012"};
  std::vector<double> times;
  std::vector<std::array<double, 7>> populations;
};

/// Qubit frequencies (GHz) as functions of time (ns).
using FrequencyProfile = std::function<std::array<double, 3>(double)>;

ThreeExcitationTrace three_excitation_model(double g12_mhz, double g23_mhz, double g13_mhz,
                                            const FrequencyProfile& omegas_ghz,
                                            const std::array<double, 3>& alphas_mhz, double t_span, double dt = 0.01,
                                            double sample_interval = 0.5, int initial = 3);

}  // namespace ccz
