#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dissipgate/effective.hpp"

namespace dissipgate {

// Physical gate parameters. Frequency fields are entered as value/2pi in GHz
// (1 GHz/2pi entry = 2pi rad/ns internally); coherence times in microseconds.
// delta/Delta left at zero are derived from the scheme's resonance condition
// delta*Delta = factor*g^2 with ratio r = Delta/delta (default gamma/kappa).
struct SystemParams {
  double g = 4.4;
  double gamma = 0.3;
  double kappa = 0.6;
  double omega = 0.13;
  double delta = 0.0;
  double Delta = 0.0;
  std::optional<double> r;
  std::optional<double> gamma_g;  // ground flip rate in 1/ns; default 1/(2 T1)
  double t1 = 20.0;               // us
  double t2 = 1.0;                // us
  int fock_cutoff = 3;

  void validate() const {
    if (!(g > 0.0) || !(gamma > 0.0) || !(kappa > 0.0))
      throw std::invalid_argument("SystemParams: g, gamma, kappa must be > 0");
    if (omega < 0.0) throw std::invalid_argument("SystemParams: omega < 0");
    if (fock_cutoff < 2)
      throw std::invalid_argument("SystemParams: fock_cutoff < 2");
    if (r && !(*r > 0.0)) throw std::invalid_argument("SystemParams: r <= 0");
    if (!(t1 > 0.0) || !(t2 > 0.0))
      throw std::invalid_argument("SystemParams: t1, t2 must be > 0");
  }
};

// Angular frequencies in rad/ns after resolving the detunings.
struct ResolvedParams {
  double g, gamma, kappa, omega, delta, Delta;
};

inline ResolvedParams resolve_frequencies(const SystemParams& p,
                                          double resonance_factor) {
  p.validate();
  ResolvedParams q;
  q.g = p.g * kTwoPi;
  q.gamma = p.gamma * kTwoPi;
  q.kappa = p.kappa * kTwoPi;
  q.omega = p.omega * kTwoPi;
  if (!p.r && (p.delta != 0.0 || p.Delta != 0.0)) {
    q.delta = p.delta * kTwoPi;
    q.Delta = p.Delta * kTwoPi;
  } else {
    const double ratio = p.r ? *p.r : p.gamma / p.kappa;
    q.delta = q.g * std::sqrt(resonance_factor / ratio);
    q.Delta = q.g * std::sqrt(resonance_factor * ratio);
  }
  return q;
}

// Engineered-rate closed forms at the spontaneous-emission scheme resonance.
inline RateSet rates(const SystemParams& p) {
  const auto q = resolve_frequencies(p, 1.0);
  return engineered_rates(q.g, q.gamma, q.kappa, q.omega, q.delta, q.Delta);
}

struct GateSystem {
  LindbladModel model;
  Operator drive;  // ground<->excited coherent coupling, kept for partitioning
  std::map<std::string, int> ground_basis;
  int output_qubit = 0;
  std::map<std::string, int> truth_target;
  SystemParams params;
  ResolvedParams resolved;
  std::vector<std::string> jump_labels;  // parallel to model.jumps
};

struct GateSchedule {
  Schedule schedule;
  Operator drive;  // coherent-phase drive
  std::map<std::string, int> ground_basis;
  int output_qubit = 0;
  std::map<std::string, int> truth_target;
  SystemParams params;
  ResolvedParams resolved;
  std::vector<std::vector<std::string>> jump_labels;  // per phase
};

// Emitter excitations (levels e, f) plus photons; commutes with every
// coupling term and shifts by +-1 under the drives.
inline Operator total_excitation_operator(const Space& space, int n_emitters) {
  Matrix n = Matrix::Zero(space.total(), space.total());
  for (size_t leg = 0; leg < space.dims.size(); ++leg) {
    const int d = space.dims[leg];
    if (static_cast<int>(leg) < n_emitters) {
      for (int lvl = 2; lvl < d; ++lvl)
        n += embed(transition(lvl, lvl, d), static_cast<int>(leg), space).mat;
    } else {
      const Matrix a = annihilation(d).mat;
      n += embed(Matrix(a.adjoint() * a), static_cast<int>(leg), space).mat;
    }
  }
  return {space, n};
}

namespace detail {

inline std::map<std::string, int> computational_basis(const Space& space,
                                                      int emitter_dim) {
  int stride = 1;
  for (size_t leg = 2; leg < space.dims.size(); ++leg)
    stride *= space.dims[leg];
  std::map<std::string, int> basis;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      basis[std::string(1, '0' + a) + std::string(1, '0' + b)] =
          (a * emitter_dim + b) * stride;
  return basis;
}

// Shared OR assembly; couple_from[j] selects the emitter level addressed by
// the cavity coupling on qubit j (0: spontaneous-emission style, 1:
// oscillator style).
inline GateSystem build_or(const SystemParams& p, double resonance_factor,
                           std::array<int, 2> couple_from, bool drive_second) {
  const auto q = resolve_frequencies(p, resonance_factor);
  Space sp{{3, 3, p.fock_cutoff}};
  const int n = sp.total();
  const Matrix a = embed(annihilation(p.fock_cutoff), 2, sp).mat;

  Matrix h0 = q.delta * Matrix(a.adjoint() * a);
  Matrix v = Matrix::Zero(n, n);
  GateSystem sys;
  for (int j = 0; j < 2; ++j) {
    const Matrix sig = embed(transition(2, couple_from[j], 3), j, sp).mat;
    h0 += q.Delta * embed(transition(2, 2, 3), j, sp).mat +
          q.g * Matrix(a * sig + sig.adjoint() * a.adjoint());
    if (j == 0 || drive_second) {
      const Matrix up = embed(transition(2, 0, 3), j, sp).mat;
      v += 0.5 * q.omega * Matrix(up + up.adjoint());
    }
    sys.model.jumps.push_back(
        {sp, std::sqrt(q.gamma) * embed(transition(1, 2, 3), j, sp).mat});
    sys.jump_labels.push_back("gamma" + std::to_string(j + 1));
  }
  sys.model.jumps.push_back({sp, std::sqrt(q.kappa) * a});
  sys.jump_labels.push_back("cavity");

  sys.model.space = sp;
  sys.model.hamiltonian = {sp, h0 + v};
  sys.drive = {sp, v};
  sys.ground_basis = computational_basis(sp, 3);
  sys.output_qubit = 0;
  sys.truth_target = {{"00", 0}, {"01", 1}, {"10", 1}, {"11", 1}};
  sys.params = p;
  sys.resolved = q;
  return sys;
}

inline void append_ground_noise(std::vector<Operator>& jumps,
                                std::vector<std::string>& labels,
                                const Space& space, double t1_us, double t2_us,
                                std::optional<double> flip_rate) {
  if (!(t1_us > 0.0) || !(t2_us > 0.0))
    throw std::invalid_argument("ground noise: t1, t2 must be > 0");
  const double gg = flip_rate ? *flip_rate : 1.0 / (2.0e3 * t1_us);  // 1/ns
  const double total = 1.0e-3 / t2_us;
  const double gphi = total - gg;
  if (gphi < -1e-9 * total)
    throw std::invalid_argument("ground noise: t2 > 2*t1 is unphysical");
  for (int j = 0; j < 2; ++j) {
    const int d = space.dims[j];
    const std::string qn = std::to_string(j + 1);
    jumps.push_back(
        {space, std::sqrt(gg) * embed(transition(1, 0, d), j, space).mat});
    labels.push_back("noise_up" + qn);
    jumps.push_back(
        {space, std::sqrt(gg) * embed(transition(0, 1, d), j, space).mat});
    labels.push_back("noise_down" + qn);
    if (gphi > 1e-9 * total) {
      const Matrix z = transition(0, 0, d).mat - transition(1, 1, d).mat;
      jumps.push_back({space, std::sqrt(0.5 * gphi) * embed(z, j, space).mat});
      labels.push_back("noise_phi" + qn);
    }
  }
}

}  // namespace detail

// H = delta a^dag a + sum_j [Delta|e><e|_j + g(a|e><0|_j + h.c.)] with both
// qubits driven |0><->|e>; emitters decay |e>->|1>, the cavity at kappa.
inline GateSystem build_or_spontaneous(const SystemParams& p) {
  return detail::build_or(p, 1.0, {0, 0}, true);
}

// Cavity couples |e><1|; only qubit 1 is driven and the collective
// three-state block carries the transfer, so delta*Delta = 2 g^2. The
// cavity decay is the dissipative resource and defaults to the kappa = gamma
// working point; pass kappa_equals_gamma = false to use params.kappa.
inline GateSystem build_or_oscillator(SystemParams p,
                                      bool drive_second_qubit = false,
                                      bool kappa_equals_gamma = true) {
  if (kappa_equals_gamma) p.kappa = p.gamma;
  return detail::build_or(p, 2.0, {1, 1}, drive_second_qubit);
}

// Asymmetric couplings |e>_1<->|1>_1 and |e>_2<->|0>_2, drive on qubit 1
// only; both decay channels feed |11> through a two-state block.
inline GateSystem build_or_hybrid(const SystemParams& p) {
  return detail::build_or(p, 1.0, {1, 0}, false);
}

// Two-phase NOR cycle on four-level emitters (0,1,e,f) plus cavity.
// Phase 1 drives |0>_1<->|e> (dressed-resonant at delta*Delta = g^2, Rabi
// frequency Omega_e*c with c = 1/sqrt(1+Delta/delta)) and |1>_1<->|f> (bare,
// Rabi Omega_f) jointly for a pi pulse; phase 2 pumps f->0 and lets the
// cavity decay. Defaults: Omega_f = Omega_e*c so both transfers complete at
// t = pi/(Omega_e*c), and a pump phase of 25/kappa.
inline GateSchedule build_nor(const SystemParams& p, double omega_f = 0.0,
                              std::vector<double> phase_durations = {},
                              int n_cycles = 1) {
  const auto q = resolve_frequencies(p, 1.0);
  if (n_cycles < 1) throw std::invalid_argument("build_nor: n_cycles < 1");
  Space sp{{4, 4, p.fock_cutoff}};
  const Matrix a = embed(annihilation(p.fock_cutoff), 2, sp).mat;

  Matrix h0 = q.delta * Matrix(a.adjoint() * a);
  for (int j = 0; j < 2; ++j) {
    const Matrix sig = embed(transition(2, 1, 4), j, sp).mat;
    h0 += q.Delta * embed(transition(2, 2, 4), j, sp).mat +
          q.g * Matrix(a * sig + sig.adjoint() * a.adjoint());
  }
  const double c = 1.0 / std::sqrt(1.0 + q.Delta / q.delta);
  const double wf = omega_f > 0.0 ? omega_f * kTwoPi : q.omega * c;
  const Matrix up_e = embed(transition(2, 0, 4), 0, sp).mat;
  const Matrix up_f = embed(transition(3, 1, 4), 0, sp).mat;
  const Matrix v = 0.5 * q.omega * Matrix(up_e + up_e.adjoint()) +
                   0.5 * wf * Matrix(up_f + up_f.adjoint());

  if (phase_durations.empty())
    phase_durations = {kTwoPi / 2.0 / (q.omega * c), 25.0 / q.kappa};
  if (phase_durations.size() != 2)
    throw std::invalid_argument("build_nor: need two phase durations");
  for (double d : phase_durations)
    if (!(d > 0.0))
      throw std::invalid_argument("build_nor: durations must be > 0");

  LindbladModel coherent{sp, {sp, h0 + v}, {}};
  LindbladModel dissipative{
      sp,
      {sp, h0},
      {{sp, std::sqrt(q.gamma) * embed(transition(0, 3, 4), 0, sp).mat},
       {sp, std::sqrt(q.kappa) * a}}};

  GateSchedule gs;
  for (int cycle = 0; cycle < n_cycles; ++cycle) {
    gs.schedule.phases.emplace_back(coherent, phase_durations[0]);
    gs.jump_labels.push_back({});
    gs.schedule.phases.emplace_back(dissipative, phase_durations[1]);
    gs.jump_labels.push_back({"pump_f", "cavity"});
  }
  gs.drive = {sp, v};
  gs.ground_basis = detail::computational_basis(sp, 4);
  gs.output_qubit = 0;
  gs.truth_target = {{"00", 1}, {"01", 0}, {"10", 0}, {"11", 0}};
  gs.params = p;
  gs.resolved = q;
  return gs;
}

// Second-mode parameters for the XOR's f-channel (mode b), resolved against
// delta2*Delta2 = 2 g^2 with ratio r (default 1).
struct SecondModeParams {
  double delta = 0.0;
  double Delta = 0.0;
  std::optional<double> r;
  double omega_f = 0.0;  // value/2pi GHz; 0 = matched pi-pulse condition
  int fock_cutoff = 3;
};

// Two-phase XOR cycle on four-level emitters with modes a (e<->0, resonance
// delta1*Delta1 = g^2) and b (f<->1, resonance delta2*Delta2 = 2 g^2); both
// drives address qubit 1. Phase 1: joint pi pulse |01>->dressed-e (Rabi
// Omega*c_e) and |11>->dressed-f (Rabi Omega_f*c_f, matched by default);
// phase 2: pumps e->1 and f->0 on qubit 1.
inline GateSchedule build_xor(const SystemParams& p,
                              const SecondModeParams& sm = {},
                              std::vector<double> phase_durations = {},
                              int n_cycles = 1) {
  const auto q = resolve_frequencies(p, 1.0);
  if (n_cycles < 1) throw std::invalid_argument("build_xor: n_cycles < 1");
  if (sm.fock_cutoff < 2)
    throw std::invalid_argument("build_xor: second mode fock_cutoff < 2");
  double delta2, Delta2;
  if (!sm.r && (sm.delta != 0.0 || sm.Delta != 0.0)) {
    delta2 = sm.delta * kTwoPi;
    Delta2 = sm.Delta * kTwoPi;
  } else {
    const double r2 = sm.r ? *sm.r : 1.0;
    if (!(r2 > 0.0)) throw std::invalid_argument("build_xor: r2 <= 0");
    delta2 = q.g * std::sqrt(2.0 / r2);
    Delta2 = q.g * std::sqrt(2.0 * r2);
  }

  Space sp{{4, 4, p.fock_cutoff, sm.fock_cutoff}};
  const Matrix a = embed(annihilation(p.fock_cutoff), 2, sp).mat;
  const Matrix b = embed(annihilation(sm.fock_cutoff), 3, sp).mat;

  Matrix h0 = q.delta * Matrix(a.adjoint() * a) + delta2 * Matrix(b.adjoint() * b);
  for (int j = 0; j < 2; ++j) {
    const Matrix sig_e = embed(transition(2, 0, 4), j, sp).mat;
    const Matrix sig_f = embed(transition(3, 1, 4), j, sp).mat;
    h0 += q.Delta * embed(transition(2, 2, 4), j, sp).mat +
          Delta2 * embed(transition(3, 3, 4), j, sp).mat +
          q.g * Matrix(a * sig_e + sig_e.adjoint() * a.adjoint()) +
          q.g * Matrix(b * sig_f + sig_f.adjoint() * b.adjoint());
  }
  const double ce = 1.0 / std::sqrt(1.0 + q.Delta / q.delta);
  const double cf = 1.0 / std::sqrt(2.0 + 2.0 * Delta2 / delta2);
  const double wf = sm.omega_f > 0.0 ? sm.omega_f * kTwoPi : q.omega * ce / cf;
  const Matrix up_e = embed(transition(2, 0, 4), 0, sp).mat;
  const Matrix up_f = embed(transition(3, 1, 4), 0, sp).mat;
  const Matrix v = 0.5 * q.omega * Matrix(up_e + up_e.adjoint()) +
                   0.5 * wf * Matrix(up_f + up_f.adjoint());

  if (phase_durations.empty())
    phase_durations = {kTwoPi / 2.0 / (q.omega * ce), 40.0 / q.gamma};
  if (phase_durations.size() != 2)
    throw std::invalid_argument("build_xor: need two phase durations");
  for (double d : phase_durations)
    if (!(d > 0.0))
      throw std::invalid_argument("build_xor: durations must be > 0");

  LindbladModel coherent{sp, {sp, h0 + v}, {}};
  LindbladModel dissipative{
      sp,
      {sp, h0},
      {{sp, std::sqrt(q.gamma) * embed(transition(1, 2, 4), 0, sp).mat},
       {sp, std::sqrt(q.gamma) * embed(transition(0, 3, 4), 0, sp).mat}}};

  GateSchedule gs;
  for (int cycle = 0; cycle < n_cycles; ++cycle) {
    gs.schedule.phases.emplace_back(coherent, phase_durations[0]);
    gs.jump_labels.push_back({});
    gs.schedule.phases.emplace_back(dissipative, phase_durations[1]);
    gs.jump_labels.push_back({"gamma_e", "pump_f"});
  }
  gs.drive = {sp, v};
  gs.ground_basis = detail::computational_basis(sp, 4);
  gs.output_qubit = 0;
  gs.truth_target = {{"00", 0}, {"01", 1}, {"10", 1}, {"11", 0}};
  gs.params = p;
  gs.resolved = q;
  return gs;
}

// Symmetric ground-state flips at gamma_g = 1/(2 T1) on both qubits plus
// pure dephasing sized so the total ground coherence decay is 1/T2
// (gamma_phi = 1/T2 - gamma_g); rates in plain 1/ns.
inline GateSystem with_ground_noise(GateSystem sys, double t1_us,
                                    double t2_us) {
  detail::append_ground_noise(sys.model.jumps, sys.jump_labels,
                              sys.model.space, t1_us, t2_us,
                              sys.params.gamma_g);
  return sys;
}

inline GateSchedule with_ground_noise(GateSchedule gs, double t1_us,
                                      double t2_us) {
  for (size_t i = 0; i < gs.schedule.phases.size(); ++i)
    detail::append_ground_noise(gs.schedule.phases[i].first.jumps,
                                gs.jump_labels[i],
                                gs.schedule.phases[i].first.space, t1_us,
                                t2_us, gs.params.gamma_g);
  return gs;
}

}  // namespace dissipgate
