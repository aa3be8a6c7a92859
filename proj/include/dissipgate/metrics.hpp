#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "dissipgate/gates.hpp"

namespace dissipgate {

struct ErrorSeries {
  std::vector<double> times;
  std::map<std::string, std::vector<double>> errors;  // per input label
  std::vector<double> average;
};

struct GateResult {
  double t_opt = 0.0;
  double min_error = 1.0;
  bool boundary = false;  // optimum sits on the grid edge
  ErrorSeries series;
  std::map<std::string, double> photon_counts;
};

// {0} plus logarithmically spaced samples from t_final/2000 up to t_final.
inline std::vector<double> default_time_grid(double t_final, int points = 200) {
  if (!(t_final > 0.0))
    throw std::invalid_argument("default_time_grid: t_final must be > 0");
  if (points < 3) throw std::invalid_argument("default_time_grid: points < 3");
  std::vector<double> ts{0.0};
  const double lo = std::log(t_final / 2000.0);
  const double hi = std::log(t_final);
  for (int i = 0; i + 1 < points; ++i)
    ts.push_back(std::exp(lo + (hi - lo) * i / (points - 2.0)));
  ts.back() = t_final;
  return ts;
}

namespace detail {

// Projector onto emitter level `lvl` of the readout qubit. Readout counts
// ground-level population only: transient excited-state mass counts toward
// neither bit, depressing the success probability.
inline Matrix readout_projector(const Space& space, int qubit, int lvl) {
  return embed(transition(lvl, lvl, space.dims[qubit]), qubit, space).mat;
}

inline int target_of(const std::map<std::string, int>& truth,
                     const std::string& label) {
  const auto it = truth.find(label);
  if (it == truth.end())
    throw std::invalid_argument("unknown input label: " + label);
  return it->second;
}

}  // namespace detail

inline std::vector<double> success_probability(const Trajectory& traj,
                                               const GateSystem& sys,
                                               const std::string& input_label) {
  const int target = detail::target_of(sys.truth_target, input_label);
  const Matrix proj =
      detail::readout_projector(traj.model.space, sys.output_qubit, target);
  std::vector<double> ps;
  ps.reserve(traj.states.size());
  for (const auto& st : traj.states)
    ps.push_back((proj * st.mat).trace().real());
  return ps;
}

inline std::vector<double> success_probability(const Trajectory& traj,
                                               const GateSchedule& gs,
                                               const std::string& input_label) {
  const int target = detail::target_of(gs.truth_target, input_label);
  const Matrix proj =
      detail::readout_projector(traj.model.space, gs.output_qubit, target);
  std::vector<double> ps;
  ps.reserve(traj.states.size());
  for (const auto& st : traj.states)
    ps.push_back((proj * st.mat).trace().real());
  return ps;
}

// Simulates all four computational inputs and assembles per-input error
// probabilities P_e = 1 - P_s plus their average.
inline ErrorSeries error_series(const GateSystem& sys,
                                std::vector<double> times = {}) {
  if (times.empty())
    times = default_time_grid(20.0 / rates(sys.params).gamma_plus);
  const int n = sys.model.space.total();
  SpectralPropagator prop(sys.model);
  std::array<Vector, 2> rows;
  for (int b = 0; b < 2; ++b)
    rows[b] = prop.observable_row(
        detail::readout_projector(sys.model.space, sys.output_qubit, b));

  ErrorSeries series;
  series.times = times;
  series.average.assign(times.size(), 0.0);
  for (const auto& [label, k0] : sys.ground_basis) {
    Matrix rho0 = Matrix::Zero(n, n);
    rho0(k0, k0) = 1.0;
    const Vector c = prop.coefficients(rho0);
    const Vector& row = rows[sys.truth_target.at(label)];
    std::vector<double> pe(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
      pe[i] = 1.0 - prop.expectation(row, c, times[i]);
      series.average[i] += 0.25 * pe[i];
    }
    series.errors[label] = std::move(pe);
  }
  return series;
}

// Schedule variant: errors sampled along the phase sequence.
inline ErrorSeries error_series(const GateSchedule& gs,
                                int samples_per_phase = 4) {
  const Space& sp = gs.schedule.phases.front().first.space;
  const int n = sp.total();
  ErrorSeries series;
  for (const auto& [label, k0] : gs.ground_basis) {
    Matrix rho0 = Matrix::Zero(n, n);
    rho0(k0, k0) = 1.0;
    const auto traj =
        evolve_schedule(gs.schedule, {sp, rho0}, samples_per_phase);
    const auto ps = success_probability(traj, gs, label);
    if (series.times.empty()) {
      series.times = traj.times;
      series.average.assign(series.times.size(), 0.0);
    }
    std::vector<double> pe(ps.size());
    for (size_t i = 0; i < ps.size(); ++i) {
      pe[i] = 1.0 - ps[i];
      series.average[i] += 0.25 * pe[i];
    }
    series.errors[label] = std::move(pe);
  }
  return series;
}

// Grid argmin of the average error with local quadratic refinement; ties
// break toward the earlier time, edge optima are flagged as boundary.
inline GateResult optimal_gate_time(const ErrorSeries& series) {
  const size_t m = series.times.size();
  if (m == 0 || series.average.size() != m)
    throw std::invalid_argument("optimal_gate_time: empty or ragged series");
  size_t best = 0;
  for (size_t i = 1; i < m; ++i)
    if (series.average[i] < series.average[best]) best = i;

  GateResult res;
  res.series = series;
  res.t_opt = series.times[best];
  res.min_error = series.average[best];
  res.boundary = (best == 0 || best + 1 == m);
  if (!res.boundary) {
    const double t0 = series.times[best - 1], t1 = series.times[best],
                 t2 = series.times[best + 1];
    const double y0 = series.average[best - 1], y1 = series.average[best],
                 y2 = series.average[best + 1];
    const double denom = (t0 - t1) * (t0 - t2) * (t1 - t2);
    const double a =
        (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom;
    const double b =
        (t2 * t2 * (y0 - y1) + t1 * t1 * (y2 - y0) + t0 * t0 * (y1 - y2)) /
        denom;
    if (a > 0.0) {
      const double tv = -b / (2.0 * a);
      if (tv > t0 && tv < t2) {
        const double cc = y1 - a * t1 * t1 - b * t1;
        res.t_opt = tv;
        res.min_error = std::min(y1, a * tv * tv + b * tv + cc);
      }
    }
  }
  return res;
}

namespace detail {

// Total photon-scattering observable: sum of L^dag L over the physical
// emission channels, excluding logical ground-noise jumps.
inline Matrix scattering_observable(const Space& space,
                                    const std::vector<Operator>& jumps,
                                    const std::vector<std::string>& labels) {
  const int n = space.total();
  Matrix obs = Matrix::Zero(n, n);
  for (size_t k = 0; k < jumps.size(); ++k) {
    if (k < labels.size() && labels[k].rfind("noise_", 0) == 0) continue;
    obs += Matrix(jumps[k].mat.adjoint() * jumps[k].mat);
  }
  return obs;
}

}  // namespace detail

// Expected number of photons scattered up to t_final: the time integral of
// the total emission rate, evaluated exactly in the Liouvillian eigenbasis.
inline double photon_count(const GateSystem& sys,
                           const std::string& input_label, double t_final) {
  if (!(t_final > 0.0))
    throw std::invalid_argument("photon_count: t_final must be > 0");
  const auto it = sys.ground_basis.find(input_label);
  if (it == sys.ground_basis.end())
    throw std::invalid_argument("unknown input label: " + input_label);
  if (sys.model.jumps.empty()) return 0.0;

  const int n = sys.model.space.total();
  SpectralPropagator prop(sys.model);
  const Vector row = prop.observable_row(detail::scattering_observable(
      sys.model.space, sys.model.jumps, sys.jump_labels));
  Matrix rho0 = Matrix::Zero(n, n);
  rho0(it->second, it->second) = 1.0;
  const Vector c = prop.coefficients(rho0);
  return prop.integral_expectation(row, c, t_final);
}

// Schedule variant: trapezoidal integration over sampled phases, refined by
// doubling the sampling until the result moves by less than 1e-3.
inline double photon_count(const GateSchedule& gs,
                           const std::string& input_label) {
  const auto it = gs.ground_basis.find(input_label);
  if (it == gs.ground_basis.end())
    throw std::invalid_argument("unknown input label: " + input_label);
  const Space& sp = gs.schedule.phases.front().first.space;
  const int n = sp.total();
  Matrix rho0 = Matrix::Zero(n, n);
  rho0(it->second, it->second) = 1.0;

  std::vector<Matrix> phase_obs;
  for (size_t p = 0; p < gs.schedule.phases.size(); ++p)
    phase_obs.push_back(detail::scattering_observable(
        sp, gs.schedule.phases[p].first.jumps, gs.jump_labels[p]));

  double prev = -1.0;
  for (int samples = 8; samples <= 128; samples *= 2) {
    const auto traj = evolve_schedule(gs.schedule, {sp, rho0}, samples);
    // segment i-1 -> i lies in phase (i-1)/samples; evaluate both endpoints
    // under that phase's emission observable
    double integral = 0.0;
    for (size_t i = 1; i < traj.times.size(); ++i) {
      const Matrix& obs = phase_obs[(i - 1) / samples];
      const double left = (obs * traj.states[i - 1].mat).trace().real();
      const double right = (obs * traj.states[i].mat).trace().real();
      integral += 0.5 * (left + right) * (traj.times[i] - traj.times[i - 1]);
    }
    if (prev >= 0.0 && std::abs(integral - prev) < 1e-3) return integral;
    prev = integral;
  }
  return prev;
}

// Full quality evaluation: error series, optimal time, and the per-input
// photon cost at that time.
inline GateResult evaluate_gate(const GateSystem& sys,
                                std::vector<double> times = {}) {
  GateResult res = optimal_gate_time(error_series(sys, std::move(times)));
  for (const auto& [label, k0] : sys.ground_basis)
    res.photon_counts[label] = photon_count(sys, label, res.t_opt);
  return res;
}

}  // namespace dissipgate
