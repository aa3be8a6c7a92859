#pragma once

// Closed-form rate model of the dissipative OR gate: optimal detunings, the
// two-level leakage system (M1) and the Lambda-reduced resonant system (M2),
// their eigen-decompositions, error formulas, and the optimal gate time.
// All rates are 1/ns, times ns; the formulas are homogeneous in units.

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "dissipgate/gates.hpp"

namespace dissipgate {

// Rates of the driven dressed-state Lambda reduction. The drive couples the
// output ground state to the lower dressed state with strength omega_d; the
// dressed state decays back (kappa_d) or forward (gamma_d). Gamma is the
// saturating pump rate replacing the coherent drive.
struct LambdaParams {
  double omega_d = 0.0;
  double kappa_d = 0.0;
  double gamma_d = 0.0;
  double Gamma = 0.0;
};

inline LambdaParams lambda_params(double gamma, double kappa, double omega) {
  if (!(gamma > 0.0) || !(kappa > 0.0))
    throw std::invalid_argument("lambda_params: gamma, kappa must be > 0");
  LambdaParams lp;
  lp.omega_d = std::sqrt(kappa / (kappa + gamma)) * omega;
  lp.kappa_d = kappa * gamma / (kappa + gamma);
  lp.gamma_d = lp.kappa_d;
  const double total = lp.gamma_d + lp.kappa_d;
  lp.Gamma = lp.omega_d * lp.omega_d * total /
             (lp.omega_d * lp.omega_d + total * total);
  return lp;
}

// Detunings maximizing the desired rate. Exact stationarity of the rate
// denominator gives Delta_opt; delta_opt follows from the cross equation
// delta = 4 g^2 Delta / (gamma^2 + 4 Delta^2). The ratio Delta/delta equals
// gamma/kappa exactly, and delta*Delta = g^2 - gamma*kappa/4.
struct OptimalDetunings {
  double delta_opt = 0.0;
  double Delta_opt = 0.0;
  double r_opt = 0.0;
  double delta_approx = 0.0;  // sqrt(kappa/gamma) g, valid for gamma*kappa << g^2
  double Delta_approx = 0.0;  // sqrt(gamma/kappa) g
};

inline OptimalDetunings optimal_detunings(double g, double gamma,
                                          double kappa) {
  if (!(g > 0.0) || !(gamma > 0.0) || !(kappa > 0.0))
    throw std::invalid_argument("optimal_detunings: arguments must be > 0");
  const double disc = 4.0 * g * g - gamma * kappa;
  if (disc <= 0.0)
    throw std::domain_error("optimal_detunings: requires 4 g^2 > gamma*kappa");
  OptimalDetunings od;
  od.Delta_opt = std::sqrt(gamma * disc) / (2.0 * std::sqrt(kappa));
  od.delta_opt = 4.0 * g * g * od.Delta_opt /
                 (gamma * gamma + 4.0 * od.Delta_opt * od.Delta_opt);
  od.r_opt = od.Delta_opt / od.delta_opt;
  od.Delta_approx = std::sqrt(gamma / kappa) * g;
  od.delta_approx = std::sqrt(kappa / gamma) * g;
  return od;
}

// Closed-form solution of the reduced rate model. pe00 follows the two-level
// leakage system m1 over {|00>, error}; pe01 follows the three-level resonant
// system m2 over {|01>, dressed, |11>}. The error series weights satisfy
// pe01(t) = b_minus e^{lambda_- t} + b_plus e^{lambda_+ t} + pe01_floor.
struct AnalyticSolution {
  double gamma_minus = 0.0;  // undesired per-channel rate feeding pe00
  double gamma_g = 0.0;      // ground flip rate
  LambdaParams lambda;

  Eigen::Matrix2d m1 = Eigen::Matrix2d::Zero();
  Eigen::Matrix3d m2 = Eigen::Matrix3d::Zero();

  double lambda0 = 0.0;  // stationary eigenvalue of m2
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double lambda_plus_approx = 0.0;   // -(Gamma + 2 gamma_g)/2
  double lambda_minus_approx = 0.0;  // -(Gamma + gamma_g + 4 gamma_d)/2

  double b_plus = 0.0;
  double b_minus = 0.0;
  double pe01_floor = 0.0;  // stationary error left by ground flips

  double t_opt = std::numeric_limits<double>::quiet_NaN();
  double pe_avg_min = std::numeric_limits<double>::quiet_NaN();
  bool valid_regime = false;  // optimum formula applicable (see analytic_gate)
  bool degenerate = false;    // lambda_+ == lambda_-; series form breaks down

  double pe00(double t) const {
    if (t < 0.0) throw std::invalid_argument("pe00: t must be >= 0");
    const double s = gamma_minus + 2.0 * gamma_g;
    if (s <= 0.0) return 0.0;
    return (gamma_minus + gamma_g) / s * (1.0 - std::exp(-2.0 * s * t));
  }

  double pe01(double t) const {
    if (t < 0.0) throw std::invalid_argument("pe01: t must be >= 0");
    if (degenerate) {
      // fall back to direct exponentiation of the generator
      Eigen::EigenSolver<Eigen::Matrix3d> es(m2);
      const Eigen::Vector3cd ev = es.eigenvalues();
      const Eigen::Matrix3cd v = es.eigenvectors();
      Eigen::Vector3cd c = v.partialPivLu().solve(Eigen::Vector3cd(1, 0, 0));
      for (int k = 0; k < 3; ++k) c(k) *= std::exp(ev(k) * t);
      return 1.0 - (v * c)(2).real();
    }
    return b_minus * std::exp(lambda_minus * t) +
           b_plus * std::exp(lambda_plus * t) + pe01_floor;
  }

  double pe_avg(double t) const { return 0.25 * (pe01(t) + pe00(t)); }
};

// Builds the reduced model from gate parameters. gamma_minus uses the exact
// complex-detuning expression; the ground flip rate comes from the explicit
// override when set, else 1/(2 T1).
inline AnalyticSolution resonant_solution(const SystemParams& p) {
  p.validate();
  const ResolvedParams q = resolve_frequencies(p, 1.0);
  AnalyticSolution s;
  s.gamma_minus = engineered_rates(q.g, q.gamma, q.kappa, q.omega, q.delta,
                                   q.Delta)
                      .gamma_minus;
  s.gamma_g = p.gamma_g ? *p.gamma_g : 1.0 / (2.0e3 * p.t1);
  s.lambda = lambda_params(q.gamma, q.kappa, q.omega);

  const double gm = s.gamma_minus, gg = s.gamma_g;
  const double G = s.lambda.Gamma, gd = s.lambda.gamma_d,
               kd = s.lambda.kappa_d;

  s.m1 << -2.0 * (gm + gg), 2.0 * gg,
           2.0 * (gm + gg), -2.0 * gg;
  s.m2 << -G - gg, kd, gg,
           G, -gd - kd, 0.0,
           gg, gd, -gg;

  const double disc =
      G * G + 4.0 * gd * gd + 4.0 * gg * (gg - 2.0 * gd);
  const double mid = -G - 2.0 * (gd + gg);
  if (disc <= 1e-24 * mid * mid) {
    s.degenerate = true;
    s.lambda_plus = s.lambda_minus = 0.5 * mid;
    return s;
  }
  const double root = std::sqrt(disc);
  s.lambda_plus = 0.5 * (mid + root);
  s.lambda_minus = 0.5 * (mid - root);
  s.lambda_plus_approx = -0.5 * (G + 2.0 * gg);
  s.lambda_minus_approx = -0.5 * (G + gg + 4.0 * gd);

  // success-population weights of exp(m2 t) from (1,0,0); error series
  // weights are their negatives
  const auto weight_den = [&](double l) {
    return G * gd + l * (2.0 * G + 4.0 * gd + 4.0 * gg) + G * gg +
           4.0 * gd * gg + 3.0 * l * l;
  };
  const double num_p = G * gd - gg * (G + 2.0 * gg + s.lambda_minus);
  const double num_m = G * gd - gg * (G + 2.0 * gg + s.lambda_plus);
  s.b_plus = -num_p / weight_den(s.lambda_plus);
  s.b_minus = -num_m / weight_den(s.lambda_minus);
  const double floor_num =
      G * gd - gg * (G + 2.0 * gg + s.lambda_plus + s.lambda_minus);
  s.pe01_floor = 1.0 - floor_num / (G * gd + G * gg + 4.0 * gd * gg);
  return s;
}

inline double offresonant_error(const SystemParams& p, double t) {
  return resonant_solution(p).pe00(t);
}

// Completes the solution with the stationary point of the average error.
// Balancing d pe00/dt = 2(gamma_- + gamma_g) e^{-2(gamma_- + 2 gamma_g)t}
// against d pe01/dt = lambda_+ b_plus e^{lambda_+ t} (the slow branch) gives
// t_opt = log(-2(gamma_- + gamma_g)/(b_plus lambda_+))
//         / (2(gamma_- + 2 gamma_g) + lambda_+).
inline AnalyticSolution analytic_gate(const SystemParams& p) {
  AnalyticSolution s = resonant_solution(p);
  if (s.degenerate) return s;
  const double gm = s.gamma_minus, gg = s.gamma_g;
  const double arg =
      -2.0 * (gm + gg) / (s.b_plus * s.lambda_plus);
  const double den = 2.0 * (gm + 2.0 * gg) + s.lambda_plus;
  if (!(arg > 0.0) || den == 0.0) return s;
  const double t = std::log(arg) / den;
  if (!(t > 0.0) || !std::isfinite(t)) return s;
  s.t_opt = t;
  s.pe_avg_min = s.pe_avg(t);
  s.valid_regime = true;
  return s;
}

}  // namespace dissipgate
