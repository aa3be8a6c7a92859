#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dissipgate/lindblad.hpp"

namespace dissipgate {

// Ground/excited split of a model. All operators stay on the full space with
// support restricted to their blocks: v_plus maps ground to excited,
// v_minus = v_plus^dag, h_e (h_g) lives on the excited (ground) block.
// drive_residual holds intra-excited drive terms; they act at second order
// between excited states and are excluded from the non-Hermitian Hamiltonian.
struct Partition {
  LindbladModel model;
  std::vector<int> ground, excited;
  Operator v_plus, v_minus, h_e, h_g;
  Matrix drive_residual;
};

struct ComplexDetunings {
  Complex delta_t;  // delta - i kappa/2
  Complex Delta_t;  // Delta - i gamma/2
};

inline ComplexDetunings complex_detunings(double delta, double kappa,
                                          double Delta, double gamma) {
  return {Complex(delta, -0.5 * kappa), Complex(Delta, -0.5 * gamma)};
}

// Named coupling combinations appearing in the closed-form effective
// operators of the resonantly driven schemes.
struct EffectiveCouplings {
  Complex delta_eff_1;  // Delta_t - g^2/delta_t
  Complex delta_eff_2;  // Delta_t - g^2/(delta_t - g^2/Delta_t)
  Complex g_eff_1;      // -2 Delta_t + delta_t Delta_t^2/g^2
  Complex g_eff_2;      // g - delta_t Delta_t/g
  Complex g_eff_3;      // 2g - delta_t Delta_t/g
};

inline EffectiveCouplings effective_couplings(const ComplexDetunings& d,
                                              double g) {
  const Complex dt = d.delta_t, Dt = d.Delta_t;
  const double g2 = g * g;
  EffectiveCouplings c;
  c.delta_eff_1 = Dt - g2 / dt;
  c.delta_eff_2 = Dt - g2 / (dt - g2 / Dt);
  c.g_eff_1 = -2.0 * Dt + dt * Dt * Dt / g2;
  c.g_eff_2 = g - dt * Dt / g;
  c.g_eff_3 = 2.0 * g - dt * Dt / g;
  return c;
}

struct EffectiveModel {
  Operator h_eff;
  std::vector<std::pair<std::string, Operator>> jumps_eff;
  std::vector<std::vector<int>> blocks;
  std::vector<std::string> warnings;
  std::optional<EffectiveCouplings> couplings;
};

// Engineered ground-state transfer rates (all arguments and results in
// rad/ns). gamma_plus drives the wanted transfer through the two-state
// excited block, gamma_minus the unwanted one through the three-state block
// whose collective coupling is sqrt(2) g.
struct RateSet {
  double gamma_plus;
  double gamma_minus;
  double gamma_plus_opt;   // Omega^2 / (4 gamma), at optimal detunings
  double gamma_minus_opt;  // gamma Omega^2 / (4 g^2)
  double gamma_plus_sd;    // strong-driving form gamma Omega^2/(4(gamma^2+2 Omega^2))
};

inline RateSet engineered_rates(double g, double gamma, double kappa,
                                double omega, double delta, double Delta) {
  if (!(gamma > 0.0) || !(kappa > 0.0))
    throw std::invalid_argument("engineered_rates: gamma, kappa must be > 0");
  const auto d = complex_detunings(delta, kappa, Delta, gamma);
  const double w2 = 0.25 * omega * omega;
  const Complex denom1 = d.delta_t * d.Delta_t - g * g;
  const Complex denom2 = d.delta_t * d.Delta_t - 2.0 * g * g;
  RateSet r;
  r.gamma_plus = gamma * w2 * std::norm(d.delta_t / denom1);
  r.gamma_minus = gamma * w2 * std::norm(d.delta_t / denom2);
  r.gamma_plus_opt = omega * omega / (4.0 * gamma);
  r.gamma_minus_opt = gamma * omega * omega / (4.0 * g * g);
  r.gamma_plus_sd =
      gamma * omega * omega / (4.0 * (gamma * gamma + 2.0 * omega * omega));
  return r;
}

namespace detail {

inline std::vector<int> normalized_indices(const std::vector<int>& idx,
                                           int n, const char* what) {
  std::vector<int> out = idx;
  std::sort(out.begin(), out.end());
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty");
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0 || out[i] >= n)
      throw std::invalid_argument(std::string(what) + ": index out of range");
    if (i > 0 && out[i] == out[i - 1])
      throw std::invalid_argument(std::string(what) + ": duplicate index");
  }
  return out;
}

inline Matrix masked(const Matrix& m, const std::vector<bool>& rows,
                     const std::vector<bool>& cols) {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (!cols[j]) continue;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (rows[i]) out(i, j) = m(i, j);
  }
  return out;
}

inline Partition make_partition(const LindbladModel& model,
                                const std::vector<int>& ground_indices,
                                const Operator* drive) {
  model.validate();
  const int n = model.space.total();
  Partition p;
  p.model = model;
  p.ground = normalized_indices(ground_indices, n, "partition ground");
  std::vector<bool> gm(n, false), em(n, true);
  for (int i : p.ground) {
    gm[i] = true;
    em[i] = false;
  }
  for (int i = 0; i < n; ++i)
    if (em[i]) p.excited.push_back(i);
  if (p.excited.empty())
    throw std::invalid_argument("partition: no excited states");

  const Matrix& h = model.hamiltonian.mat;
  const Matrix cross = masked(h, em, gm);
  if (drive) {
    if (drive->space != model.space)
      throw std::invalid_argument("partition: drive space mismatch");
    const Matrix dcross = masked(drive->mat, em, gm);
    const double mismatch = (cross - dcross).cwiseAbs().maxCoeff();
    if (mismatch > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
      throw std::invalid_argument(
          "partition: cross terms not carried by the drive");
    p.v_plus = Operator{model.space, dcross};
    p.h_e = Operator{model.space,
                     masked(Matrix(h - drive->mat), em, em)};
    p.drive_residual = masked(drive->mat, em, em);
  } else {
    p.v_plus = Operator{model.space, cross};
    p.h_e = Operator{model.space, masked(h, em, em)};
    p.drive_residual = Matrix::Zero(n, n);
  }
  p.v_minus = Operator{model.space, p.v_plus.mat.adjoint()};
  p.h_g = Operator{model.space, masked(h, gm, gm)};

  const Matrix recon = p.h_g.mat + p.h_e.mat + p.v_plus.mat + p.v_minus.mat +
                       p.drive_residual;
  if ((recon - h).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw std::runtime_error("partition: decomposition residual");
  return p;
}

}  // namespace detail

// All ground<->excited Hamiltonian terms are taken as the perturbative drive.
inline Partition partition(const LindbladModel& model,
                           const std::vector<int>& ground_indices) {
  return detail::make_partition(model, ground_indices, nullptr);
}

// Variant with the drive given explicitly; the rest of H must then be block
// diagonal with respect to the split, and intra-excited drive terms are
// recorded in drive_residual instead of entering h_e.
inline Partition partition(const LindbladModel& model,
                           const std::vector<int>& ground_indices,
                           const Operator& drive) {
  return detail::make_partition(model, ground_indices, &drive);
}

// H_nh = h_e - (i/2) sum_k P_e L_k^dag L_k P_e on the excited block.
inline Operator nh_hamiltonian(const Partition& p) {
  const int n = p.model.space.total();
  std::vector<bool> em(n, false);
  for (int i : p.excited) em[i] = true;
  Matrix decay = Matrix::Zero(n, n);
  for (const auto& j : p.model.jumps)
    decay.noalias() += j.mat.adjoint() * j.mat;
  return Operator{p.model.space,
                  p.h_e.mat + Complex(0.0, -0.5) *
                                  detail::masked(decay, em, em)};
}

// Connected components of the nonzero-coupling graph over the operator's
// support (indices with any nonzero row or column entry). Blocks and their
// members are sorted ascending.
inline std::vector<std::vector<int>> block_decompose(const Operator& h_nh,
                                                     double tol = 1e-12) {
  const int n = static_cast<int>(h_nh.mat.rows());
  std::vector<bool> support(n, false);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(h_nh.mat(i, j)) > tol) support[i] = support[j] = true;

  std::vector<bool> seen(n, false);
  std::vector<std::vector<int>> blocks;
  for (int s = 0; s < n; ++s) {
    if (!support[s] || seen[s]) continue;
    std::vector<int> block, stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      block.push_back(u);
      for (int v = 0; v < n; ++v) {
        if (seen[v] || !support[v]) continue;
        if (std::abs(h_nh.mat(u, v)) > tol ||
            std::abs(h_nh.mat(v, u)) > tol) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    std::sort(block.begin(), block.end());
    blocks.push_back(std::move(block));
  }
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

// Eigenpairs of the Hermitian part of the h_e block: columns of `states` are
// eigenvectors in the block's index basis, energies ascending.
struct DressedBlock {
  std::vector<int> indices;
  Eigen::VectorXd energies;
  Matrix states;
};

inline DressedBlock dressed_states(const Partition& p,
                                   const std::vector<int>& block) {
  const int b = static_cast<int>(block.size());
  Matrix sub(b, b);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) sub(i, j) = p.h_e.mat(block[i], block[j]);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sub + sub.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dressed_states: eigensolver failed");
  return {block, es.eigenvalues(), es.eigenvectors()};
}

// L_eff^k = L_k H_nh^{-1} V_+ and
// H_eff = -1/2 V_- [H_nh^{-1} + (H_nh^{-1})^dag] V_+ + h_g,
// with H_nh inverted block by block.
inline EffectiveModel effective_model(
    const Partition& p, const std::vector<std::string>& labels = {}) {
  const int n = p.model.space.total();
  const Operator hnh = nh_hamiltonian(p);
  EffectiveModel out;
  out.blocks = block_decompose(hnh);

  Matrix hinv = Matrix::Zero(n, n);
  std::vector<bool> covered(n, false);
  for (size_t bi = 0; bi < out.blocks.size(); ++bi) {
    const auto& block = out.blocks[bi];
    const int b = static_cast<int>(block.size());
    Matrix sub(b, b);
    for (int i = 0; i < b; ++i)
      for (int j = 0; j < b; ++j) sub(i, j) = hnh.mat(block[i], block[j]);
    Eigen::PartialPivLU<Matrix> lu(sub);
    const Matrix inv = lu.solve(Matrix::Identity(b, b));
    const double resid =
        (sub * inv - Matrix::Identity(b, b)).cwiseAbs().maxCoeff();
    if (!inv.allFinite() || resid > 0.5)
      throw std::runtime_error("effective_model: singular block " +
                               std::to_string(bi));
    const double cond = sub.cwiseAbs().rowwise().sum().maxCoeff() *
                        inv.cwiseAbs().rowwise().sum().maxCoeff();
    if (cond > 1e12)
      out.warnings.push_back("block " + std::to_string(bi) +
                             " condition number " + std::to_string(cond));
    for (int i = 0; i < b; ++i) {
      covered[block[i]] = true;
      for (int j = 0; j < b; ++j) hinv(block[i], block[j]) = inv(i, j);
    }
  }

  // Drive amplitude reaching a state outside every invertible block means a
  // resonant excitation with zero linewidth.
  for (int i = 0; i < n; ++i) {
    if (covered[i]) continue;
    if (p.v_plus.mat.row(i).cwiseAbs().maxCoeff() > 1e-14)
      throw std::runtime_error(
          "effective_model: drive reaches state outside invertible blocks");
  }

  std::vector<bool> gm(n, false);
  for (int i : p.ground) gm[i] = true;

  out.jumps_eff.reserve(p.model.jumps.size());
  for (size_t k = 0; k < p.model.jumps.size(); ++k) {
    Matrix leff = p.model.jumps[k].mat * hinv * p.v_plus.mat;
    double leak = 0.0;
    for (int i = 0; i < n; ++i)
      if (!gm[i]) {
        leak = std::max(leak, leff.row(i).cwiseAbs().maxCoeff());
        leff.row(i).setZero();
      }
    if (leak > 1e-9)
      out.warnings.push_back("jump " + std::to_string(k) +
                             " leaks outside ground block: " +
                             std::to_string(leak));
    const std::string label =
        k < labels.size() ? labels[k] : "L" + std::to_string(k);
    out.jumps_eff.emplace_back(label, Operator{p.model.space, std::move(leff)});
  }

  Matrix heff = -0.5 * p.v_minus.mat * (hinv + hinv.adjoint()).eval() *
                    p.v_plus.mat +
                p.h_g.mat;
  heff = 0.5 * (heff + heff.adjoint()).eval();
  out.h_eff = Operator{p.model.space, std::move(heff)};
  return out;
}

inline LindbladModel to_lindblad(const EffectiveModel& em) {
  LindbladModel m{em.h_eff.space, em.h_eff, {}};
  m.jumps.reserve(em.jumps_eff.size());
  for (const auto& j : em.jumps_eff) m.jumps.push_back(j.second);
  return m;
}

}  // namespace dissipgate
