#pragma once

#include <complex>

#ifndef LAPACK_COMPLEX_CPP
#define LAPACK_COMPLEX_CPP
#endif
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif

#include <lapacke.h>

#include <Eigen/SparseCore>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dissipgate/hilbert.hpp"

namespace dissipgate {

// Dense superoperators are only materialized for small spaces; larger spaces
// go through the matrix-free paths (adaptive RK, Krylov).
inline constexpr int kMaxDenseLiouvillianDim = 32;

enum class EvolveMethod { kAdaptiveRK, kLiouvillianExpm, kKrylov };

// Hamiltonian in angular units (rad/ns); each jump is sqrt(rate)-scaled.
struct LindbladModel {
  Space space;
  Operator hamiltonian;
  std::vector<Operator> jumps;

  void validate(double herm_tol = 1e-10) const {
    const int n = space.total();
    if (hamiltonian.space != space || hamiltonian.mat.rows() != n ||
        hamiltonian.mat.cols() != n)
      throw std::invalid_argument("LindbladModel: hamiltonian space mismatch");
    if ((hamiltonian.mat - hamiltonian.mat.adjoint()).cwiseAbs().maxCoeff() >
        herm_tol)
      throw std::invalid_argument("LindbladModel: hamiltonian not Hermitian");
    for (const auto& j : jumps)
      if (j.space != space || j.mat.rows() != n || j.mat.cols() != n)
        throw std::invalid_argument("LindbladModel: jump space mismatch");
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  LindbladModel model;
  // Index into times of the last sample of each schedule phase (empty for
  // single-model evolutions).
  std::vector<int> phase_boundaries;
};

struct Schedule {
  std::vector<std::pair<LindbladModel, double>> phases;

  void validate() const {
    if (phases.empty()) throw std::invalid_argument("Schedule: no phases");
    for (const auto& [m, dt] : phases) {
      m.validate();
      if (!(dt > 0.0)) throw std::invalid_argument("Schedule: duration <= 0");
      if (m.space != phases.front().first.space)
        throw std::invalid_argument("Schedule: phases on different spaces");
    }
  }
};

// -i[H, rho] + sum_k (L rho L^dag - 1/2 {L^dag L, rho}). Dense reference
// implementation; integrators use RhsApplier below.
inline Matrix rhs(const LindbladModel& model, const DensityMatrix& rho) {
  if (rho.space != model.space)
    throw std::invalid_argument("rhs: state space mismatch");
  const Matrix& h = model.hamiltonian.mat;
  Matrix out = Complex(0.0, -1.0) * (h * rho.mat - rho.mat * h);
  for (const auto& j : model.jumps) {
    const Matrix lr = j.mat * rho.mat;
    out.noalias() += lr * j.mat.adjoint();
    const Matrix k = j.mat.adjoint() * j.mat;
    out.noalias() -= 0.5 * (k * rho.mat + rho.mat * k);
  }
  return out;
}

using SparseCMatrix = Eigen::SparseMatrix<Complex>;

// Precomputed sparse views of one model's operators. apply() uses internal
// scratch, so one instance must not be shared across threads.
class RhsApplier {
 public:
  explicit RhsApplier(const LindbladModel& model) : n_(model.space.total()) {
    h_ = model.hamiltonian.mat.sparseView(1.0, 1e-300);
    Matrix ksum = Matrix::Zero(n_, n_);
    for (const auto& j : model.jumps) {
      ls_.push_back(j.mat.sparseView(1.0, 1e-300));
      lds_.push_back(Matrix(j.mat.adjoint()).sparseView(1.0, 1e-300));
      ksum.noalias() += j.mat.adjoint() * j.mat;
    }
    khalf_ = Matrix(0.5 * ksum).sparseView(1.0, 1e-300);
    scratch_.resize(n_, n_);
  }

  int dim() const { return n_; }

  void apply(const Matrix& rho, Matrix& out) const {
    const Complex mi(0.0, -1.0);
    out.noalias() = h_ * rho;
    scratch_.noalias() = rho * h_;
    out = mi * (out - scratch_);
    out.noalias() -= khalf_ * rho;
    out.noalias() -= rho * khalf_;
    for (size_t k = 0; k < ls_.size(); ++k) {
      scratch_.noalias() = ls_[k] * rho;
      out.noalias() += scratch_ * lds_[k];
    }
  }

  Matrix apply(const Matrix& rho) const {
    Matrix out(n_, n_);
    apply(rho, out);
    return out;
  }

  // Column-stacked action: vec(rhs(unvec(v))).
  Vector apply_vec(const Vector& v) const {
    Eigen::Map<const Matrix> rho(v.data(), n_, n_);
    Vector out(n_ * n_);
    Eigen::Map<Matrix> outm(out.data(), n_, n_);
    Matrix tmp(n_, n_);
    apply(rho, tmp);
    outm = tmp;
    return out;
  }

 private:
  int n_;
  SparseCMatrix h_, khalf_;
  std::vector<SparseCMatrix> ls_, lds_;
  mutable Matrix scratch_;
};

// Dense generator on column-stacked rho:
// -i(I (x) H - H^T (x) I) + sum_k [conj(L) (x) L
//   - 1/2 I (x) L^dag L - 1/2 (L^dag L)^T (x) I].
inline Matrix liouvillian(const LindbladModel& model) {
  const int n = model.space.total();
  if (n > kMaxDenseLiouvillianDim)
    throw std::invalid_argument(
        "liouvillian: dimension " + std::to_string(n) + " exceeds dense cap " +
        std::to_string(kMaxDenseLiouvillianDim));
  const Matrix id = Matrix::Identity(n, n);
  const Matrix& h = model.hamiltonian.mat;
  Matrix sup =
      Complex(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& j : model.jumps) {
    const Matrix k = j.mat.adjoint() * j.mat;
    sup.noalias() += kron(j.mat.conjugate(), j.mat);
    sup.noalias() -= 0.5 * kron(id, k);
    sup.noalias() -= 0.5 * kron(k.transpose(), id);
  }
  return sup;
}

namespace detail {

inline void eig_general(const Matrix& a, Vector& w, Matrix& v) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Matrix work = a;
  w.resize(n);
  v.resize(n, n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n, w.data(),
                    nullptr, 1, v.data(), n);
  if (info != 0)
    throw std::runtime_error("eig_general: zgeev failed, info=" +
                             std::to_string(info));
}

}  // namespace detail

// exp(L t) through one eigendecomposition of the dense Liouvillian; cheap to
// re-evaluate on many times, initial states, and observables.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const LindbladModel& model)
      : n_(model.space.total()) {
    model.validate();
    const Matrix sup = liouvillian(model);
    detail::eig_general(sup, w_, v_);
    const int nn = n_ * n_;
    // Spot-check a few eigenpairs; zgeev rarely fails silently, but the
    // propagator is trusted as an oracle elsewhere.
    const double scale = std::max(1.0, sup.cwiseAbs().maxCoeff());
    for (int k = 0; k < nn; k += std::max(1, nn / 4)) {
      const double resid =
          (sup * v_.col(k) - w_(k) * v_.col(k)).cwiseAbs().maxCoeff();
      if (resid > 1e-8 * scale * nn)
        throw std::runtime_error("SpectralPropagator: eigenpair residual " +
                                 std::to_string(resid));
    }
    lu_.compute(v_);
  }

  int dim() const { return n_; }
  const Vector& eigenvalues() const { return w_; }

  // c with vec(rho0) = V c; the expansion is checked by back-substitution.
  Vector coefficients(const Matrix& rho0) const {
    Eigen::Map<const Vector> v0(rho0.data(), n_ * n_);
    Vector c = lu_.solve(v0);
    const double resid = (v_ * c - v0).cwiseAbs().maxCoeff();
    if (resid > 1e-8 * std::max(1.0, v0.cwiseAbs().maxCoeff()))
      throw std::runtime_error(
          "SpectralPropagator: eigenbasis solve residual " +
          std::to_string(resid));
    return c;
  }

  Matrix state(const Vector& c, double t) const {
    Vector y = v_ * (c.array() * (w_.array() * t).exp()).matrix();
    Eigen::Map<Matrix> m(y.data(), n_, n_);
    Matrix rho = m;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return rho;
  }

  // Row r with tr(M rho(t)) = sum_k r_k c_k exp(w_k t).
  Vector observable_row(const Matrix& obs) const {
    Matrix obst = obs.transpose();
    Eigen::Map<const Vector> vo(obst.data(), n_ * n_);
    return v_.transpose() * vo;
  }

  double expectation(const Vector& row, const Vector& c, double t) const {
    Complex acc = 0.0;
    for (int k = 0; k < row.size(); ++k)
      acc += row(k) * c(k) * std::exp(w_(k) * t);
    return acc.real();
  }

  // Exact integral of tr(M rho(t)) over [0, t_final].
  double integral_expectation(const Vector& row, const Vector& c,
                              double t_final) const {
    Complex acc = 0.0;
    for (int k = 0; k < row.size(); ++k) {
      const Complex w = w_(k);
      const Complex psi = (std::abs(w) * t_final < 1e-12)
                              ? Complex(t_final, 0.0)
                              : (std::exp(w * t_final) - 1.0) / w;
      acc += row(k) * c(k) * psi;
    }
    return acc.real();
  }

 private:
  int n_;
  Vector w_;
  Matrix v_;
  Eigen::PartialPivLU<Matrix> lu_;
};

// Arnoldi approximation of exp(t A) v with matrix-free A, substepping on the
// classic h_{m+1,m} residual estimate.
template <class ApplyVec>
Vector krylov_expm(ApplyVec&& apply, Vector v, double t, double tol = 1e-9,
                   int m_max = 40) {
  if (t <= 0.0) return v;
  const Eigen::Index nn = v.size();
  const int m = static_cast<int>(std::min<Eigen::Index>(m_max, nn));
  double t_done = 0.0;
  double tau = t;
  int guard = 0;
  while (t_done < t * (1.0 - 1e-14)) {
    if (++guard > 20000)
      throw std::runtime_error("krylov_expm: substep limit exceeded");
    const double beta = v.norm();
    if (!(beta > 0.0)) return v;
    Matrix basis(nn, m + 1);
    Matrix h = Matrix::Zero(m + 1, m);
    basis.col(0) = v / beta;
    int msize = m;
    bool happy = false;
    for (int j = 0; j < m; ++j) {
      Vector w = apply(Vector(basis.col(j)));
      for (int rep = 0; rep < 2; ++rep)
        for (int i = 0; i <= j; ++i) {
          const Complex hij = basis.col(i).dot(w);
          h(i, j) += hij;
          w -= hij * basis.col(i);
        }
      const double hnorm = w.norm();
      h(j + 1, j) = hnorm;
      if (hnorm < 1e-12 * std::max(1.0, beta)) {
        msize = j + 1;
        happy = true;
        break;
      }
      if (j + 1 < m + 1) basis.col(j + 1) = w / hnorm;
    }
    int inner_guard = 0;
    while (true) {
      if (++inner_guard > 200)
        throw std::runtime_error("krylov_expm: step rejection limit");
      const double step = std::min(tau, t - t_done);
      const Matrix hm = h.topLeftCorner(msize, msize);
      const Matrix f = (step * hm).exp();
      const double err =
          happy ? 0.0
                : beta * std::abs(h(msize, msize - 1)) *
                      std::abs(f(msize - 1, 0));
      if (err <= tol * std::max(1.0, beta) || step <= 1e-14 * t) {
        v = basis.leftCols(msize) * (beta * f.col(0));
        t_done += step;
        tau = std::min(step * 2.0, t - t_done > 0 ? t - t_done : step);
        break;
      }
      tau = step * 0.5;
    }
  }
  return v;
}

namespace detail {

// Dormand-Prince 5(4) on the density matrix, WRMS error control,
// re-symmetrization after accepted steps, exact landing on grid points.
inline std::vector<Matrix> rk_series(const RhsApplier& ap, const Matrix& rho0,
                                     const std::vector<double>& times,
                                     double atol = 1e-11, double rtol = 1e-10) {
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                      e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                      e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  const int n = ap.dim();
  const double nentries = static_cast<double>(n) * n;
  Matrix y = rho0;
  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), k5(n, n), k6(n, n), k7(n, n);
  Matrix ynew(n, n), errm(n, n), stage(n, n);

  std::vector<Matrix> out;
  out.reserve(times.size());

  double t = 0.0;
  ap.apply(y, k1);
  double h = 1e-2 / std::max(1e-8, k1.cwiseAbs().maxCoeff());
  if (!std::isfinite(h) || h <= 0.0) h = 1e-3;
  h = std::min(h, times.back() > 0 ? times.back() : 1.0);
  long steps = 0;

  for (double target : times) {
    while (t < target * (1.0 - 1e-15) || (target == 0.0 && t < 0.0)) {
      if (++steps > 50'000'000)
        throw std::runtime_error("adaptive step count exceeded at t=" +
                                 std::to_string(t) + " ns");
      bool clipped = false;
      double ht = h;
      if (t + ht >= target) {
        ht = target - t;
        clipped = true;
      }
      stage = y + (ht * a21) * k1;
      ap.apply(stage, k2);
      stage = y + ht * (a31 * k1 + a32 * k2);
      ap.apply(stage, k3);
      stage = y + ht * (a41 * k1 + a42 * k2 + a43 * k3);
      ap.apply(stage, k4);
      stage = y + ht * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      ap.apply(stage, k5);
      stage = y + ht * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      ap.apply(stage, k6);
      ynew = y + ht * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      ap.apply(ynew, k7);
      errm = ht * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double acc = 0.0;
      for (int cj = 0; cj < n; ++cj)
        for (int ri = 0; ri < n; ++ri) {
          const double sc =
              atol + rtol * std::max(std::abs(y(ri, cj)),
                                     std::abs(ynew(ri, cj)));
          const double q = std::abs(errm(ri, cj)) / sc;
          acc += q * q;
        }
      const double errnorm = std::sqrt(acc / nentries);

      if (std::isfinite(errnorm) && errnorm <= 1.0) {
        t = clipped ? target : t + ht;
        y = 0.5 * (ynew + ynew.adjoint()).eval();
        ap.apply(y, k1);
        const double fac = std::clamp(
            0.9 * std::pow(std::max(errnorm, 1e-10), -0.2), 0.2, 5.0);
        const double hnew = ht * fac;
        h = clipped ? std::max(h, hnew) : hnew;
      } else {
        const double fac =
            std::isfinite(errnorm)
                ? std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 0.9)
                : 0.2;
        h = ht * fac;
      }
      if (h < 1e-14 * std::max(1.0, std::abs(t)))
        throw std::runtime_error("adaptive step underflow at t=" +
                                 std::to_string(t) + " ns");
    }
    out.push_back(y);
  }
  return out;
}

// Unitary evolution of a density matrix through the Hermitian
// eigendecomposition of H.
inline std::vector<Matrix> unitary_series(const Matrix& h, const Matrix& rho0,
                                          const std::vector<double>& times) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("unitary_series: eigensolver failed");
  const Matrix& p = es.eigenvectors();
  const Eigen::VectorXd energies = es.eigenvalues();
  const Matrix rho_e = p.adjoint() * rho0 * p;
  const int n = static_cast<int>(h.rows());
  std::vector<Matrix> out;
  out.reserve(times.size());
  Matrix phased(n, n);
  for (double t : times) {
    for (int cj = 0; cj < n; ++cj)
      for (int ri = 0; ri < n; ++ri)
        phased(ri, cj) =
            rho_e(ri, cj) *
            std::exp(Complex(0.0, -(energies(ri) - energies(cj)) * t));
    out.push_back(p * phased * p.adjoint());
  }
  return out;
}

inline void check_times(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("evolve: empty time grid");
  if (times.front() < 0.0)
    throw std::invalid_argument("evolve: negative time");
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1])
      throw std::invalid_argument("evolve: times not strictly increasing");
}

}  // namespace detail

inline Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0,
                         const std::vector<double>& times,
                         EvolveMethod method = EvolveMethod::kAdaptiveRK) {
  model.validate();
  if (rho0.space != model.space)
    throw std::invalid_argument("evolve: state space mismatch");
  detail::check_times(times);
  const int n = model.space.total();

  std::vector<Matrix> mats;
  switch (method) {
    case EvolveMethod::kAdaptiveRK: {
      RhsApplier ap(model);
      mats = detail::rk_series(ap, rho0.mat, times);
      break;
    }
    case EvolveMethod::kLiouvillianExpm: {
      if (n > kMaxDenseLiouvillianDim)
        throw std::invalid_argument(
            "evolve: dimension too large for expm path (> " +
            std::to_string(kMaxDenseLiouvillianDim) + ")");
      SpectralPropagator prop(model);
      const Vector c = prop.coefficients(rho0.mat);
      mats.reserve(times.size());
      for (double t : times) mats.push_back(prop.state(c, t));
      break;
    }
    case EvolveMethod::kKrylov: {
      RhsApplier ap(model);
      Vector v(n * n);
      Eigen::Map<Matrix>(v.data(), n, n) = rho0.mat;
      auto applier = [&ap](const Vector& x) { return ap.apply_vec(x); };
      mats.reserve(times.size());
      double prev = 0.0;
      for (double t : times) {
        v = krylov_expm(applier, v, t - prev);
        prev = t;
        Eigen::Map<Matrix> m(v.data(), n, n);
        Matrix rho = 0.5 * (Matrix(m) + Matrix(m).adjoint());
        Eigen::Map<Matrix>(v.data(), n, n) = rho;
        mats.push_back(std::move(rho));
      }
      break;
    }
  }

  Trajectory traj;
  traj.times = times;
  traj.model = model;
  traj.states.reserve(mats.size());
  for (auto& m : mats)
    traj.states.push_back(DensityMatrix{model.space, std::move(m)});
  return traj;
}

// Integrates each phase from the previous phase's final state. Method is
// chosen per phase: exact unitary when there are no jumps, spectral when the
// dense Liouvillian fits, Krylov otherwise.
inline Trajectory evolve_schedule(const Schedule& schedule,
                                  const DensityMatrix& rho0,
                                  int samples_per_phase) {
  schedule.validate();
  if (samples_per_phase < 1)
    throw std::invalid_argument("evolve_schedule: samples_per_phase < 1");
  const Space& space = schedule.phases.front().first.space;
  if (rho0.space != space)
    throw std::invalid_argument("evolve_schedule: state space mismatch");

  Trajectory traj;
  traj.model = schedule.phases.front().first;
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);

  double t_offset = 0.0;
  Matrix current = rho0.mat;
  for (const auto& [model, duration] : schedule.phases) {
    std::vector<double> local(samples_per_phase);
    for (int i = 0; i < samples_per_phase; ++i)
      local[i] = duration * (i + 1) / samples_per_phase;

    std::vector<Matrix> mats;
    if (model.jumps.empty()) {
      mats = detail::unitary_series(model.hamiltonian.mat, current, local);
    } else if (model.space.total() <= kMaxDenseLiouvillianDim) {
      SpectralPropagator prop(model);
      const Vector c = prop.coefficients(current);
      for (double t : local) mats.push_back(prop.state(c, t));
    } else {
      const int n = model.space.total();
      RhsApplier ap(model);
      auto applier = [&ap](const Vector& x) { return ap.apply_vec(x); };
      Vector v(n * n);
      Eigen::Map<Matrix>(v.data(), n, n) = current;
      double prev = 0.0;
      for (double t : local) {
        v = krylov_expm(applier, v, t - prev);
        prev = t;
        Eigen::Map<Matrix> m(v.data(), n, n);
        Matrix rho = 0.5 * (Matrix(m) + Matrix(m).adjoint());
        Eigen::Map<Matrix>(v.data(), n, n) = rho;
        mats.push_back(std::move(rho));
      }
    }

    for (size_t i = 0; i < mats.size(); ++i) {
      traj.times.push_back(t_offset + local[i]);
      traj.states.push_back(DensityMatrix{space, mats[i]});
    }
    current = mats.back();
    t_offset += duration;
    traj.phase_boundaries.push_back(static_cast<int>(traj.times.size()) - 1);
  }
  return traj;
}

// Indices connected to the seeds through nonzero entries of H or any jump
// (both directions). Restriction to this closure is exact for states
// supported on it.
inline std::vector<int> reachable_set(const LindbladModel& model,
                                      const std::vector<int>& seeds,
                                      double tol = 1e-15) {
  const int n = model.space.total();
  std::vector<bool> seen(n, false);
  std::vector<int> stack;
  for (int s : seeds) {
    if (s < 0 || s >= n)
      throw std::invalid_argument("reachable_set: seed out of range");
    if (!seen[s]) {
      seen[s] = true;
      stack.push_back(s);
    }
  }
  auto connected = [&](const Matrix& m, int u, int v) {
    return std::abs(m(u, v)) > tol || std::abs(m(v, u)) > tol;
  };
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (seen[v]) continue;
      bool hit = connected(model.hamiltonian.mat, u, v);
      for (size_t k = 0; !hit && k < model.jumps.size(); ++k)
        hit = connected(model.jumps[k].mat, u, v);
      if (hit) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

// Submodel on the kept indices (sorted, unique). The result lives on a flat
// single-leg space; pair with reachable_set for exact reductions.
inline LindbladModel restrict_model(const LindbladModel& model,
                                    const std::vector<int>& keep) {
  const int n = model.space.total();
  if (keep.empty()) throw std::invalid_argument("restrict_model: empty keep");
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n)
      throw std::invalid_argument("restrict_model: index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("restrict_model: keep must be sorted");
  }
  const int k = static_cast<int>(keep.size());
  auto sub = [&](const Matrix& a) {
    Matrix s(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) s(i, j) = a(keep[i], keep[j]);
    return s;
  };
  const Space sp{{k}};
  LindbladModel out{sp, Operator{sp, sub(model.hamiltonian.mat)}, {}};
  for (const auto& j : model.jumps)
    out.jumps.push_back(Operator{sp, sub(j.mat)});
  return out;
}

}  // namespace dissipgate
