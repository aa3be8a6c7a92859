#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dissipgate {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

// Ordered tensor-product structure. Leg order is fixed and identifies
// subsystems: emitter 1, emitter 2, mode a, (mode b). Emitter level encoding:
// 0 <-> |0>, 1 <-> |1>, 2 <-> |e>, 3 <-> |f>.
struct Space {
  std::vector<int> dims;

  int total() const {
    int n = 1;
    for (int d : dims) {
      if (d < 1) throw std::invalid_argument("Space: dims must be >= 1");
      n *= d;
    }
    return n;
  }
  bool operator==(const Space& o) const { return dims == o.dims; }
  bool operator!=(const Space& o) const { return !(*this == o); }
};

struct Operator {
  Space space;
  Matrix mat;
};

struct DensityMatrix {
  Space space;
  Matrix mat;

  // Hermitian to 1e-10, unit trace to 1e-8, min eigenvalue >= -1e-8.
  void validate(double herm_tol = 1e-10, double trace_tol = 1e-8,
                double eig_floor = -1e-8) const {
    if (mat.rows() != mat.cols() || mat.rows() != space.total())
      throw std::invalid_argument("DensityMatrix: shape mismatch");
    if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(mat.trace() - Complex(1.0, 0.0)) > trace_tol)
      throw std::invalid_argument("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mat + mat.adjoint()),
                                             Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < eig_floor)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  }
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Operator identity(const Space& space) {
  return {space, Matrix::Identity(space.total(), space.total())};
}

// identity x ... x local x ... x identity with local at the given leg.
inline Operator embed(const Operator& local, int site, const Space& space) {
  if (site < 0 || site >= static_cast<int>(space.dims.size()))
    throw std::invalid_argument("embed: site out of range");
  if (local.space.dims.size() != 1 || local.space.dims[0] != space.dims[site])
    throw std::invalid_argument("embed: local operator dimension mismatch");
  Matrix out = Matrix::Identity(1, 1);
  for (int k = 0; k < static_cast<int>(space.dims.size()); ++k) {
    if (k == site)
      out = kron(out, local.mat);
    else
      out = kron(out, Matrix::Identity(space.dims[k], space.dims[k]));
  }
  return {space, std::move(out)};
}

inline Operator embed(const Matrix& local, int site, const Space& space) {
  return embed(Operator{Space{{static_cast<int>(local.rows())}}, local}, site,
               space);
}

// Truncated lowering operator; a^dag a = diag(0..d-1).
inline Operator annihilation(int d) {
  if (d < 2) throw std::invalid_argument("annihilation: d must be >= 2");
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {Space{{d}}, std::move(a)};
}

// |ket><bra| on a d-level subsystem.
inline Operator transition(int ket, int bra, int d) {
  if (ket < 0 || ket >= d || bra < 0 || bra >= d)
    throw std::invalid_argument("transition: index out of range");
  Matrix m = Matrix::Zero(d, d);
  m(ket, bra) = 1.0;
  return {Space{{d}}, std::move(m)};
}

// Row-major multi-index: leg 0 varies slowest.
inline int basis_index(const Space& space, const std::vector<int>& levels) {
  if (levels.size() != space.dims.size())
    throw std::invalid_argument("basis_index: wrong number of levels");
  int idx = 0;
  for (size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] < 0 || levels[k] >= space.dims[k])
      throw std::invalid_argument("basis_index: level out of range");
    idx = idx * space.dims[k] + levels[k];
  }
  return idx;
}

inline DensityMatrix basis_state(const Space& space,
                                 const std::vector<int>& levels) {
  const int n = space.total();
  Matrix rho = Matrix::Zero(n, n);
  const int k = basis_index(space, levels);
  rho(k, k) = 1.0;
  return {space, std::move(rho)};
}

// Reduced state on the kept legs (keep must be sorted, nonempty, in range).
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<int>& keep) {
  const auto& dims = rho.space.dims;
  const int nlegs = static_cast<int>(dims.size());
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep");
  for (size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= nlegs)
      throw std::invalid_argument("partial_trace: keep index out of range");
    if (k > 0 && keep[k] <= keep[k - 1])
      throw std::invalid_argument("partial_trace: keep must be sorted");
  }
  std::vector<bool> kept(nlegs, false);
  for (int k : keep) kept[k] = true;

  Space out_space;
  for (int k : keep) out_space.dims.push_back(dims[k]);
  const int dout = out_space.total();
  Matrix out = Matrix::Zero(dout, dout);

  const int dtot = rho.space.total();
  std::vector<int> ilev(nlegs), jlev(nlegs);
  for (int i = 0; i < dtot; ++i) {
    int rem = i;
    for (int k = nlegs - 1; k >= 0; --k) {
      ilev[k] = rem % dims[k];
      rem /= dims[k];
    }
    for (int j = 0; j < dtot; ++j) {
      rem = j;
      for (int k = nlegs - 1; k >= 0; --k) {
        jlev[k] = rem % dims[k];
        rem /= dims[k];
      }
      bool diag_traced = true;
      for (int k = 0; k < nlegs; ++k)
        if (!kept[k] && ilev[k] != jlev[k]) {
          diag_traced = false;
          break;
        }
      if (!diag_traced) continue;
      int oi = 0, oj = 0;
      for (int k : keep) {
        oi = oi * dims[k] + ilev[k];
        oj = oj * dims[k] + jlev[k];
      }
      out(oi, oj) += rho.mat(i, j);
    }
  }
  return {std::move(out_space), std::move(out)};
}

}  // namespace dissipgate
