#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "xxz/errors.hpp"
#include "xxz/hamiltonian.hpp"

namespace xxz {

struct LanczosOptions {
  std::size_t max_basis = 500;        // Krylov vectors kept before a thick restart
  std::size_t max_matvecs = 20000;
  std::size_t dense_threshold = 256;  // use the dense solver at or below this dimension
  std::size_t memory_budget = std::size_t(1) << 30;  // bytes for the Krylov basis
};

template <typename Scalar>
struct EigenResult {
  Vector<Scalar> eigenvalues;     // ascending
  Vector<Scalar> residual_norms;  // ||H v - lambda v||, computed explicitly
  Matrix<Scalar> eigenvectors;    // columns, unit norm
  std::size_t iterations = 0;     // matrix-vector products
  bool converged = false;
  bool dense = false;
};

namespace detail {

template <typename Scalar>
Vector<Scalar> start_vector(Eigen::Index n, int salt) {
  Vector<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = Scalar(1) + Scalar(0.5) * std::sin(Scalar(1.1 + 0.37 * salt) * Scalar(i) + Scalar(0.3 + salt));
  return v;
}

template <typename Scalar, typename Basis>
void orthogonalize(Vector<Scalar>& w, const Basis& V, const Matrix<Scalar>& locked, Vector<Scalar>* coeffs) {
  for (int pass = 0; pass < 2; ++pass) {
    if (locked.cols() > 0) w.noalias() -= locked * (locked.transpose() * w);
    if (V.cols() > 0) {
      Vector<Scalar> h = V.transpose() * w;
      w.noalias() -= V * h;
      if (coeffs) {
        if (pass == 0) *coeffs = h;
        else *coeffs += h;
      }
    } else if (coeffs) {
      coeffs->resize(0);
    }
  }
}

}  // namespace detail

// Lowest k eigenpairs of the symmetric operator `apply` (y = H x) restricted
// to the orthogonal complement of the columns of `locked`.
//
// Lanczos with full reorthogonalization and thick restart. The projected
// matrix is rebuilt from the Gram-Schmidt coefficients, so restarted bases
// (Ritz vectors plus one residual direction) need no special bookkeeping.
// On Krylov breakdown a fresh deterministic direction is appended, which lets
// repeated eigenvalues show up with their multiplicity.
template <typename Scalar, typename Apply>
EigenResult<Scalar> lanczos(Apply&& apply, Eigen::Index n, int k, Scalar tol_abs, const LanczosOptions& opt,
                            const Matrix<Scalar>& locked = Matrix<Scalar>()) {
  const Eigen::Index avail = n - locked.cols();
  if (k < 1 || k > avail) throw DomainError("lanczos: k out of range");
  const Eigen::Index by_memory =
      static_cast<Eigen::Index>(opt.memory_budget / (sizeof(Scalar) * static_cast<std::size_t>(n)));
  Eigen::Index cap = std::min<Eigen::Index>(static_cast<Eigen::Index>(opt.max_basis), avail);
  cap = std::min(cap, std::max<Eigen::Index>(by_memory, 2 * k + 8));
  cap = std::min(cap, avail);
  const Eigen::Index keep = std::min<Eigen::Index>(std::max<Eigen::Index>(k + 2, cap / 2), cap - 1);

  Matrix<Scalar> V(n, cap);
  Matrix<Scalar> T = Matrix<Scalar>::Zero(cap, cap);
  Vector<Scalar> w(n), h;
  EigenResult<Scalar> res;

  // A deflated run must not reuse the start vector of the run that produced
  // the locked vectors: its component in a degenerate eigenspace is exactly
  // the locked vector and vanishes after projection.
  int salt = 16 * static_cast<int>(locked.cols());
  auto fresh_direction = [&](Eigen::Index m) -> bool {
    for (int attempt = 0; attempt < 8; ++attempt) {
      w = detail::start_vector<Scalar>(n, salt++);
      detail::orthogonalize<Scalar>(w, V.leftCols(m), locked, nullptr);
      const Scalar nrm = w.norm();
      if (nrm > Scalar(1e-8) * std::sqrt(Scalar(n))) {
        V.col(m) = w / nrm;
        return true;
      }
    }
    return false;
  };

  if (!fresh_direction(0)) throw NumericalError("lanczos: could not build a start vector");
  Eigen::Index m = 1;
  std::size_t since_check = 0;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es;
  Vector<Scalar> best;

  auto finish = [&](Eigen::Index mm) {
    es.compute(T.topLeftCorner(mm, mm));
    const int kk = static_cast<int>(std::min<Eigen::Index>(k, mm));
    res.eigenvalues = es.eigenvalues().head(kk);
    res.eigenvectors = V.leftCols(mm) * es.eigenvectors().leftCols(kk);
    res.residual_norms.resize(kk);
    for (int i = 0; i < kk; ++i) {
      res.eigenvectors.col(i).normalize();
      Vector<Scalar> hv = apply(res.eigenvectors.col(i));
      if (locked.cols() > 0) hv -= locked * (locked.transpose() * hv);
      res.residual_norms[i] = (hv - res.eigenvalues[i] * res.eigenvectors.col(i)).norm();
    }
    res.iterations += static_cast<std::size_t>(kk);
  };

  int breakdowns = 0;
  while (true) {
    const Eigen::Index j = m - 1;
    w = apply(V.col(j));
    ++res.iterations;
    detail::orthogonalize<Scalar>(w, V.leftCols(m), locked, &h);
    T.col(j).head(m) = h;
    T.row(j).head(m) = h.transpose();
    const Scalar beta = w.norm();
    const Scalar scale = std::max(Scalar(1), T.topLeftCorner(m, m).cwiseAbs().maxCoeff());
    const bool breakdown = beta <= Scalar(1e-12) * scale;
    if (breakdown) ++breakdowns;
    ++since_check;

    // The first breakdowns are not trusted as convergence: the start vector
    // may have missed an invariant subspace or a repeated eigenvalue.
    const bool exhausted = m == avail;
    const bool want_check =
        m >= k && (exhausted || (breakdown ? breakdowns > 2 : (m == cap || since_check >= std::max<std::size_t>(
                                                                                   5, static_cast<std::size_t>(m) / 8))));
    if (want_check) {
      since_check = 0;
      es.compute(T.topLeftCorner(m, m));
      best = es.eigenvalues().head(k);
      Scalar worst = 0;
      for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(beta * es.eigenvectors()(m - 1, i)));
      if (worst <= tol_abs || exhausted) {
        finish(m);
        if (res.residual_norms.maxCoeff() <= tol_abs || exhausted) {
          res.converged = res.residual_norms.maxCoeff() <= tol_abs;
          return res;
        }
      }
    }
    if (res.iterations >= opt.max_matvecs) {
      std::vector<double> ritz;
      for (Eigen::Index i = 0; i < best.size(); ++i) ritz.push_back(static_cast<double>(best[i]));
      throw NumericalError("lanczos: no convergence within " + std::to_string(opt.max_matvecs) +
                               " matrix-vector products",
                           ritz);
    }

    if (m == cap) {
      es.compute(T.topLeftCorner(m, m));
      Matrix<Scalar> kept = V.leftCols(m) * es.eigenvectors().leftCols(keep);
      V.leftCols(keep) = kept;
      T.setZero();
      T.diagonal().head(keep) = es.eigenvalues().head(keep);
      m = keep;
    }
    if (breakdown) {
      if (!fresh_direction(m)) {
        finish(m);
        res.converged = res.residual_norms.maxCoeff() <= tol_abs;
        return res;
      }
    } else {
      V.col(m) = w / beta;
    }
    ++m;
  }
}

template <typename Scalar>
EigenResult<Scalar> dense_lowest_k(const SparseSymmetricMatrix<Scalar>& h, int k) {
  const Eigen::Index n = h.dim();
  k = static_cast<int>(std::min<Eigen::Index>(k, n));
  Matrix<Scalar> a = h.to_dense();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(a);
  EigenResult<Scalar> res;
  res.eigenvalues = es.eigenvalues().head(k);
  res.eigenvectors = es.eigenvectors().leftCols(k);
  res.residual_norms.resize(k);
  for (int i = 0; i < k; ++i)
    res.residual_norms[i] = (a * res.eigenvectors.col(i) - res.eigenvalues[i] * res.eigenvectors.col(i)).norm();
  res.converged = true;
  res.dense = true;
  return res;
}

// k lowest eigenpairs with residuals <= tol * ||H||_1.
template <typename Scalar>
EigenResult<Scalar> lowest_k(const SparseSymmetricMatrix<Scalar>& h, int k, Scalar tol,
                             const LanczosOptions& opt = {}) {
  if (!(tol > Scalar(0) && tol <= Scalar(1e-4))) throw DomainError("tolerance must lie in (0, 1e-4]");
  if (k < 1) throw DomainError("k must be positive");
  const Eigen::Index n = h.dim();
  if (n == 0) throw DomainError("empty matrix");
  if (k >= n || static_cast<std::size_t>(n) <= opt.dense_threshold) return dense_lowest_k(h, k);
  const Scalar norm = h.norm1();
  const Scalar tol_abs = tol * (norm > Scalar(0) ? norm : Scalar(1));
  auto apply = [&h](const auto& x) -> Vector<Scalar> { return h.storage() * x; };
  return lanczos<Scalar>(apply, n, k, tol_abs, opt);
}

// All eigenvalues, ascending. Refuses dimensions above max_dim.
std::vector<double> full_spectrum(const SparseSymmetricMatrix<double>& h, std::size_t max_dim = 4000);

double zero_threshold(double norm1);

struct GapOptions {
  double tol = 1e-10;
  int k = 4;
  int threads = 1;
  bool resolve_multiplicity = true;  // extra deflated runs on the Lanczos path
  LanczosOptions lanczos;
};

struct GapReport {
  int two_j = 0;
  int length = 0;
  int two_m = 0;
  double delta_inv = 0;
  std::size_t dim = 0;
  double ground_energy = 0;
  double gap = 0;
  int multiplicity = 1;
  double zero_threshold = 0;
  double norm1 = 0;
  std::vector<double> low_eigenvalues;
  std::vector<double> residual_norms;
  std::size_t iterations = 0;
  bool dense = false;
};

GapReport spectral_gap(const SpinParams& params, int two_m, const GapOptions& opt = {});

}  // namespace xxz
