#pragma once

#include <utility>
#include <vector>

#include "xxz/eigensolve.hpp"

namespace xxz {

enum class TridiagonalKind { boson_j, jacobi_a };

// Symmetric tridiagonal matrix on consecutive sites first_site, first_site+1, ...
template <typename Scalar = double>
struct TridiagonalOperator {
  TridiagonalKind kind = TridiagonalKind::boson_j;
  Vector<Scalar> diag;
  Vector<Scalar> offdiag;
  Scalar eta = 0;
  Scalar r = 0;
  int first_site = 1;

  Eigen::Index size() const { return diag.size(); }

  Matrix<Scalar> to_dense() const {
    Matrix<Scalar> m = diag.asDiagonal();
    for (Eigen::Index i = 0; i + 1 < diag.size(); ++i) m(i, i + 1) = m(i + 1, i) = offdiag[i];
    return m;
  }

  Scalar norm1() const {
    Scalar best = 0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      Scalar s = std::abs(diag[i]);
      if (i > 0) s += std::abs(offdiag[i - 1]);
      if (i + 1 < diag.size()) s += std::abs(offdiag[i]);
      best = std::max(best, s);
    }
    return best;
  }

  // Ascending eigenvalues (symmetric tridiagonal QR).
  Vector<Scalar> eigenvalues() const {
    if (diag.size() == 1) return diag;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es;
    es.computeFromTridiagonal(diag, offdiag, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
};

// cosh(a)/cosh(b) without overflow.
double cosh_ratio(double a, double b);

// 4 sinh^2(eta) / (cosh(2 eta (n - r)) + cosh(2 eta)) without overflow.
double well_depth(double eta, double offset);

double sech(double x);

struct InterfacePhase {
  double mu = 0;
  double r = 0;
  double eta = 0;
  int window = 0;      // sum runs over k in [-window+1, window]
  double tail = 0;     // bound on the neglected part of the bi-infinite sum
};

// Sum over k in [-window+1, window] of tanh(eta (k - r)).
double phase_sum(double eta, double r, int window);

// Solves phase_sum(eta, r, window) = mu for r by bisection.
InterfacePhase solve_interface_phase(double mu, double eta, int window, double tol = 1e-12);

// r with sum_{a=1}^{L} tanh(eta (a - r)) = mu on a finite chain.
double solve_chain_phase(double mu, double eta, int length, double tol = 1e-13);

// Boson coupling matrix on sites first_site .. first_site+L-1, scaled by delta_inv.
TridiagonalOperator<double> boson_matrix(int length, double eta, double r, int first_site = 1);

// Truncated Jacobi operator on N sites centered on r.
TridiagonalOperator<double> jacobi_operator(int truncation, double eta, double r);

// Second eigenvalue of the truncated Jacobi operator at phase r.
struct JacobiGap {
  double r = 0;
  double delta_inv = 0;
  int truncation = 0;
  double zero_mode = 0;          // smallest eigenvalue
  double gap = 0;                // second smallest
  double doubled_gap = 0;        // same at truncation 2N
  double truncation_change = 0;  // |gap - doubled_gap|
};

JacobiGap jacobi_gap(double r, double delta_inv, int truncation);

// Two lowest eigenvalues of the truncated Jacobi operator.
std::pair<double, double> jacobi_low_pair(double r, double delta_inv, int truncation);

struct GammaInfinity {
  double mu = 0;
  InterfacePhase phase;
  JacobiGap jacobi;
  double value = 0;
  bool truncation_converged = false;
};

GammaInfinity gamma_infinity(double mu, double delta_inv, int truncation, double tol = 1e-8);

struct OptimalAnisotropy {
  double delta_inv = 0;
  double gap = 0;
  int truncation = 0;
  int grid = 0;
  double refine_tol = 0;
  std::vector<double> local_maxima;  // refined arguments, ascending
  std::vector<double> local_values;
  int evaluations = 0;
};

// argmax over delta_inv in (0, 1) of gamma_infinity(0, delta_inv).
OptimalAnisotropy optimal_anisotropy_scan(int truncation = 500, int grid = 64, double refine_tol = 1e-6);

struct BosonComparison {
  int two_j = 0;
  int length = 0;
  int two_m = 0;
  double delta_inv = 0;
  double eta = 0;
  double r = 0;
  double gap = 0;
  double gap_over_j = 0;
  double lambda1 = 0;
  double relative_deviation = 0;
  std::vector<double> boson_spectrum;  // eigenvalues of the coupling matrix
};

BosonComparison boson_vs_exact(int two_j, int length, double delta_inv, int two_m, const GapOptions& opt = {});

}  // namespace xxz
