#pragma once

#include <cstdint>

#include "xxz/basis.hpp"
#include "xxz/hamiltonian.hpp"

namespace xxz {

struct KinkGroundState {
  SpinParams params;
  int two_m = 0;
  Vector<double> coefficients;  // unit norm, positive, SectorBasis order
  // log of the squared norm of the unnormalized coefficients
  // prod_a binom(2J, J+m_a)^{1/2} q^{-a m_a} (0 in the Ising limit).
  double log_norm_sq = 0;
};

double log_binomial(int n, int k);
std::uint64_t binomial_exact(int n, int k);  // n <= 62

// Closed-form kink ground state of a sector. In the Ising limit this is the
// single classical configuration with all down spins packed on the left.
KinkGroundState kink_vector(const SpinParams& params, int two_m);

// ||H Psi_0|| for the normalized kink vector.
double residual(const SpinParams& params, int two_m);

struct QSeriesValue {
  double q = 0;
  double partial_sum = 0;   // sum_{n<=N} q^{2n^2} / prod_{j<=n} (1-q^{2j})^2
  double product_form = 0;  // 1 / prod_{j<=N} (1-q^{2j})
  int terms_used = 0;
};

QSeriesValue heine_check(double q, int n_terms);

struct SpinHalfNorm {
  double finite_sum = 0;   // sum over 1 <= a_1 < ... < a_N <= L of q^{2(a_1+...+a_N)}
  double closed_form = 0;  // q^{N(N+1)} / prod_{j<=N} (1-q^{2j})
};

SpinHalfNorm spin_half_norm_sq(int length, int n_down, double q);

}  // namespace xxz
