#include "xxz/ground_state.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "xxz/errors.hpp"

namespace xxz {

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::uint64_t binomial_exact(int n, int k) {
  if (n > 62) throw DomainError("binomial_exact: n too large");
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

KinkGroundState kink_vector(const SpinParams& params, int two_m) {
  SectorBasis basis(params.two_j, params.length, two_m);
  const int two_j = params.two_j;
  const int L = params.length;
  KinkGroundState out{params, two_m, Vector<double>::Zero(static_cast<Eigen::Index>(basis.dim())), 0.0};

  std::vector<std::uint8_t> steps(L);
  if (params.ising_limit()) {
    // Maximize sum_a a*m_a: fill up-steps from the right end.
    int left = basis.total_steps();
    for (int a = L - 1; a >= 0; --a) {
      steps[a] = static_cast<std::uint8_t>(std::min(two_j, left));
      left -= steps[a];
    }
    out.coefficients[static_cast<Eigen::Index>(basis.rank_steps(steps))] = 1.0;
    return out;
  }

  const double eta = params.eta();
  std::vector<double> half_log_binom(two_j + 1);
  for (int k = 0; k <= two_j; ++k) half_log_binom[k] = 0.5 * log_binomial(two_j, k);

  // log c = sum_a [ log binom(2J, J+m_a)/2 + eta * a * m_a ],  a = 1..L
  Vector<double>& logc = out.coefficients;
  basis.unrank_steps(0, steps);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    if (i) basis.next_steps(steps);
    double v = 0;
    for (int a = 0; a < L; ++a) v += half_log_binom[steps[a]] + eta * (a + 1) * 0.5 * (2 * steps[a] - two_j);
    logc[static_cast<Eigen::Index>(i)] = v;
    top = std::max(top, v);
  }
  double sum = 0;
  for (Eigen::Index i = 0; i < logc.size(); ++i) {
    logc[i] = std::exp(logc[i] - top);
    sum += logc[i] * logc[i];
  }
  out.log_norm_sq = 2.0 * top + std::log(sum);
  logc /= std::sqrt(sum);
  return out;
}

double residual(const SpinParams& params, int two_m) {
  auto psi = kink_vector(params, two_m);
  auto h = assemble_sector<double>(params, two_m);
  return matvec(h, psi.coefficients).norm();
}

QSeriesValue heine_check(double q, int n_terms) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("heine_check: q must lie in (0, 1)");
  if (n_terms < 1) throw DomainError("heine_check: n_terms must be positive");
  const double q2 = q * q;
  double sum = 1.0;  // n = 0
  double log_prod = 0.0;
  double q2j = 1.0;
  for (int n = 1; n <= n_terms; ++n) {
    q2j *= q2;
    log_prod += std::log1p(-q2j);  // log prod_{j<=n} (1 - q^{2j})
    sum += std::exp(2.0 * n * n * std::log(q) - 2.0 * log_prod);
  }
  return QSeriesValue{q, sum, std::exp(-log_prod), n_terms};
}

SpinHalfNorm spin_half_norm_sq(int length, int n_down, double q) {
  if (length < 1 || n_down < 0 || n_down > length) throw DomainError("spin_half_norm_sq: need 0 <= N <= L");
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("spin_half_norm_sq: q must lie in [0, 1)");
  // Elementary symmetric polynomial e_N(q^2, q^4, ..., q^{2L}).
  std::vector<double> e(n_down + 1, 0.0);
  e[0] = 1.0;
  double x = 1.0;
  for (int a = 1; a <= length; ++a) {
    x *= q * q;
    for (int r = std::min(a, n_down); r >= 1; --r) e[r] += x * e[r - 1];
  }
  double closed = std::pow(q, n_down * (n_down + 1.0));
  double q2j = 1.0;
  for (int j = 1; j <= n_down; ++j) {
    q2j *= q * q;
    closed /= (1.0 - q2j);
  }
  return SpinHalfNorm{e[n_down], closed};
}

}  // namespace xxz
