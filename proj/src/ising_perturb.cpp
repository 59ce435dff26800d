#include "xxz/ising_perturb.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "xxz/errors.hpp"
#include "xxz/sos_bound.hpp"

namespace xxz {

namespace {

CurvatureResult finite(int two_j, int n, Rational r, bool degenerate) {
  CurvatureResult out;
  out.two_j = two_j;
  out.n = n;
  out.exact = r;
  out.value = static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
  out.degenerate = degenerate;
  return out;
}

CurvatureResult infinite(int two_j, int n, bool degenerate) {
  CurvatureResult out;
  out.two_j = two_j;
  out.n = n;
  out.value = std::numeric_limits<double>::infinity();
  out.degenerate = degenerate;
  out.infinite = true;
  return out;
}

}  // namespace

CurvatureResult curvature_nondegenerate(int two_j, int n) {
  if (two_j < 1 || n < 0) throw DomainError("need two_j >= 1 and n >= 0");
  if (2 * n > two_j) throw DomainError("n exceeds floor(J)");
  if (2 * n == two_j) throw DomainError("n = J is the degenerate case; use curvature_degenerate");
  if (two_j == 1) throw DomainError("J = 1/2: the first excited level is infinitely degenerate");
  const Rational J(two_j, 2);
  const Rational nn(n);
  // J - n/2 + (J+1)(2J-1)/(n+3) - 2J^2/(2J-n-1)
  return finite(two_j, n, J - nn / 2 + (J + 1) * (2 * J - 1) / (nn + 3) - 2 * J * J / (2 * J - nn - 1), false);
}

CurvatureResult curvature_degenerate(int two_j) {
  if (two_j < 1 || two_j % 2 != 0) throw DomainError("degenerate case requires integer J");
  const int j = two_j / 2;
  if (j == 1) throw DomainError("J = 1, n = 1: infinitely degenerate level, curvature is infinite");
  const Rational J(j);
  // -8 - 3/(J-1) - J/2 + 14/(J+3)
  return finite(two_j, j, Rational(-8) - Rational(3) / (J - 1) - J / 2 + Rational(14) / (J + 3), true);
}

CurvatureResult curvature(int two_j, int n) {
  if (two_j < 1 || n < 0 || 2 * n > two_j) throw DomainError("need two_j >= 1 and 0 <= n <= floor(J)");
  if (two_j == 1) return infinite(two_j, n, false);
  if (2 * n == two_j) return two_j == 2 ? infinite(two_j, n, true) : curvature_degenerate(two_j);
  return curvature_nondegenerate(two_j, n);
}

std::vector<CurvatureResult> curvature_table(int max_two_j) {
  std::vector<CurvatureResult> out;
  for (int tj = 1; tj <= max_two_j; ++tj)
    for (int n = 0; 2 * n <= tj; ++n) out.push_back(curvature(tj, n));
  return out;
}

int ising_excitation_energy(int n) {
  if (n < 0) throw DomainError("n must be nonnegative");
  return n + 1;
}

int centered_sector(int two_j, int length, int n) {
  if (n < 0 || n > two_j) throw DomainError("n must lie in [0, 2J]");
  const int x = (length + 1) / 2;
  return two_j * (length - 2 * x) + 2 * n;
}

NumericCurvature numeric_curvature(int two_j, int length, int two_m, double h, const GapOptions& opt) {
  if (!(h > 0.0 && h <= 0.05)) throw DomainError("h must lie in (0, 0.05]");
  NumericCurvature out;
  out.h = h;
  // Distance from the interface to the nearer chain end.
  const int x = (length + 1) / 2;
  const int radius = std::max(1, std::min(x - 1, length - x));
  out.tail_bound = crude_tail_bound(radius, two_j, q_from_delta_inv(h));
  out.gamma0 = spectral_gap(SpinParams::make(two_j, length, 0.0), two_m, opt).gap;
  out.gamma_h = spectral_gap(SpinParams::make(two_j, length, h), two_m, opt).gap;
  out.value = (out.gamma_h - out.gamma0) / (h * h);
  return out;
}

}  // namespace xxz
