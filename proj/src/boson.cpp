#include "xxz/boson.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "xxz/errors.hpp"

namespace xxz {

namespace {

double eta_from_delta_inv(double delta_inv) {
  if (!(delta_inv > 0.0 && delta_inv < 1.0)) throw DomainError("delta_inv must lie in (0, 1)");
  return -std::log(q_from_delta_inv(delta_inv));
}

// Bisection for a decreasing function f with f(lo) >= 0 >= f(hi).
template <typename F>
double bisect_decreasing(F&& f, double lo, double hi, double tol) {
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (v == 0.0) return mid;
    if (v > 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double sech(double x) {
  const double a = std::abs(x);
  return 2.0 * std::exp(-a) / (1.0 + std::exp(-2.0 * a));
}

double cosh_ratio(double a, double b) {
  a = std::abs(a);
  b = std::abs(b);
  return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

double well_depth(double eta, double offset) {
  const double a = std::abs(eta * offset);
  const double e = std::exp(-2.0 * eta);
  // numerator 4 sinh^2 eta = e^{2 eta} (1 - e^{-2 eta})^2, denominator scaled by e^{2 eta}/2
  return 2.0 * (1.0 - e) * (1.0 - e) /
         (std::exp(2.0 * a - 2.0 * eta) * (1.0 + std::exp(-4.0 * a)) + (1.0 + e * e));
}

double phase_sum(double eta, double r, int window) {
  // Pair k with 1-k so that r = 1/2 gives an exact zero.
  double s = 0.0;
  for (int k = window; k >= 1; --k) s += std::tanh(eta * (k - r)) + std::tanh(eta * (1 - k - r));
  return s;
}

InterfacePhase solve_interface_phase(double mu, double eta, int window, double tol) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be positive and finite");
  if (window < 1) throw DomainError("window must be positive");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  InterfacePhase out;
  out.mu = mu;
  out.eta = eta;
  out.window = window;
  auto f = [&](double r) { return phase_sum(eta, r, window) - mu; };
  if (f(0.5) == 0.0) {
    out.r = 0.5;
  } else {
    const double reach = window + 40.0 / eta + 1.0;
    const double lo = 0.5 - reach, hi = 0.5 + reach;
    if (!(f(lo) >= 0.0 && f(hi) <= 0.0))
      throw DomainError("magnetization offset out of reach for this window; enlarge window");
    out.r = bisect_decreasing(f, lo, hi, 1e-15 * reach);
  }
  const double d = std::max(out.r, 1.0 - out.r);
  out.tail = 2.0 * std::exp(-2.0 * eta * (window + 1 - d)) / (-std::expm1(-2.0 * eta));
  if (!(out.tail <= tol)) throw DomainError("phase equation truncation error exceeds tol; enlarge window");
  return out;
}

double solve_chain_phase(double mu, double eta, int length, double tol) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be positive and finite");
  if (length < 1) throw DomainError("length must be positive");
  if (!(std::abs(mu) < length)) throw DomainError("|mu| must be smaller than the chain length");
  // Pair site a with L+1-a so that the symmetric point gives an exact zero.
  auto f = [&](double r) {
    double s = 0.0;
    for (int a = 1; 2 * a <= length; ++a) s += std::tanh(eta * (a - r)) + std::tanh(eta * (length + 1 - a - r));
    if (length % 2) s += std::tanh(eta * ((length + 1) / 2 - r));
    return s - mu;
  };
  const double mid = 0.5 * (length + 1);
  if (f(mid) == 0.0) return mid;
  double reach = 0.5 * length + 1.0 + 40.0 / eta;
  while (!(f(mid - reach) >= 0.0 && f(mid + reach) <= 0.0)) {
    reach *= 2.0;
    if (reach > 1e6) throw NumericalError("chain phase equation has no bracketed root");
  }
  return bisect_decreasing(f, mid - reach, mid + reach, tol);
}

TridiagonalOperator<double> boson_matrix(int length, double eta, double r, int first_site) {
  if (length < 2) throw DomainError("boson matrix needs L >= 2");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be positive and finite");
  TridiagonalOperator<double> op;
  op.kind = TridiagonalKind::boson_j;
  op.eta = eta;
  op.r = r;
  op.first_site = first_site;
  const double dinv = sech(eta);
  op.diag = Vector<double>::Zero(length);
  op.offdiag = Vector<double>::Constant(length - 1, -dinv);
  for (int i = 0; i < length; ++i) {
    const double a = eta * (first_site + i - r);
    double d = 0.0;
    if (i > 0) d += cosh_ratio(a, a - eta);
    if (i + 1 < length) d += cosh_ratio(a, a + eta);
    op.diag[i] = dinv * d;
  }
  return op;
}

TridiagonalOperator<double> jacobi_operator(int truncation, double eta, double r) {
  if (truncation < 3) throw DomainError("truncation must be at least 3");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be positive and finite");
  TridiagonalOperator<double> op;
  op.kind = TridiagonalKind::jacobi_a;
  op.eta = eta;
  op.r = r;
  op.first_site = static_cast<int>(std::floor(r)) - truncation / 2 + 1;
  const double s = sech(eta);
  op.diag.resize(truncation);
  op.offdiag = Vector<double>::Constant(truncation - 1, -s);
  for (int i = 0; i < truncation; ++i) op.diag[i] = 2.0 - well_depth(eta, op.first_site + i - r);
  return op;
}

std::pair<double, double> jacobi_low_pair(double r, double delta_inv, int truncation) {
  const auto ev = jacobi_operator(truncation, eta_from_delta_inv(delta_inv), r).eigenvalues();
  return {ev[0], ev[1]};
}

JacobiGap jacobi_gap(double r, double delta_inv, int truncation) {
  JacobiGap out;
  out.r = r;
  out.delta_inv = delta_inv;
  out.truncation = truncation;
  std::tie(out.zero_mode, out.gap) = jacobi_low_pair(r, delta_inv, truncation);
  out.doubled_gap = jacobi_low_pair(r, delta_inv, 2 * truncation).second;
  out.truncation_change = std::abs(out.gap - out.doubled_gap);
  return out;
}

GammaInfinity gamma_infinity(double mu, double delta_inv, int truncation, double tol) {
  GammaInfinity out;
  out.mu = mu;
  const double eta = eta_from_delta_inv(delta_inv);
  out.phase = solve_interface_phase(mu, eta, std::max(truncation, 50), tol);
  out.jacobi = jacobi_gap(out.phase.r, delta_inv, truncation);
  if (out.jacobi.zero_mode > tol)
    throw NumericalError("smallest eigenvalue of the truncated Jacobi operator exceeds tol; "
                         "increase the truncation or recenter the window",
                         {out.jacobi.zero_mode, out.jacobi.gap});
  out.value = out.jacobi.gap;
  out.truncation_converged = out.jacobi.truncation_change < tol;
  return out;
}

OptimalAnisotropy optimal_anisotropy_scan(int truncation, int grid, double refine_tol) {
  if (grid < 3) throw DomainError("grid must have at least 3 points");
  if (!(refine_tol > 0.0)) throw DomainError("refine_tol must be positive");
  OptimalAnisotropy out;
  out.truncation = truncation;
  out.grid = grid;
  out.refine_tol = refine_tol;
  auto g = [&](double d) {
    ++out.evaluations;
    return jacobi_low_pair(0.5, d, truncation).second;
  };
  std::vector<double> xs(grid), ys(grid);
  for (int i = 0; i < grid; ++i) {
    xs[i] = (i + 1.0) / (grid + 1.0);
    ys[i] = g(xs[i]);
  }
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 1; i + 1 < grid; ++i) {
    if (!(ys[i] >= ys[i - 1] && ys[i] > ys[i + 1])) continue;
    double a = xs[i - 1], b = xs[i + 1];
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = g(c), fd = g(d);
    while (b - a > refine_tol) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = g(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = g(d);
      }
    }
    const double x = 0.5 * (a + b);
    out.local_maxima.push_back(x);
    out.local_values.push_back(g(x));
  }
  if (out.local_maxima.empty()) throw NumericalError("no interior maximum found on the scan grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.local_values.size(); ++i)
    if (out.local_values[i] > out.local_values[best]) best = i;
  out.delta_inv = out.local_maxima[best];
  out.gap = out.local_values[best];
  return out;
}

BosonComparison boson_vs_exact(int two_j, int length, double delta_inv, int two_m, const GapOptions& opt) {
  BosonComparison out;
  out.two_j = two_j;
  out.length = length;
  out.two_m = two_m;
  out.delta_inv = delta_inv;
  out.eta = eta_from_delta_inv(delta_inv);
  const double mu = static_cast<double>(two_m) / two_j;
  out.r = solve_chain_phase(mu, out.eta, length);
  out.gap = spectral_gap(SpinParams::make(two_j, length, delta_inv), two_m, opt).gap;
  out.gap_over_j = out.gap / (0.5 * two_j);
  const auto ev = boson_matrix(length, out.eta, out.r).eigenvalues();
  out.boson_spectrum.assign(ev.data(), ev.data() + ev.size());
  out.lambda1 = ev[1];
  out.relative_deviation = std::abs(out.gap_over_j - out.lambda1) / out.lambda1;
  return out;
}

}  // namespace xxz
