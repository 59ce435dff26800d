#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <vector>

#include "xxz/eigensolve.hpp"

namespace xxz {

using Rational = boost::rational<std::int64_t>;

// Second derivative coefficient of the lowest gap at Delta^{-1} = 0:
// gamma(h) = (n+1) + c h^2 + O(h^3) for the interface state labelled n.
struct CurvatureResult {
  int two_j = 0;
  int n = 0;
  std::optional<Rational> exact;  // empty when infinite
  double value = 0;               // +inf when infinite
  bool degenerate = false;        // J integer and n = J
  bool infinite = false;          // infinitely degenerate unperturbed level
};

// Nondegenerate branch, 0 <= n < J.
CurvatureResult curvature_nondegenerate(int two_j, int n);

// Lowest branch of the degenerate case n = J (J integer, J >= 2).
CurvatureResult curvature_degenerate(int two_j);

// Dispatches on (two_j, n); infinite cases come back flagged instead of throwing.
CurvatureResult curvature(int two_j, int n);

// Table layout: every (J, n) with 2J <= max_two_j and 0 <= n <= floor(J).
std::vector<CurvatureResult> curvature_table(int max_two_j = 6);

int ising_excitation_energy(int n);

// Sector with the interface at x = ceil(L/2) and n extra up steps there.
int centered_sector(int two_j, int length, int n);

struct NumericCurvature {
  double h = 0;
  double gamma0 = 0;
  double gamma_h = 0;
  double value = 0;  // (gamma(h) - gamma(0)) / h^2
  double tail_bound = 0;
};

// Finite-difference curvature at small h = Delta^{-1}, from exact
// diagonalization of the sector. Returns the h^2 coefficient.
NumericCurvature numeric_curvature(int two_j, int length, int two_m, double h, const GapOptions& opt = {});

}  // namespace xxz
