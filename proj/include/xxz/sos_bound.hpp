#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

#include "xxz/hamiltonian.hpp"

namespace xxz {

using BigInt = boost::multiprecision::cpp_int;

// Non-increasing 2J-tuple with parts in [0, L]; zeros allowed.
struct RestrictedPartition {
  std::vector<int> parts;

  // n_k = number of parts equal to k, for k = 0..L
  std::vector<int> multiplicities(int length) const;
  bool operator==(const RestrictedPartition&) const = default;
};

// All restricted partitions of N into 2J parts <= L, in reverse-lexicographic order.
std::vector<RestrictedPartition> restricted_partitions(int length, int two_j, int n_down);

// Number of 0-1 matrices with row sums r and column sums c.
BigInt contingency_count(const std::vector<int>& rows, const std::vector<int>& cols);

// Conjugate partition, padded or cut to `size` entries: out[k] = #{i : p_i > k}.
std::vector<int> conjugate_partition(const std::vector<int>& p, int size);

// a is dominated by b: equal totals and every prefix sum of sorted(a) is at
// most the corresponding prefix sum of sorted(b).
bool dominated_by(std::vector<int> a, std::vector<int> b);

// Gale-Ryser: a 0-1 matrix with these margins exists.
bool gale_ryser_feasible(const std::vector<int>& rows, const std::vector<int>& cols);

// (2J)! / prod_k n_k! for the multiplicity profile of a partition.
BigInt orbit_size(const RestrictedPartition& mu, int length);

// Compression of the rung symmetrizer to the leg-symmetric ladder ground
// states of the sector with N down spins. Entry (mu, nu) is
// sqrt(|O_mu||O_nu|) S(mu,nu) / sqrt(Z_mu Z_nu) with
//   S(mu,nu) = sum_c M_{mu,c} M_{nu,c} q^{2 x.c} / prod_x binom(2J, c_x),
//   Z_mu     = sum_c M_{mu,c} q^{2 x.c}.
struct OverlapMatrix {
  int length = 0;
  int two_j = 0;
  int n_down = 0;
  double q = 0;
  std::vector<RestrictedPartition> index;
  Matrix<double> entries;
  std::vector<double> log_norm_sums;  // log Z_mu (leading coefficient at q = 0)
};

OverlapMatrix build_overlap_matrix(int length, int two_j, int n_down, double q);

// log sum_mu |O_mu| Z_mu: squared norm of the ladder ground state of the
// sector, i.e. of the unnormalized spin-J kink vector up to q^{-J L(L+1)}.
double log_ladder_norm_sq(int length, int two_j, int n_down, double q);

struct SosGapBound {
  int length = 0;
  int two_j = 0;
  int n_down = 0;
  double delta_inv = 0;
  double q = 0;
  std::size_t size = 0;        // |P_0(L, 2J, N)|
  double top_eigenvalue = 1;
  double delta = 0;
  double bound = 0;            // 2J (1 - 1/Delta) (1 - delta)
};

SosGapBound delta_and_bound(int length, int two_j, int n_down, double delta_inv);

// 4 J^2 R q^{2R} / (1 - 4 J^2 R q^{2R}); throws when the ratio is >= 1.
double crude_tail_bound(int radius, int two_j, double q);

}  // namespace xxz
