#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace xxz {

// Chain parameters. Spins are stored doubled so half-integers stay exact.
struct SpinParams {
  int two_j = 1;
  int length = 2;
  double delta_inv = 0.5;

  // Validates two_j >= 1, length >= 2, 0 <= delta_inv < 1.
  static SpinParams make(int two_j, int length, double delta_inv);

  double spin() const { return 0.5 * two_j; }
  double q() const;
  double eta() const;                  // +inf in the Ising limit
  bool ising_limit() const { return delta_inv == 0.0; }
  double field() const;                // sqrt(1 - delta_inv^2)
};

// q = Delta - sqrt(Delta^2 - 1) written in terms of d = 1/Delta so that it
// stays accurate for d -> 0 and d -> 1.
double q_from_delta_inv(double delta_inv);
double delta_inv_from_q(double q);

struct SectorConfig {
  std::vector<int> values;  // 2 m_alpha
  int two_m = 0;
};

bool is_valid_sector(int two_j, int length, int two_m);

// Throws DomainError on parity or range violation.
std::uint64_t sector_dimension(int two_j, int length, int two_m);

// Lexicographic ranking of the configurations of one sector.
//
// Internally a configuration is a vector of "steps" k_alpha = (2m_alpha + two_j)/2
// in [0, two_j] with fixed total. rank() is a sum of prefix-count table lookups.
class SectorBasis {
 public:
  SectorBasis(int two_j, int length, int two_m);

  int two_j() const { return two_j_; }
  int length() const { return length_; }
  int two_m() const { return two_m_; }
  std::size_t dim() const { return dim_; }
  int total_steps() const { return total_; }

  std::size_t rank(const SectorConfig& config) const;
  SectorConfig unrank(std::size_t index) const;

  std::size_t rank_steps(std::span<const std::uint8_t> steps) const;
  void unrank_steps(std::size_t index, std::span<std::uint8_t> steps) const;

  // Advance to the lexicographic successor inside the sector. Returns false
  // at the last configuration.
  bool next_steps(std::span<std::uint8_t> steps) const;

  // Number of ways to fill `sites` trailing sites with step total `sum`.
  std::uint64_t completions(int sites, int sum) const;

  // Sum over v < k of completions(sites, rem - v); the rank contribution of a
  // site with value k when `rem` steps remain for it and the `sites` after it.
  std::uint64_t below(int sites, int rem, int k) const {
    return below_[(static_cast<std::size_t>(sites) * (max_sum_ + 1) + rem) * (two_j_ + 2) + k];
  }

  // Rank change when steps[a] += s and steps[a+1] -= s. `rem_a` is the step
  // total remaining at site a (including site a).
  std::int64_t pair_shift(std::span<const std::uint8_t> steps, int a, int rem_a, int s) const;

 private:
  int two_j_;
  int length_;
  int two_m_;
  int total_;
  int max_sum_;
  std::size_t dim_;
  std::vector<std::uint64_t> count_;  // count_[sites][sum]
  std::vector<std::uint64_t> below_;
};

std::vector<SectorConfig> enumerate_sector(int two_j, int length, int two_m);

}  // namespace xxz
