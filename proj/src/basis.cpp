#include "xxz/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "xxz/errors.hpp"

namespace xxz {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t add_sat(std::uint64_t a, std::uint64_t b) {
  return (a > kSaturated - b) ? kSaturated : a + b;
}

// count[s * (max_sum + 1) + t]: fillings of s sites with steps in [0, two_j] summing to t.
using CountTable = std::vector<std::uint64_t>;

std::shared_ptr<const CountTable> count_table(int two_j, int length) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const CountTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(two_j, length);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int max_sum = two_j * length;
  const std::size_t stride = max_sum + 1;
  auto table = std::make_shared<CountTable>((length + 1) * stride, 0);
  (*table)[0] = 1;
  for (int s = 1; s <= length; ++s) {
    for (int t = 0; t <= std::min(max_sum, two_j * s); ++t) {
      std::uint64_t acc = 0;
      for (int v = 0; v <= std::min(two_j, t); ++v) acc = add_sat(acc, (*table)[(s - 1) * stride + t - v]);
      (*table)[s * stride + t] = acc;
    }
  }
  cache.emplace(key, table);
  return table;
}

void check_shape(int two_j, int length) {
  if (two_j < 1 || two_j > 250) throw DomainError("two_j must be in [1, 250]");
  if (length < 1) throw DomainError("chain length must be positive");
}

}  // namespace

SpinParams SpinParams::make(int two_j, int length, double delta_inv) {
  if (two_j < 1) throw DomainError("two_j must be a positive integer");
  if (length < 2) throw DomainError("chain length must be at least 2");
  if (!(delta_inv >= 0.0 && delta_inv < 1.0))
    throw DomainError("delta_inv must lie in [0, 1)");
  return SpinParams{two_j, length, delta_inv};
}

double SpinParams::q() const { return q_from_delta_inv(delta_inv); }

double SpinParams::eta() const {
  return ising_limit() ? std::numeric_limits<double>::infinity() : -std::log(q());
}

double SpinParams::field() const { return std::sqrt((1.0 - delta_inv) * (1.0 + delta_inv)); }

double q_from_delta_inv(double delta_inv) {
  if (!(delta_inv >= 0.0 && delta_inv <= 1.0)) throw DomainError("delta_inv must lie in [0, 1]");
  return delta_inv / (1.0 + std::sqrt((1.0 - delta_inv) * (1.0 + delta_inv)));
}

double delta_inv_from_q(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("q must lie in [0, 1]");
  return 2.0 * q / (1.0 + q * q);
}

bool is_valid_sector(int two_j, int length, int two_m) {
  if (two_j < 1 || length < 1) return false;
  const long total = static_cast<long>(two_j) * length;
  if (std::labs(two_m) > total) return false;
  return ((two_m - total) % 2) == 0;
}

std::uint64_t sector_dimension(int two_j, int length, int two_m) {
  check_shape(two_j, length);
  if (!is_valid_sector(two_j, length, two_m))
    throw DomainError("invalid sector: two_m=" + std::to_string(two_m) +
                      " for two_j=" + std::to_string(two_j) + ", L=" + std::to_string(length));
  const int total = (two_m + two_j * length) / 2;
  auto table = count_table(two_j, length);
  return (*table)[static_cast<std::size_t>(length) * (two_j * length + 1) + total];
}

SectorBasis::SectorBasis(int two_j, int length, int two_m)
    : two_j_(two_j), length_(length), two_m_(two_m), total_(0), max_sum_(0), dim_(0) {
  const std::uint64_t d = sector_dimension(two_j, length, two_m);
  if (d == kSaturated) throw DomainError("sector dimension exceeds 64-bit range");
  dim_ = static_cast<std::size_t>(d);
  total_ = (two_m + two_j * length) / 2;
  max_sum_ = two_j * length;
  count_ = *count_table(two_j, length);

  const std::size_t stride_k = two_j_ + 2;
  below_.assign(static_cast<std::size_t>(length_ + 1) * (max_sum_ + 1) * stride_k, 0);
  for (int s = 0; s <= length_; ++s) {
    for (int rem = 0; rem <= max_sum_; ++rem) {
      std::uint64_t acc = 0;
      std::size_t base = (static_cast<std::size_t>(s) * (max_sum_ + 1) + rem) * stride_k;
      below_[base] = 0;
      for (int k = 1; k <= two_j_ + 1; ++k) {
        if (rem - (k - 1) >= 0) acc = add_sat(acc, completions(s, rem - (k - 1)));
        below_[base + k] = acc;
      }
    }
  }
}

std::uint64_t SectorBasis::completions(int sites, int sum) const {
  if (sites < 0 || sum < 0 || sum > max_sum_) return 0;
  return count_[static_cast<std::size_t>(sites) * (max_sum_ + 1) + sum];
}

std::size_t SectorBasis::rank(const SectorConfig& config) const {
  if (static_cast<int>(config.values.size()) != length_)
    throw DomainError("configuration length does not match the chain");
  std::vector<std::uint8_t> steps(length_);
  int sum = 0;
  for (int i = 0; i < length_; ++i) {
    const int v = config.values[i];
    if (v < -two_j_ || v > two_j_ || ((v + two_j_) % 2) != 0)
      throw DomainError("configuration entry outside the spin range");
    steps[i] = static_cast<std::uint8_t>((v + two_j_) / 2);
    sum += v;
  }
  if (sum != two_m_) throw DomainError("configuration outside the sector");
  return rank_steps(steps);
}

SectorConfig SectorBasis::unrank(std::size_t index) const {
  if (index >= dim_) throw DomainError("index out of range for sector");
  std::vector<std::uint8_t> steps(length_);
  unrank_steps(index, steps);
  SectorConfig config;
  config.values.resize(length_);
  for (int i = 0; i < length_; ++i) config.values[i] = 2 * steps[i] - two_j_;
  config.two_m = two_m_;
  return config;
}

std::size_t SectorBasis::rank_steps(std::span<const std::uint8_t> steps) const {
  std::uint64_t r = 0;
  int rem = total_;
  for (int i = 0; i < length_; ++i) {
    r += below(length_ - i - 1, rem, steps[i]);
    rem -= steps[i];
  }
  return static_cast<std::size_t>(r);
}

void SectorBasis::unrank_steps(std::size_t index, std::span<std::uint8_t> steps) const {
  std::uint64_t idx = index;
  int rem = total_;
  for (int i = 0; i < length_; ++i) {
    const int sites = length_ - i - 1;
    int k = 0;
    for (; k <= two_j_; ++k) {
      const std::uint64_t c = completions(sites, rem - k);
      if (idx < c) break;
      idx -= c;
    }
    steps[i] = static_cast<std::uint8_t>(k);
    rem -= k;
  }
}

bool SectorBasis::next_steps(std::span<std::uint8_t> steps) const {
  int suffix = steps[length_ - 1];
  for (int i = length_ - 2; i >= 0; --i) {
    if (steps[i] < two_j_ && suffix >= 1) {
      ++steps[i];
      int left = suffix - 1;
      for (int j = length_ - 1; j > i; --j) {
        const int v = std::min(two_j_, left);
        steps[j] = static_cast<std::uint8_t>(v);
        left -= v;
      }
      return true;
    }
    suffix += steps[i];
  }
  return false;
}

std::int64_t SectorBasis::pair_shift(std::span<const std::uint8_t> steps, int a, int rem_a,
                                     int s) const {
  const int ka = steps[a];
  const int kb = steps[a + 1];
  const int sites_a = length_ - a - 1;
  const int rem_b = rem_a - ka;
  auto d = [](std::uint64_t x, std::uint64_t y) {
    return static_cast<std::int64_t>(x) - static_cast<std::int64_t>(y);
  };
  return d(below(sites_a, rem_a, ka + s), below(sites_a, rem_a, ka)) +
         d(below(sites_a - 1, rem_b - s, kb - s), below(sites_a - 1, rem_b, kb));
}

std::vector<SectorConfig> enumerate_sector(int two_j, int length, int two_m) {
  SectorBasis basis(two_j, length, two_m);
  std::vector<SectorConfig> out;
  out.reserve(basis.dim());
  std::vector<std::uint8_t> steps(length);
  basis.unrank_steps(0, steps);
  do {
    SectorConfig c;
    c.values.resize(length);
    for (int i = 0; i < length; ++i) c.values[i] = 2 * steps[i] - two_j;
    c.two_m = two_m;
    out.push_back(std::move(c));
  } while (basis.next_steps(steps));
  return out;
}

}  // namespace xxz
