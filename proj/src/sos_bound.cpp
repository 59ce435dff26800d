#include "xxz/sos_bound.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>

#include "xxz/basis.hpp"
#include "xxz/errors.hpp"
#include "xxz/ground_state.hpp"

namespace xxz {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_big(const BigInt& v) {
  if (v <= 0) return kNegInf;
  return std::log(v.convert_to<double>());
}

double log_sum_exp(const std::vector<double>& xs) {
  double top = kNegInf;
  for (double x : xs) top = std::max(top, x);
  if (top == kNegInf) return kNegInf;
  double s = 0;
  for (double x : xs) s += std::exp(x - top);
  return top + std::log(s);
}

// Memo keyed by (sorted positive row sums, -1, sorted remaining column sums).
class CountCache {
 public:
  bool find(const std::vector<int>& key, BigInt& out) const {
    std::shared_lock lock(mutex_);
    auto it = table_.find(key);
    if (it == table_.end()) return false;
    out = it->second;
    return true;
  }
  void insert(const std::vector<int>& key, const BigInt& value) {
    std::unique_lock lock(mutex_);
    table_.emplace(key, value);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::vector<int>, BigInt> table_;
};

CountCache& count_cache() {
  static CountCache cache;
  return cache;
}

// rows: positive remaining row sums, sorted descending.
// cols: remaining column sums, sorted descending; cols[pos..] are still open.
BigInt count_rec(const std::vector<int>& rows, const std::vector<int>& cols, std::size_t pos) {
  if (pos == cols.size()) return rows.empty() ? BigInt(1) : BigInt(0);
  const int open = static_cast<int>(cols.size() - pos);
  if (!rows.empty() && rows.front() > open) return 0;
  if (cols[pos] > static_cast<int>(rows.size())) return 0;

  std::vector<int> key(rows);
  key.push_back(-1);
  key.insert(key.end(), cols.begin() + static_cast<long>(pos), cols.end());
  BigInt cached;
  if (count_cache().find(key, cached)) return cached;

  // Group rows by value: (value, multiplicity), descending values.
  std::vector<std::pair<int, int>> groups;
  for (int v : rows) {
    if (!groups.empty() && groups.back().first == v) ++groups.back().second;
    else groups.emplace_back(v, 1);
  }
  const int need = cols[pos];
  BigInt total = 0;
  std::vector<int> take(groups.size(), 0);
  std::function<void(std::size_t, int, BigInt)> choose = [&](std::size_t g, int left, BigInt ways) {
    if (g == groups.size()) {
      if (left != 0) return;
      std::vector<int> next;
      next.reserve(rows.size());
      for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto [v, m] = groups[i];
        for (int t = 0; t < m - take[i]; ++t) next.push_back(v);
        if (v > 1)
          for (int t = 0; t < take[i]; ++t) next.push_back(v - 1);
      }
      std::sort(next.begin(), next.end(), std::greater<>());
      total += ways * count_rec(next, cols, pos + 1);
      return;
    }
    const int m = groups[g].second;
    for (int t = 0; t <= std::min(m, left); ++t) {
      take[g] = t;
      choose(g + 1, left - t, ways * binomial_exact(m, t));
    }
    take[g] = 0;
  };
  choose(0, need, BigInt(1));
  count_cache().insert(key, total);
  return total;
}

void compositions(int sites, int cap, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == sites) {
    if (total == 0) out.push_back(cur);
    return;
  }
  const int rest = sites - static_cast<int>(cur.size()) - 1;
  for (int v = 0; v <= std::min(cap, total); ++v) {
    if (total - v > cap * rest) continue;
    cur.push_back(v);
    compositions(sites, cap, total - v, cur, out);
    cur.pop_back();
  }
}

void check_sector(int length, int two_j, int n_down) {
  if (length < 1 || two_j < 1) throw DomainError("need L >= 1 and two_j >= 1");
  if (n_down < 0 || n_down > two_j * length) throw DomainError("N must lie in [0, 2J L]");
}

}  // namespace

std::vector<int> RestrictedPartition::multiplicities(int length) const {
  std::vector<int> n(length + 1, 0);
  for (int p : parts) ++n.at(p);
  return n;
}

std::vector<RestrictedPartition> restricted_partitions(int length, int two_j, int n_down) {
  check_sector(length, two_j, n_down);
  std::vector<RestrictedPartition> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int max_part, int left) {
    const int slots = two_j - static_cast<int>(cur.size());
    if (slots == 0) {
      if (left == 0) out.push_back({cur});
      return;
    }
    for (int p = std::min(max_part, left); p >= 0; --p) {
      if (p * slots < left) break;
      cur.push_back(p);
      rec(p, left - p);
      cur.pop_back();
    }
  };
  rec(length, n_down);
  return out;
}

BigInt contingency_count(const std::vector<int>& rows, const std::vector<int>& cols) {
  for (int r : rows)
    if (r < 0) throw DomainError("negative row sum");
  for (int c : cols)
    if (c < 0) throw DomainError("negative column sum");
  if (std::accumulate(rows.begin(), rows.end(), 0L) != std::accumulate(cols.begin(), cols.end(), 0L)) return 0;
  std::vector<int> r;
  for (int v : rows)
    if (v > 0) r.push_back(v);
  std::vector<int> c(cols);
  std::sort(r.begin(), r.end(), std::greater<>());
  std::sort(c.begin(), c.end(), std::greater<>());
  while (!c.empty() && c.back() == 0) c.pop_back();
  if (!r.empty() && r.front() > static_cast<int>(cols.size())) return 0;
  return count_rec(r, c, 0);
}

std::vector<int> conjugate_partition(const std::vector<int>& p, int size) {
  std::vector<int> out(size, 0);
  for (int v : p)
    for (int k = 0; k < std::min(v, size); ++k) ++out[k];
  return out;
}

bool dominated_by(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  const std::size_t n = std::max(a.size(), b.size());
  a.resize(n, 0);
  b.resize(n, 0);
  long sa = 0, sb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += a[i];
    sb += b[i];
    if (sa > sb) return false;
  }
  return sa == sb;
}

bool gale_ryser_feasible(const std::vector<int>& rows, const std::vector<int>& cols) {
  int width = static_cast<int>(cols.size());
  for (int r : rows) width = std::max(width, r);
  return dominated_by(cols, conjugate_partition(rows, width));
}

BigInt orbit_size(const RestrictedPartition& mu, int length) {
  BigInt num = 1;
  for (int i = 2; i <= static_cast<int>(mu.parts.size()); ++i) num *= i;
  for (int m : mu.multiplicities(length))
    for (int i = 2; i <= m; ++i) num /= i;
  return num;
}

OverlapMatrix build_overlap_matrix(int length, int two_j, int n_down, double q) {
  check_sector(length, two_j, n_down);
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("q must lie in [0, 1)");
  OverlapMatrix out;
  out.length = length;
  out.two_j = two_j;
  out.n_down = n_down;
  out.q = q;
  out.index = restricted_partitions(length, two_j, n_down);
  const std::size_t np = out.index.size();
  if (np == 0) throw DomainError("no restricted partitions for this sector");

  std::vector<std::vector<int>> cs;
  std::vector<int> cur;
  compositions(length, two_j, n_down, cur, cs);

  // Per column-sum vector: exponent x.c, log prod binom(2J, c_x), and M_{mu,c}.
  const std::size_t nc = cs.size();
  std::vector<long> expo(nc);
  std::vector<double> log_binom(nc);
  std::vector<std::vector<double>> logm(np, std::vector<double>(nc, kNegInf));
  std::vector<std::vector<BigInt>> cnt(np, std::vector<BigInt>(nc));
  for (std::size_t ci = 0; ci < nc; ++ci) {
    long e = 0;
    double lb = 0;
    for (int x = 0; x < length; ++x) {
      e += static_cast<long>(x + 1) * cs[ci][x];
      lb += log_binomial(two_j, cs[ci][x]);
    }
    expo[ci] = e;
    log_binom[ci] = lb;
    for (std::size_t mi = 0; mi < np; ++mi) {
      cnt[mi][ci] = contingency_count(out.index[mi].parts, cs[ci]);
      logm[mi][ci] = log_big(cnt[mi][ci]);
    }
  }
  std::vector<double> log_orbit(np);
  for (std::size_t mi = 0; mi < np; ++mi) log_orbit[mi] = log_big(orbit_size(out.index[mi], length));

  out.entries = Matrix<double>::Zero(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(np));
  out.log_norm_sums.assign(np, kNegInf);

  if (q > 0.0) {
    const double lq2 = 2.0 * std::log(q);
    std::vector<double> terms;
    for (std::size_t mi = 0; mi < np; ++mi) {
      terms.clear();
      for (std::size_t ci = 0; ci < nc; ++ci)
        if (logm[mi][ci] > kNegInf) terms.push_back(lq2 * static_cast<double>(expo[ci]) + logm[mi][ci]);
      out.log_norm_sums[mi] = log_sum_exp(terms);
    }
    for (std::size_t mi = 0; mi < np; ++mi)
      for (std::size_t ni = mi; ni < np; ++ni) {
        terms.clear();
        for (std::size_t ci = 0; ci < nc; ++ci)
          if (logm[mi][ci] > kNegInf && logm[ni][ci] > kNegInf)
            terms.push_back(lq2 * static_cast<double>(expo[ci]) + logm[mi][ci] + logm[ni][ci] - log_binom[ci]);
        const double ls = log_sum_exp(terms);
        if (ls == kNegInf) continue;
        const double v = std::exp(ls - 0.5 * (out.log_norm_sums[mi] + out.log_norm_sums[ni]) +
                                  0.5 * (log_orbit[mi] + log_orbit[ni]));
        out.entries(mi, ni) = v;
        out.entries(ni, mi) = v;
      }
    return out;
  }

  // q = 0: keep only the minimal-exponent terms of every sum.
  std::vector<long> zexp(np, std::numeric_limits<long>::max());
  for (std::size_t mi = 0; mi < np; ++mi) {
    for (std::size_t ci = 0; ci < nc; ++ci)
      if (cnt[mi][ci] > 0) zexp[mi] = std::min(zexp[mi], expo[ci]);
    BigInt lead = 0;
    for (std::size_t ci = 0; ci < nc; ++ci)
      if (cnt[mi][ci] > 0 && expo[ci] == zexp[mi]) lead += cnt[mi][ci];
    out.log_norm_sums[mi] = log_big(lead);
  }
  for (std::size_t mi = 0; mi < np; ++mi)
    for (std::size_t ni = mi; ni < np; ++ni) {
      long smin = std::numeric_limits<long>::max();
      for (std::size_t ci = 0; ci < nc; ++ci)
        if (cnt[mi][ci] > 0 && cnt[ni][ci] > 0) smin = std::min(smin, expo[ci]);
      if (smin == std::numeric_limits<long>::max() || 2 * smin != zexp[mi] + zexp[ni]) continue;
      std::vector<double> terms;
      for (std::size_t ci = 0; ci < nc; ++ci)
        if (cnt[mi][ci] > 0 && cnt[ni][ci] > 0 && expo[ci] == smin)
          terms.push_back(logm[mi][ci] + logm[ni][ci] - log_binom[ci]);
      const double v = std::exp(log_sum_exp(terms) - 0.5 * (out.log_norm_sums[mi] + out.log_norm_sums[ni]) +
                                0.5 * (log_orbit[mi] + log_orbit[ni]));
      out.entries(mi, ni) = v;
      out.entries(ni, mi) = v;
    }
  return out;
}

double log_ladder_norm_sq(int length, int two_j, int n_down, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0, 1)");
  OverlapMatrix p = build_overlap_matrix(length, two_j, n_down, q);
  std::vector<double> terms;
  for (std::size_t i = 0; i < p.index.size(); ++i)
    terms.push_back(log_big(orbit_size(p.index[i], length)) + p.log_norm_sums[i]);
  return log_sum_exp(terms);
}

SosGapBound delta_and_bound(int length, int two_j, int n_down, double delta_inv) {
  if (!(delta_inv >= 0.0 && delta_inv < 1.0)) throw DomainError("delta_inv must lie in [0, 1)");
  SosGapBound out;
  out.length = length;
  out.two_j = two_j;
  out.n_down = n_down;
  out.delta_inv = delta_inv;
  out.q = q_from_delta_inv(delta_inv);
  OverlapMatrix p = build_overlap_matrix(length, two_j, n_down, out.q);
  out.size = p.index.size();
  Eigen::SelfAdjointEigenSolver<Matrix<double>> es(p.entries, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  out.top_eigenvalue = ev[ev.size() - 1];
  if (std::abs(out.top_eigenvalue - 1.0) > 1e-6)
    throw NumericalError("overlap matrix top eigenvalue deviates from 1", {out.top_eigenvalue});
  // A single partition leaves no leg-symmetric state orthogonal to the
  // ground state, so delta is 0.
  out.delta = ev.size() >= 2 ? std::max(0.0, ev[ev.size() - 2]) : 0.0;
  out.bound = two_j * (1.0 - delta_inv) * (1.0 - out.delta);
  return out;
}

double crude_tail_bound(int radius, int two_j, double q) {
  if (radius < 1) throw DomainError("R must be positive");
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("q must lie in [0, 1)");
  if (q == 0.0) return 0.0;
  const double t = static_cast<double>(two_j) * two_j * radius * std::pow(q, 2.0 * radius);
  if (t >= 1.0) throw DomainError("R too small for this q: 4J^2 R q^{2R} >= 1");
  return t / (1.0 - t);
}

}  // namespace xxz
