#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <thread>
#include <vector>

#include "xxz/basis.hpp"
#include "xxz/errors.hpp"

namespace xxz {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Real symmetric sparse matrix. Both triangles are kept in row-compressed
// form so that every row of y = Hx is summed in a fixed column order.
template <typename Scalar = double>
class SparseSymmetricMatrix {
 public:
  using Storage = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

  SparseSymmetricMatrix() = default;
  explicit SparseSymmetricMatrix(Storage full) : full_(std::move(full)) {
    full_.makeCompressed();
  }

  Eigen::Index dim() const { return full_.rows(); }
  const Storage& storage() const { return full_; }

  std::size_t nnz_upper() const {
    std::size_t n = 0;
    for (Eigen::Index r = 0; r < full_.outerSize(); ++r)
      for (typename Storage::InnerIterator it(full_, r); it; ++it)
        if (it.col() >= r) ++n;
    return n;
  }

  std::vector<Eigen::Triplet<Scalar>> upper_triplets() const {
    std::vector<Eigen::Triplet<Scalar>> out;
    out.reserve(nnz_upper());
    for (Eigen::Index r = 0; r < full_.outerSize(); ++r)
      for (typename Storage::InnerIterator it(full_, r); it; ++it)
        if (it.col() >= r) out.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
    return out;
  }

  // Maximum absolute row sum (equal to the column sum by symmetry).
  Scalar norm1() const {
    Scalar best = 0;
    for (Eigen::Index r = 0; r < full_.outerSize(); ++r) {
      Scalar s = 0;
      for (typename Storage::InnerIterator it(full_, r); it; ++it) s += std::abs(it.value());
      best = std::max(best, s);
    }
    return best;
  }

  Scalar trace() const {
    Scalar t = 0;
    for (Eigen::Index r = 0; r < full_.outerSize(); ++r) t += full_.coeff(r, r);
    return t;
  }

  Matrix<Scalar> to_dense() const { return Matrix<Scalar>(full_); }

 private:
  Storage full_;
};

// Per-bond coefficients: hop multiplies the transverse term -(hop/2)(S+S- + S-S+),
// field multiplies J(S3_a - S3_b). For the physical chain hop = 1/Delta and
// field = sqrt(1 - 1/Delta^2).
template <typename Scalar>
struct BondCouplings {
  Scalar hop;
  Scalar field;

  static BondCouplings from(const SpinParams& p) {
    return {static_cast<Scalar>(p.delta_inv),
            std::sqrt((Scalar(1) - Scalar(p.delta_inv)) * (Scalar(1) + Scalar(p.delta_inv)))};
  }
};

// Diagonal bond energy J^2 - m1 m2 + J A (m1 - m2) in doubled quantum numbers.
template <typename Scalar>
Scalar bond_diagonal(int two_j, int two_m1, int two_m2, Scalar field) {
  return (Scalar(two_j * two_j - two_m1 * two_m2) + Scalar(two_j) * field * Scalar(two_m1 - two_m2)) /
         Scalar(4);
}

// sqrt(J(J+1) - m(m+s)) for s = +1 (raise) or -1 (lower).
template <typename Scalar>
Scalar ladder_factor(int two_j, int two_m, int s) {
  const int v = two_j * (two_j + 2) - two_m * (two_m + 2 * s);
  return v <= 0 ? Scalar(0) : std::sqrt(Scalar(v)) / Scalar(2);
}

// Hop amplitude for raising site 1 and lowering site 2 (s = +1) or the reverse.
template <typename Scalar>
Scalar bond_hop(int two_j, int two_m1, int two_m2, int s, Scalar hop) {
  return -hop / Scalar(2) * ladder_factor<Scalar>(two_j, two_m1, s) *
         ladder_factor<Scalar>(two_j, two_m2, -s);
}

namespace detail {

template <typename Scalar>
struct RowBlock {
  std::vector<int> counts;
  std::vector<int> cols;
  std::vector<Scalar> values;
};

template <typename Scalar>
void assemble_rows(const SectorBasis& basis, const BondCouplings<Scalar>& bc, std::size_t begin,
                   std::size_t end, RowBlock<Scalar>& out) {
  const int two_j = basis.two_j();
  const int L = basis.length();
  std::vector<std::uint8_t> steps(L);
  std::vector<int> rem(L);
  std::vector<std::pair<int, Scalar>> row;
  if (begin >= end) return;
  basis.unrank_steps(begin, steps);
  const Scalar tiny = Scalar(1e-15);
  for (std::size_t i = begin; i < end; ++i) {
    if (i != begin) basis.next_steps(steps);
    int r = basis.total_steps();
    for (int a = 0; a < L; ++a) {
      rem[a] = r;
      r -= steps[a];
    }
    row.clear();
    Scalar diag = 0;
    for (int a = 0; a + 1 < L; ++a) {
      const int m1 = 2 * steps[a] - two_j;
      const int m2 = 2 * steps[a + 1] - two_j;
      diag += bond_diagonal<Scalar>(two_j, m1, m2, bc.field);
      for (int s : {-1, 1}) {
        if (bc.hop == Scalar(0)) continue;
        const int ka = steps[a] + s;
        const int kb = steps[a + 1] - s;
        if (ka < 0 || ka > two_j || kb < 0 || kb > two_j) continue;
        const Scalar v = bond_hop<Scalar>(two_j, m1, m2, s, bc.hop);
        if (std::abs(v) <= tiny) continue;
        const std::int64_t col = static_cast<std::int64_t>(i) + basis.pair_shift(steps, a, rem[a], s);
        row.emplace_back(static_cast<int>(col), v);
      }
    }
    if (std::abs(diag) > tiny) row.emplace_back(static_cast<int>(i), diag);
    std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    int count = 0;
    for (std::size_t e = 0; e < row.size(); ++e) {
      if (count > 0 && out.cols.back() == row[e].first) {
        out.values.back() += row[e].second;
      } else {
        out.cols.push_back(row[e].first);
        out.values.push_back(row[e].second);
        ++count;
      }
    }
    out.counts.push_back(count);
  }
}

}  // namespace detail

// Sector block of the kink Hamiltonian with the given bond couplings.
// Rows are split into contiguous blocks across `threads` workers; the result
// does not depend on the number of workers.
template <typename Scalar = double>
SparseSymmetricMatrix<Scalar> assemble_sector(const SectorBasis& basis, const BondCouplings<Scalar>& bc,
                                              int threads = 1) {
  const std::size_t n = basis.dim();
  if (n == 0) throw DomainError("empty sector");
  if (n > static_cast<std::size_t>(std::numeric_limits<int>::max() / 2))
    throw DomainError("sector too large to assemble");
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n / 1024) + 1));
  std::vector<detail::RowBlock<Scalar>> blocks(workers);
  std::vector<std::size_t> cut(workers + 1);
  for (int w = 0; w <= workers; ++w) cut[w] = n * w / workers;
  if (workers == 1) {
    detail::assemble_rows(basis, bc, 0, n, blocks[0]);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] { detail::assemble_rows(basis, bc, cut[w], cut[w + 1], blocks[w]); });
    for (auto& t : pool) t.join();
  }
  std::size_t nnz = 0;
  for (const auto& b : blocks) nnz += b.cols.size();
  typename SparseSymmetricMatrix<Scalar>::Storage m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.resizeNonZeros(static_cast<Eigen::Index>(nnz));
  int* outer = m.outerIndexPtr();
  int* inner = m.innerIndexPtr();
  Scalar* vals = m.valuePtr();
  std::size_t row = 0, pos = 0;
  outer[0] = 0;
  for (const auto& b : blocks) {
    std::copy(b.cols.begin(), b.cols.end(), inner + pos);
    std::copy(b.values.begin(), b.values.end(), vals + pos);
    std::size_t local = pos;
    for (int c : b.counts) {
      local += c;
      outer[++row] = static_cast<int>(local);
    }
    pos = local;
  }
  return SparseSymmetricMatrix<Scalar>(std::move(m));
}

template <typename Scalar = double>
SparseSymmetricMatrix<Scalar> assemble_sector(const SpinParams& params, int two_m, int threads = 1) {
  SectorBasis basis(params.two_j, params.length, two_m);
  return assemble_sector<Scalar>(basis, BondCouplings<Scalar>::from(params), threads);
}

template <typename Scalar, typename Derived>
Vector<Scalar> matvec(const SparseSymmetricMatrix<Scalar>& h, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != h.dim()) throw DomainError("matvec: vector length does not match matrix dimension");
  return h.storage() * x;
}

// Compares the sector spectrum at +delta_inv with the spectrum obtained by
// flipping the sign of the transverse coupling (staggered rotation). Dense,
// refuses dimensions above 4000.
bool staggered_conjugate_spectrum_check(const SpinParams& params, int two_m, double tol = 1e-9);

// Text dump: header "dim nnz", then "row col value" for the upper triangle.
void write_triplets(std::ostream& os, const SparseSymmetricMatrix<double>& h);

}  // namespace xxz
