#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "oracles.hpp"
#include "xxz/hamiltonian.hpp"

using namespace xxz;

namespace {

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("two-site spin-1/2 block") {
  auto p = SpinParams::make(1, 2, 0.5);
  auto h = assemble_sector<double>(p, 0).to_dense();
  REQUIRE(h.rows() == 2);
  // lex order on 2m values: (-1, 1) first, then (1, -1)
  const double a = std::sqrt(0.75);
  CHECK(h(0, 0) == doctest::Approx(0.5 - 0.5 * a).epsilon(1e-14));
  CHECK(h(1, 1) == doctest::Approx(0.5 + 0.5 * a).epsilon(1e-14));
  CHECK(h(0, 0) == doctest::Approx(0.066987298).epsilon(1e-8));
  CHECK(h(1, 1) == doctest::Approx(0.933012702).epsilon(1e-8));
  CHECK(h(0, 1) == doctest::Approx(-0.25));
  CHECK(h(1, 0) == doctest::Approx(-0.25));
  auto ev = sorted_eigenvalues(h);
  CHECK(std::abs(ev[0]) < 1e-14);
  CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-14));

  auto sat = assemble_sector<double>(p, 2);
  CHECK(sat.dim() == 1);
  CHECK(sat.to_dense()(0, 0) == 0.0);
  CHECK(sat.nnz_upper() == 0);
}

TEST_CASE("assembled blocks match the Kronecker-product oracle") {
  for (int two_j = 1; two_j <= 3; ++two_j)
    for (int L = 2; L <= 4; ++L)
      for (double d : {0.0, 0.3, 0.75, 0.99}) {
        auto p = SpinParams::make(two_j, L, d);
        for (int two_m = -two_j * L; two_m <= two_j * L; two_m += 2) {
          auto mine = assemble_sector<double>(p, two_m).to_dense();
          auto ref = oracle::sector_block(two_j, L, d, two_m);
          REQUIRE(mine.rows() == ref.rows());
          CHECK((mine - ref).cwiseAbs().maxCoeff() <= 1e-13);
        }
      }
}

TEST_CASE("assembly is independent of the worker count") {
  auto p = SpinParams::make(4, 7, 0.6);
  auto one = assemble_sector<double>(p, 2, 1);
  auto many = assemble_sector<double>(p, 2, 4);
  REQUIRE(one.storage().nonZeros() == many.storage().nonZeros());
  for (Eigen::Index i = 0; i < one.storage().nonZeros(); ++i) {
    CHECK(one.storage().valuePtr()[i] == many.storage().valuePtr()[i]);
    CHECK(one.storage().innerIndexPtr()[i] == many.storage().innerIndexPtr()[i]);
  }
}

TEST_CASE("matvec agrees with dense multiplication") {
  auto p = SpinParams::make(2, 3, 0.5);
  auto h = assemble_sector<double>(p, 0);
  auto x = oracle::test_vector(h.dim(), 7);
  Eigen::VectorXd dense = oracle::sector_block(2, 3, 0.5, 0) * x;
  CHECK((matvec(h, x) - dense).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(matvec(h, Eigen::VectorXd::Zero(h.dim())).norm() == 0.0);
  CHECK_THROWS_AS(matvec(h, Eigen::VectorXd::Zero(h.dim() + 1)), DomainError);
}

TEST_CASE("templated scalar: long double assembly agrees with double") {
  auto p = SpinParams::make(3, 4, 0.4);
  auto hd = assemble_sector<double>(p, 2).to_dense();
  auto hl = assemble_sector<long double>(p, 2).to_dense();
  CHECK((hl.cast<double>() - hd).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("bond amplitudes") {
  for (int two_j = 1; two_j <= 8; ++two_j)
    for (double d : {0.0, 0.5, 0.999}) {
      const double field = std::sqrt(1 - d * d);
      for (int m1 = -two_j; m1 <= two_j; m1 += 2)
        for (int m2 = -two_j; m2 <= two_j; m2 += 2) {
          CHECK(bond_diagonal<double>(two_j, m1, m2, field) >= -1e-14);
          if (m1 == two_j || m2 == -two_j) CHECK(bond_hop<double>(two_j, m1, m2, 1, d) == 0.0);
          if (m1 == -two_j || m2 == two_j) CHECK(bond_hop<double>(two_j, m1, m2, -1, d) == 0.0);
        }
    }
}

TEST_CASE("structural bounds: sparsity, row sums, positivity, mirror symmetry") {
  for (int two_j = 1; two_j <= 4; ++two_j)
    for (int L = 2; L <= 5; ++L)
      for (double d : {0.25, 0.5, 0.9}) {
        auto p = SpinParams::make(two_j, L, d);
        const double J = 0.5 * two_j;
        const double bound = 2 * J * J * L * (1 + p.field() + d);
        for (int two_m = -two_j * L; two_m <= two_j * L; two_m += 2) {
          auto h = assemble_sector<double>(p, two_m);
          const auto& s = h.storage();
          for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
            int off = 0;
            double rowsum = 0;
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(s, r); it; ++it) {
              if (it.col() != r) ++off;
              rowsum += std::abs(it.value());
              CHECK(std::abs(it.value()) > 1e-15);
            }
            CHECK(off <= 2 * (L - 1));
            CHECK(rowsum <= bound);
          }
          if (h.dim() > 2000) continue;
          auto ev = sorted_eigenvalues(h.to_dense());
          CHECK(std::abs(ev[0]) <= 1e-9);
          auto mirror = sorted_eigenvalues(assemble_sector<double>(p, -two_m).to_dense());
          CHECK((ev - mirror).cwiseAbs().maxCoeff() <= 1e-9);
        }
      }
}

TEST_CASE("staggered conjugation preserves the spectrum") {
  CHECK(staggered_conjugate_spectrum_check(SpinParams::make(2, 3, 0.4), 0));
  CHECK(staggered_conjugate_spectrum_check(SpinParams::make(1, 4, 0.9), 0));
  auto ising = SpinParams::make(3, 4, 0.0);
  CHECK(staggered_conjugate_spectrum_check(ising, 2));
  auto h = assemble_sector<double>(ising, 2).to_dense();
  CHECK((h - oracle::sector_block(3, 4, 0.0, 2, -1.0)).cwiseAbs().maxCoeff() == 0.0);
  // The oracle agrees that flipping the hop sign is a similarity.
  auto a = sorted_eigenvalues(oracle::sector_block(2, 4, 0.7, 0, 1.0));
  auto b = sorted_eigenvalues(oracle::sector_block(2, 4, 0.7, 0, -1.0));
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(staggered_conjugate_spectrum_check(SpinParams::make(4, 8, 0.5), 0), DomainError);
}

TEST_CASE("triplet dump format") {
  auto h = assemble_sector<double>(SpinParams::make(1, 2, 0.5), 0);
  std::ostringstream os;
  write_triplets(os, h);
  std::istringstream in(os.str());
  long dim = 0, nnz = 0;
  in >> dim >> nnz;
  CHECK(dim == 2);
  CHECK(nnz == 3);
  auto dense = h.to_dense();
  std::string line;
  std::getline(in, line);
  int lines = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    int r = -1, c = -1;
    std::string text;
    ls >> r >> c >> text;
    CHECK(r <= c);
    // 17 significant digits round-trip exactly
    CHECK(std::stod(text) == dense(r, c));
    ++lines;
  }
  CHECK(lines == 3);
}
