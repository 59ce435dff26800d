#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include "oracles.hpp"
#include "xxz/eigensolve.hpp"

using namespace xxz;

namespace {

LanczosOptions force_lanczos() {
  LanczosOptions o;
  o.dense_threshold = 0;
  return o;
}

Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("spin-1/2 chain low levels from Lanczos") {
  auto h = assemble_sector<double>(SpinParams::make(1, 10, 0.5), 0);
  auto r = lowest_k<double>(h, 2, 1e-10, force_lanczos());
  CHECK(r.converged);
  CHECK_FALSE(r.dense);
  CHECK(std::abs(r.eigenvalues[0]) < 1e-10);
  CHECK(r.eigenvalues[1] == doctest::Approx(1 - 0.5 * std::cos(std::numbers::pi / 10)).epsilon(1e-10));
  CHECK(r.eigenvalues[1] == doctest::Approx(0.52447).epsilon(1e-5));
  CHECK(r.residual_norms.maxCoeff() <= 1e-10 * h.norm1());
  CHECK((r.eigenvectors.transpose() * r.eigenvectors - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("one-dimensional matrix") {
  auto h = assemble_sector<double>(SpinParams::make(1, 2, 0.5), 2);
  auto r = lowest_k<double>(h, 1, 1e-10);
  CHECK(r.eigenvalues.size() == 1);
  CHECK(r.eigenvalues[0] == 0.0);
}

TEST_CASE("Lanczos matches dense diagonalization") {
  auto h = assemble_sector<double>(SpinParams::make(2, 4, 0.25), 0);
  auto dense = dense_eigenvalues(h.to_dense());
  auto r = lowest_k<double>(h, 3, 1e-10, force_lanczos());
  for (int i = 0; i < 3; ++i) CHECK(std::abs(r.eigenvalues[i] - dense[i]) <= 1e-9);
}

TEST_CASE("Lanczos vs dense on every small sector") {
  for (int two_j = 1; two_j <= 4; ++two_j)
    for (int L = 2; L <= 5; ++L)
      for (double d : {0.0, 0.25, 0.5, 0.9}) {
        auto p = SpinParams::make(two_j, L, d);
        for (int two_m = -two_j * L; two_m <= two_j * L; two_m += 2) {
          auto h = assemble_sector<double>(p, two_m);
          if (h.dim() < 3 || h.dim() > 2000) continue;
          auto dense = dense_eigenvalues(h.to_dense());
          const int k = static_cast<int>(std::min<Eigen::Index>(4, h.dim() - 1));
          auto r = lowest_k<double>(h, k, 1e-10, force_lanczos());
          REQUIRE(r.converged);
          // Lanczos returns distinct levels; each must be a dense eigenvalue and
          // the lowest two levels must agree.
          CHECK(std::abs(r.eigenvalues[0] - dense[0]) <= 1e-9);
          int j = 1;
          while (j < dense.size() && dense[j] - dense[0] <= 1e-9) ++j;
          if (j < dense.size()) CHECK(std::abs(r.eigenvalues[1] - dense[j]) <= 1e-9);
          for (int i = 0; i < k; ++i) CHECK((dense.array() - r.eigenvalues[i]).abs().minCoeff() <= 1e-9);
        }
      }
}

TEST_CASE("thick restart with a small basis cap") {
  auto h = assemble_sector<double>(SpinParams::make(3, 6, 0.6), 0);
  REQUIRE(h.dim() > 500);
  LanczosOptions o = force_lanczos();
  o.max_basis = 20;
  auto r = lowest_k<double>(h, 3, 1e-10, o);
  auto dense = dense_eigenvalues(h.to_dense());
  CHECK(r.converged);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(r.eigenvalues[i] - dense[i]) <= 1e-9);
}

TEST_CASE("non-convergence carries the best Ritz values") {
  auto h = assemble_sector<double>(SpinParams::make(3, 6, 0.6), 0);
  LanczosOptions o = force_lanczos();
  o.max_matvecs = 12;
  try {
    lowest_k<double>(h, 2, 1e-10, o);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.best_values().size() == 2);
  }
  CHECK_THROWS_AS(lowest_k<double>(h, 2, 1e-3), DomainError);
  CHECK_THROWS_AS(lowest_k<double>(h, 2, 0.0), DomainError);
}

TEST_CASE("spectral gap examples") {
  auto g = spectral_gap(SpinParams::make(1, 2, 0.5), 0);
  CHECK(g.gap == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(g.ground_energy) < g.zero_threshold);

  auto g12 = spectral_gap(SpinParams::make(1, 12, 0.5), 4);
  CHECK(std::abs(g12.gap - (1 - 0.5 * std::cos(std::numbers::pi / 12))) <= 1e-9);
  CHECK_FALSE(g12.dense);

  auto ising = spectral_gap(SpinParams::make(4, 6, 0.0), 0);
  CHECK(ising.gap == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(spectral_gap(SpinParams::make(1, 4, 0.5), 4), DomainError);
  CHECK(zero_threshold(1.0) == 1e-8);
  CHECK(zero_threshold(1e6) == 1e-6);
}

TEST_CASE("gap is even in M") {
  for (int two_j = 1; two_j <= 3; ++two_j)
    for (int L = 3; L <= 6; ++L) {
      auto p = SpinParams::make(two_j, L, 0.4);
      for (int two_m = 2; two_m < two_j * L; two_m += 2) {
        if ((two_m - two_j * L) % 2) continue;
        CHECK(std::abs(spectral_gap(p, two_m).gap - spectral_gap(p, -two_m).gap) <= 1e-8);
      }
    }
}

TEST_CASE("degenerate first excitation: Lanczos multiplicity matches dense") {
  // Ising limit, J = 2, interface level n = J: two degenerate first excitations.
  auto p = SpinParams::make(4, 6, 0.0);
  GapOptions dense_opt;
  dense_opt.lanczos.dense_threshold = 100000;
  GapOptions lz_opt;
  lz_opt.lanczos.dense_threshold = 0;
  auto a = spectral_gap(p, 4, dense_opt);
  auto b = spectral_gap(p, 4, lz_opt);
  CHECK(a.dense);
  CHECK_FALSE(b.dense);
  CHECK(a.multiplicity >= 2);
  CHECK(b.gap == doctest::Approx(a.gap).epsilon(1e-10));
  CHECK(b.multiplicity == a.multiplicity);
}

TEST_CASE("full spectrum") {
  auto h = assemble_sector<double>(SpinParams::make(1, 2, 0.5), 0);
  auto s = full_spectrum(h);
  REQUIRE(s.size() == 2);
  CHECK(std::abs(s[0]) < 1e-14);
  CHECK(s[1] == doctest::Approx(1.0).epsilon(1e-14));

  auto big = assemble_sector<double>(SpinParams::make(3, 5, 0.7), 1);
  auto all = full_spectrum(big);
  double sum = 0;
  for (double v : all) sum += v;
  CHECK(std::abs(sum - big.trace()) <= 1e-8 * std::abs(big.trace()));
  CHECK(std::is_sorted(all.begin(), all.end()));
  CHECK_THROWS_AS(full_spectrum(assemble_sector<double>(SpinParams::make(4, 8, 0.5), 0)), DomainError);
}

TEST_CASE("gaps from the oracle Hamiltonian") {
  // Lanczos gap on a Lanczos-sized sector equals the dense oracle gap.
  auto p = SpinParams::make(2, 6, 0.5);
  GapOptions o;
  o.lanczos.dense_threshold = 0;
  auto g = spectral_gap(p, 0, o);
  auto ev = dense_eigenvalues(oracle::sector_block(2, 6, 0.5, 0));
  CHECK(std::abs(g.gap - ev[1]) <= 1e-9);
}
