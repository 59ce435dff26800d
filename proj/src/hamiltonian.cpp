#include "xxz/hamiltonian.hpp"

#include <cstdio>
#include <ostream>

namespace xxz {

bool staggered_conjugate_spectrum_check(const SpinParams& params, int two_m, double tol) {
  SectorBasis basis(params.two_j, params.length, two_m);
  if (basis.dim() > 4000) throw DomainError("sector too large for the dense spectrum comparison");
  auto bc = BondCouplings<double>::from(params);
  auto plus = assemble_sector<double>(basis, bc);
  bc.hop = -bc.hop;
  auto minus = assemble_sector<double>(basis, bc);
  Eigen::SelfAdjointEigenSolver<Matrix<double>> ep(plus.to_dense(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix<double>> em(minus.to_dense(), Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, plus.norm1());
  return (ep.eigenvalues() - em.eigenvalues()).cwiseAbs().maxCoeff() <= tol * scale;
}

void write_triplets(std::ostream& os, const SparseSymmetricMatrix<double>& h) {
  auto trips = h.upper_triplets();
  os << h.dim() << ' ' << trips.size() << '\n';
  char buf[64];
  for (const auto& t : trips) {
    std::snprintf(buf, sizeof buf, "%.17g", t.value());
    os << t.row() << ' ' << t.col() << ' ' << buf << '\n';
  }
}

}  // namespace xxz
