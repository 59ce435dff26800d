#include "xxz/eigensolve.hpp"

namespace xxz {

std::vector<double> full_spectrum(const SparseSymmetricMatrix<double>& h, std::size_t max_dim) {
  if (static_cast<std::size_t>(h.dim()) > max_dim)
    throw DomainError("dimension " + std::to_string(h.dim()) + " exceeds the dense limit " +
                      std::to_string(max_dim) + "; use lowest_k for the low-lying spectrum");
  Eigen::SelfAdjointEigenSolver<Matrix<double>> es(h.to_dense(), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

double zero_threshold(double norm1) { return std::max(1e-8, 1e-12 * norm1); }

GapReport spectral_gap(const SpinParams& params, int two_m, const GapOptions& opt) {
  SectorBasis basis(params.two_j, params.length, two_m);
  if (basis.dim() < 2) throw DomainError("one-dimensional sector has no gap");
  auto h = assemble_sector<double>(basis, BondCouplings<double>::from(params), opt.threads);

  GapReport rep;
  rep.two_j = params.two_j;
  rep.length = params.length;
  rep.two_m = two_m;
  rep.delta_inv = params.delta_inv;
  rep.dim = basis.dim();
  rep.norm1 = h.norm1();
  rep.zero_threshold = zero_threshold(rep.norm1);

  const int k = std::min<int>(std::max(opt.k, 2), static_cast<int>(basis.dim()));
  EigenResult<double> er = lowest_k<double>(h, k, opt.tol, opt.lanczos);
  if (!er.converged) throw NumericalError("eigensolver did not converge");
  rep.iterations = er.iterations;
  rep.dense = er.dense;
  for (Eigen::Index i = 0; i < er.eigenvalues.size(); ++i) {
    rep.low_eigenvalues.push_back(er.eigenvalues[i]);
    rep.residual_norms.push_back(er.residual_norms[i]);
  }
  rep.ground_energy = er.eigenvalues[0];
  if (std::abs(rep.ground_energy) > rep.zero_threshold)
    throw NumericalError("ground state not annihilated: lowest eigenvalue " + std::to_string(rep.ground_energy),
                         rep.low_eigenvalues);

  Eigen::Index first = -1;
  for (Eigen::Index i = 1; i < er.eigenvalues.size(); ++i)
    if (er.eigenvalues[i] > rep.zero_threshold) {
      first = i;
      break;
    }
  if (first < 0) throw NumericalError("no eigenvalue above the zero threshold", rep.low_eigenvalues);
  rep.gap = er.eigenvalues[first];
  const double cluster = 1e-8;
  rep.multiplicity = 0;
  for (Eigen::Index i = first; i < er.eigenvalues.size(); ++i)
    if (std::abs(er.eigenvalues[i] - rep.gap) <= cluster) ++rep.multiplicity;

  // Krylov methods see one copy of each level per start vector; look for
  // further copies in the complement of the vectors found so far.
  if (!er.dense && opt.resolve_multiplicity) {
    Matrix<double> locked = er.eigenvectors;
    const double tol_abs = opt.tol * std::max(rep.norm1, 1.0);
    auto apply = [&h](const auto& x) -> Vector<double> { return h.storage() * x; };
    while (locked.cols() < h.dim()) {
      EigenResult<double> extra = lanczos<double>(apply, h.dim(), 1, tol_abs, opt.lanczos, locked);
      rep.iterations += extra.iterations;
      const double found = extra.eigenvalues[0];
      if (found > rep.zero_threshold && found < rep.gap - cluster) {
        rep.gap = found;
        rep.multiplicity = 1;
      } else if (std::abs(found - rep.gap) <= cluster) {
        ++rep.multiplicity;
      } else {
        break;
      }
      locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
      locked.col(locked.cols() - 1) = extra.eigenvectors.col(0);
    }
  }
  return rep;
}

}  // namespace xxz
