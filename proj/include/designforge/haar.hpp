#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "designforge/common.hpp"
#include "designforge/complex_matrix.hpp"
#include "designforge/rng.hpp"

namespace designforge {

/// Haar sample from O/U/SO/SU in the given dimension.
///
/// O and U: Ginibre matrix (iid real/complex gaussians) + QR, with each
/// column of Q rescaled by the phase of the matching R diagonal entry; plain
/// QR alone is not Haar.  SO: an O sample with determinant -1 gets its last
/// column negated.  SU: a U sample divided by the principal dim-th root of
/// its determinant.
inline ComplexMatrix haar_sample(GroupTag group, std::size_t dim, Rng& rng) {
  if (dim < 1) throw PreconditionError("haar_sample: dim must be >= 1");
  if (!is_special_group(group) && group != GroupTag::O && group != GroupTag::U)
    throw PreconditionError("haar_sample: group must be one of SO/SU/O/U");
  const bool real = is_real_group(group);
  const auto n = static_cast<Eigen::Index>(dim);

  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const double re = rng.next_gaussian();
      g(r, c) = real ? Complex(re, 0.0) : Complex(re, rng.next_gaussian());
    }

  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd r_mat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < n; ++c) {
    const Complex d = r_mat(c, c);
    const double a = std::abs(d);
    q.col(c) *= (a == 0.0) ? Complex(1.0, 0.0) : d / a;
  }

  if (group == GroupTag::SO) {
    if (std::real(q.determinant()) < 0.0) q.col(n - 1) *= -1.0;
  } else if (group == GroupTag::SU) {
    const Complex det = q.determinant();
    const double theta = std::arg(det);
    // Principal dim-th root of det; dividing by it lands in SU exactly.
    const Complex root = std::polar(std::pow(std::abs(det), 1.0 / static_cast<double>(dim)),
                                    theta / static_cast<double>(dim));
    q /= root;
  }
  return ComplexMatrix::from_eigen(q);
}

}  // namespace designforge
