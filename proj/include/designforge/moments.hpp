#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "designforge/common.hpp"
#include "designforge/complex_matrix.hpp"
#include "designforge/haar.hpp"
#include "designforge/rng.hpp"
#include "designforge/schur_weyl.hpp"

namespace designforge {

/// Dense rho^{k,k}(g) = g^{(x)k} (x) conj(g)^{(x)k}.
inline ComplexMatrix rho_kk(const ComplexMatrix& g, int k) {
  if (!g.is_square()) throw PreconditionError("rho_kk: matrix must be square");
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (int i = 0; i < k; ++i) out = tensor(out, g);
  const ComplexMatrix gbar = g.conjugate();
  for (int i = 0; i < k; ++i) out = tensor(out, gbar);
  return out;
}

/// Matrix-free rho^{k,k}(g): applies the 2k Kronecker factors to a vector
/// one tensor slot at a time, never materializing the product.
class RhoKKApplier {
 public:
  RhoKKApplier(ComplexMatrix g, int k) : g_(std::move(g)), k_(k) {
    gbar_ = g_.conjugate();
    d_ = g_.rows();
    dim_ = 1;
    for (int i = 0; i < 2 * k_; ++i) {
      if (dim_ > Caps::instance().dense_entries / d_)
        throw SizeCapError("rho_kk applier: vector dimension exceeds cap");
      dim_ *= d_;
    }
  }

  std::size_t dim() const { return dim_; }

  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    std::vector<Complex> buf(in.begin(), in.end());
    std::vector<Complex> tmp(dim_);
    for (int slot = 0; slot < 2 * k_; ++slot) {
      apply_factor(slot < k_ ? g_ : gbar_, slot, buf, tmp);
      buf.swap(tmp);
    }
    std::copy(buf.begin(), buf.end(), out.begin());
  }

 private:
  // Applies a d x d factor on the given slot (slot 0 most significant).
  void apply_factor(const ComplexMatrix& m, int slot, const std::vector<Complex>& in,
                    std::vector<Complex>& out) const {
    std::size_t inner = 1;
    for (int s = slot + 1; s < 2 * k_; ++s) inner *= d_;
    const std::size_t outer = dim_ / (inner * d_);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t base = o * d_ * inner + i;
        for (std::size_t r = 0; r < d_; ++r) {
          Complex acc = 0.0;
          for (std::size_t c = 0; c < d_; ++c) acc += m(r, c) * in[base + c * inner];
          out[base + r * inner] = acc;
        }
      }
  }

  ComplexMatrix g_, gbar_;
  int k_;
  std::size_t d_ = 0;
  std::size_t dim_ = 0;
};

/// Average of rho^{k,k} over a finite multiset (uniform weights, multiset
/// multiplicity honored).  With hermitian_required the multiset must be
/// symmetric (inverse-closed): the result is checked to be Hermitian.
inline ComplexMatrix moment_from_multiset(const std::vector<ComplexMatrix>& elements, int k,
                                          bool hermitian_required = false) {
  if (elements.empty()) throw PreconditionError("moment: empty multiset");
  ComplexMatrix acc = rho_kk(elements[0], k);
  for (std::size_t i = 1; i < elements.size(); ++i) acc += rho_kk(elements[i], k);
  acc *= Complex(1.0 / static_cast<double>(elements.size()), 0.0);
  if (hermitian_required && !acc.is_hermitian(1e-10))
    throw PreconditionError("moment: multiset is not symmetric (moment not Hermitian)");
  return acc;
}

/// Exact Haar moment for SO/SU/U via the matching projector.
inline ComplexMatrix moment_haar_exact(GroupTag group, std::size_t dim, int k) {
  return haar_projector(group, dim, k).dense();
}

/// Monte-Carlo Haar moment: the sample average of rho^{k,k}(g) over `samples`
/// Haar draws.  Accumulation is sequential in draw order, so a fixed seed
/// reproduces the matrix bit-for-bit.
inline ComplexMatrix moment_haar_mc(GroupTag group, std::size_t dim, int k,
                                    std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw PreconditionError("moment_haar_mc: need samples >= 1");
  Rng rng(seed);
  std::size_t rho_dim = 1;
  for (int i = 0; i < 2 * k; ++i) rho_dim *= dim;
  ComplexMatrix acc(rho_dim, rho_dim);
  for (std::size_t s = 0; s < samples; ++s) {
    const ComplexMatrix g = haar_sample(group, dim, rng);
    acc += rho_kk(g, k);
  }
  acc *= Complex(1.0 / static_cast<double>(samples), 0.0);
  return acc;
}

/// Lazy mixture: moment of the half-identity mixture of a symmetric
/// distribution, (Id + M)/2; its spectrum lies in [0,1].
inline ComplexMatrix lazy_mix(const ComplexMatrix& m) {
  ComplexMatrix out = ComplexMatrix::identity(m.rows());
  out += m;
  out *= Complex(0.5, 0.0);
  return out;
}

/// || M - Pi ||_op: the spectral distance of a moment operator from the Haar
/// projector.  Zero iff the distribution is an exact design at this k.
inline double spectral_gap_norm(const ComplexMatrix& moment, const ComplexMatrix& haar) {
  return matrix_norm(moment - haar, NormKind::Operator);
}

/// Design error in the requested norm; the operator-norm acceptance target
/// for an eps-approximate design is eps / 2^{nk}.
inline double design_error(const ComplexMatrix& moment, const ComplexMatrix& haar,
                           NormKind norm) {
  return matrix_norm(moment - haar, norm);
}

}  // namespace designforge
