#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "designforge/common.hpp"
#include "designforge/complex_matrix.hpp"
#include "designforge/matching.hpp"

namespace designforge {

/// Exact Gram-matrix inverse over rationals (Gauss-Jordan).  The matching
/// Gram is positive definite under the projector preconditions, so a nonzero
/// pivot always exists.
inline std::vector<std::vector<Rational>> invert_rational(
    std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == Rational(0)) ++pivot;
    if (pivot == n) throw PreconditionError("rational inverse: singular matrix");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const Rational p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == Rational(0)) continue;
      const Rational f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

/// Orthogonal projector onto span{ |Phi_M> } as W (W^dagger W)^{-1} W^dagger,
/// kept in rank-structured form: applying it costs |M| colored-state
/// contractions rather than a D^{2k} x D^{2k} product.
///
/// For SO the matchings are all of M_{2k} and the Schur-Weyl identification
/// requires k < D/2; SU and U share the bipartite projector.
class MatchingProjector {
 public:
  MatchingProjector(GroupTag group, std::size_t local_dim, int k)
      : group_(group), local_dim_(local_dim), k_(k) {
    if (group == GroupTag::O)
      throw PreconditionError(
          "haar_projector: no O(2^m) matching projector; lift SO instead");
    if (!is_special_group(group) && group != GroupTag::U)
      throw PreconditionError("haar_projector: group must be SO, SU or U");
    const bool bipartite = (group != GroupTag::SO);
    if (group == GroupTag::SO && 2 * static_cast<std::size_t>(k) >= local_dim)
      throw PreconditionError(
          "haar_projector: SO Schur-Weyl span requires k < 2^{m-1} (k < D/2)");
    matchings_ = enumerate_matchings(k, bipartite);
    const std::size_t t = matchings_.size();

    std::vector<std::vector<Rational>> gram(t, std::vector<Rational>(t));
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < t; ++j)
        gram[i][j] = matching_gram(matchings_[i], matchings_[j],
                                   static_cast<int>(local_dim));

    gram_inv_.resize(t, std::vector<double>(t));
    if (t <= 15) {
      const auto inv = invert_rational(gram);
      for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < t; ++j) gram_inv_[i][j] = to_double(inv[i][j]);
    } else {
      Eigen::MatrixXd g(t, t);
      for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < t; ++j) g(i, j) = to_double(gram[i][j]);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
      const double lo = es.eigenvalues().minCoeff();
      const double hi = es.eigenvalues().maxCoeff();
      if (lo <= 0.0 || hi / lo > 1e10)
        throw ConvergenceError("haar_projector: Gram matrix numerically rank-deficient");
      const Eigen::MatrixXd inv = g.ldlt().solve(Eigen::MatrixXd::Identity(t, t));
      for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < t; ++j) gram_inv_[i][j] = inv(i, j);
    }

    // Per-matching coloring strides; one free color per edge.
    const int slots = 2 * k;
    std::vector<std::size_t> stride(slots, 1);
    for (int s = slots - 2; s >= 0; --s) stride[s] = stride[s + 1] * local_dim;
    dim_ = stride[0] * local_dim;
    edge_strides_.resize(t);
    for (std::size_t m = 0; m < t; ++m) {
      edge_strides_[m].resize(k);
      for (int e = 0; e < k; ++e)
        edge_strides_[m][e] = stride[matchings_[m].pairs[e].first] +
                              stride[matchings_[m].pairs[e].second];
    }
    amp_ = std::pow(static_cast<double>(local_dim), -0.5 * k);
    colorings_ = 1;
    for (int e = 0; e < k; ++e) colorings_ *= local_dim;
  }

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return matchings_.size(); }
  const std::vector<Matching>& matchings() const { return matchings_; }

  /// <Phi_M | v> for matching index m.
  Complex overlap(std::size_t m, std::span<const Complex> v) const {
    const auto& es = edge_strides_[m];
    Complex acc = 0.0;
    for (std::size_t c = 0; c < colorings_; ++c) {
      std::size_t idx = 0, rem = c;
      for (int e = k_ - 1; e >= 0; --e) {
        idx += (rem % local_dim_) * es[e];
        rem /= local_dim_;
      }
      acc += v[idx];
    }
    return amp_ * acc;
  }

  /// out += coeff * |Phi_M>.
  void accumulate(std::size_t m, Complex coeff, std::span<Complex> out) const {
    const auto& es = edge_strides_[m];
    const Complex a = coeff * amp_;
    for (std::size_t c = 0; c < colorings_; ++c) {
      std::size_t idx = 0, rem = c;
      for (int e = k_ - 1; e >= 0; --e) {
        idx += (rem % local_dim_) * es[e];
        rem /= local_dim_;
      }
      out[idx] += a;
    }
  }

  /// out = Pi v.
  void apply(std::span<const Complex> v, std::span<Complex> out) const {
    const std::size_t t = matchings_.size();
    std::vector<Complex> c(t), b(t, Complex{0.0, 0.0});
    for (std::size_t m = 0; m < t; ++m) c[m] = overlap(m, v);
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < t; ++j) b[i] += gram_inv_[i][j] * c[j];
    std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
    for (std::size_t m = 0; m < t; ++m) accumulate(m, b[m], out);
  }

  std::vector<Complex> apply(const std::vector<Complex>& v) const {
    std::vector<Complex> out(v.size());
    apply(std::span<const Complex>(v), std::span<Complex>(out));
    return out;
  }

  /// Dense materialization; guarded by the dense entry cap.
  ComplexMatrix dense() const {
    if (dim_ * dim_ > Caps::instance().dense_entries)
      throw SizeCapError("haar_projector: dense form exceeds cap");
    ComplexMatrix out(dim_, dim_);
    const std::size_t t = matchings_.size();
    std::vector<std::vector<Complex>> states(t);
    for (std::size_t m = 0; m < t; ++m) states[m] = phi_state(matchings_[m], local_dim_);
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < t; ++j) {
        const double w = gram_inv_[i][j];
        if (w == 0.0) continue;
        // Outer product of sparse colored states.
        for (std::size_t r = 0; r < dim_; ++r) {
          const Complex vi = states[i][r];
          if (vi == Complex{0.0, 0.0}) continue;
          for (std::size_t c = 0; c < dim_; ++c) {
            const Complex vj = states[j][c];
            if (vj == Complex{0.0, 0.0}) continue;
            out(r, c) += w * vi * std::conj(vj);
          }
        }
      }
    return out;
  }

 private:
  GroupTag group_;
  std::size_t local_dim_;
  int k_;
  std::size_t dim_ = 0;
  std::size_t colorings_ = 1;
  double amp_ = 1.0;
  std::vector<Matching> matchings_;
  std::vector<std::vector<double>> gram_inv_;
  std::vector<std::vector<std::size_t>> edge_strides_;
};

inline MatchingProjector haar_projector(GroupTag group, std::size_t local_dim, int k) {
  return MatchingProjector(group, local_dim, k);
}

/// A bijection of [N] stored as an index array.
struct PermSpec {
  std::size_t N = 0;
  std::vector<std::uint32_t> mapping;

  bool is_bijection() const {
    std::vector<bool> seen(N, false);
    for (auto v : mapping) {
      if (v >= N || seen[v]) return false;
      seen[v] = true;
    }
    return mapping.size() == N;
  }
};

/// The simple 3-bit permutations f_{i,j1,j2,h} on {0,1}^n: flip bit i by
/// h(x_{j1}, x_{j2}), over all ordered distinct triples (i,j1,j2) and all 16
/// boolean h.  Multiset size n(n-1)(n-2)*16; every element is an involution.
/// Bit i of index x is (x >> (n-1-i)) & 1, matching the gate convention.
inline std::vector<PermSpec> simple_3bit_perms(int n) {
  if (n < 3) throw PreconditionError("simple_3bit_perms: need n >= 3");
  const std::size_t N = std::size_t{1} << n;
  std::vector<PermSpec> out;
  out.reserve(static_cast<std::size_t>(n) * (n - 1) * (n - 2) * 16);
  for (int i = 0; i < n; ++i)
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2) {
        if (j1 == i || j2 == i || j1 == j2) continue;
        for (unsigned h = 0; h < 16; ++h) {
          PermSpec p;
          p.N = N;
          p.mapping.resize(N);
          const std::size_t bit_i = std::size_t{1} << (n - 1 - i);
          for (std::size_t x = 0; x < N; ++x) {
            const unsigned a = (x >> (n - 1 - j1)) & 1u;
            const unsigned b = (x >> (n - 1 - j2)) & 1u;
            const unsigned flip = (h >> (2 * a + b)) & 1u;
            p.mapping[x] = static_cast<std::uint32_t>(flip ? (x ^ bit_i) : x);
          }
          out.push_back(std::move(p));
        }
      }
  return out;
}

/// Enumeration of [N]_(k): ordered k-tuples of distinct indices, in
/// lexicographic order, with a code->index lookup (code = base-N digits).
struct DistinctTupleSpace {
  std::size_t N = 0;
  int k = 0;
  std::vector<std::vector<std::uint32_t>> tuples;
  std::vector<std::int64_t> code_to_index;  // -1 for non-distinct codes

  DistinctTupleSpace(std::size_t n, int kk) : N(n), k(kk) {
    std::size_t codes = 1;
    for (int i = 0; i < k; ++i) {
      if (codes > Caps::instance().dense_entries / N)
        throw SizeCapError("distinct tuple space exceeds cap");
      codes *= N;
    }
    code_to_index.assign(codes, -1);
    std::vector<std::uint32_t> t(k, 0);
    for (std::size_t code = 0; code < codes; ++code) {
      std::size_t rem = code;
      bool distinct = true;
      for (int i = k - 1; i >= 0; --i) {
        t[i] = static_cast<std::uint32_t>(rem % N);
        rem /= N;
      }
      for (int i = 0; i < k && distinct; ++i)
        for (int j = i + 1; j < k; ++j)
          if (t[i] == t[j]) {
            distinct = false;
            break;
          }
      if (distinct) {
        code_to_index[code] = static_cast<std::int64_t>(tuples.size());
        tuples.push_back(t);
      }
    }
  }

  std::size_t size() const { return tuples.size(); }

  std::size_t code_of(const std::vector<std::uint32_t>& t) const {
    std::size_t code = 0;
    for (int i = 0; i < k; ++i) code = code * N + t[i];
    return code;
  }
};

/// Average of W^k(pi) over a permutation multiset, as a matrix on [N]_(k).
inline ComplexMatrix wk_moment(const std::vector<PermSpec>& perms, std::size_t N, int k) {
  if (perms.empty()) throw PreconditionError("wk_moment: empty multiset");
  if (k > static_cast<int>(N)) throw PreconditionError("wk_moment: k > N");
  DistinctTupleSpace space(N, k);
  const std::size_t dim = space.size();
  ComplexMatrix out(dim, dim);
  const double w = 1.0 / static_cast<double>(perms.size());
  std::vector<std::uint32_t> image(k);
  for (const auto& p : perms) {
    if (p.N != N) throw PreconditionError("wk_moment: permutation domain mismatch");
    for (std::size_t t = 0; t < dim; ++t) {
      for (int i = 0; i < k; ++i) image[i] = p.mapping[space.tuples[t][i]];
      const auto idx = space.code_to_index[space.code_of(image)];
      out(static_cast<std::size_t>(idx), t) += w;
    }
  }
  return out;
}

/// The uniform-S_N moment on [N]_(k): S_N acts transitively on distinct
/// tuples, so every entry is 1/|[N]_(k)|.
inline ComplexMatrix wk_moment_uniform(std::size_t N, int k) {
  DistinctTupleSpace space(N, k);
  const std::size_t dim = space.size();
  ComplexMatrix out(dim, dim);
  const double v = 1.0 / static_cast<double>(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) out(r, c) = v;
  return out;
}

}  // namespace designforge
