#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "designforge/common.hpp"
#include "designforge/complex_matrix.hpp"

namespace designforge {

/// A perfect matching of [2k] (0-indexed: of {0,...,2k-1}).  Canonical form:
/// each pair stored (lo,hi), pairs sorted by lo.  Bipartite means every pair
/// crosses the cut {0..k-1} | {k..2k-1}.
struct Matching {
  int k = 0;
  std::vector<std::pair<int, int>> pairs;

  void canonicalize() {
    for (auto& p : pairs)
      if (p.first > p.second) std::swap(p.first, p.second);
    std::sort(pairs.begin(), pairs.end());
  }

  bool is_bipartite() const {
    for (const auto& [a, b] : pairs)
      if (!((a < k) ^ (b < k))) return false;
    return true;
  }

  friend bool operator==(const Matching& a, const Matching& b) {
    return a.k == b.k && a.pairs == b.pairs;
  }
  friend bool operator<(const Matching& a, const Matching& b) { return a.pairs < b.pairs; }
};

/// The identity pairing {{0,k},{1,k+1},...,{k-1,2k-1}}; its state is
/// vec(Id_{D^k}) / D^{k/2}.
inline Matching identity_matching(int k) {
  Matching m;
  m.k = k;
  for (int i = 0; i < k; ++i) m.pairs.emplace_back(i, k + i);
  return m;
}

namespace detail {

inline void enumerate_matchings_rec(int k, bool bipartite, std::vector<int>& partner,
                                    std::vector<Matching>& out) {
  const int n = 2 * k;
  int first = -1;
  for (int i = 0; i < n; ++i)
    if (partner[i] < 0) {
      first = i;
      break;
    }
  if (first < 0) {
    Matching m;
    m.k = k;
    for (int i = 0; i < n; ++i)
      if (partner[i] > i) m.pairs.emplace_back(i, partner[i]);
    out.push_back(std::move(m));
    return;
  }
  for (int j = first + 1; j < n; ++j) {
    if (partner[j] >= 0) continue;
    if (bipartite && !((first < k) ^ (j < k))) continue;
    partner[first] = j;
    partner[j] = first;
    enumerate_matchings_rec(k, bipartite, partner, out);
    partner[first] = -1;
    partner[j] = -1;
  }
}

}  // namespace detail

/// All perfect matchings of [2k] in canonical (lexicographic) order:
/// (2k-1)!! of them, or k! with the bipartite restriction.
inline std::vector<Matching> enumerate_matchings(int k, bool bipartite) {
  if (k < 1) throw PreconditionError("enumerate_matchings: k must be >= 1");
  if (k > Caps::instance().matching_k)
    throw SizeCapError("enumerate_matchings: k exceeds the configured cap");
  std::vector<int> partner(2 * k, -1);
  std::vector<Matching> out;
  detail::enumerate_matchings_rec(k, bipartite, partner, out);
  // The first-free recursion emits lexicographically sorted canonical pair
  // lists already; keep the sort as a guarantee rather than an accident.
  std::sort(out.begin(), out.end());
  return out;
}

/// Number of connected components of the union multigraph M1 u M2 on [2k],
/// by union-find.  Every vertex has degree 2 (one edge from each matching),
/// so the union is a disjoint set of cycles.
inline int union_cycle_count(const Matching& m1, const Matching& m2) {
  if (m1.k != m2.k) throw PreconditionError("cycle count: mismatched k");
  const int n = 2 * m1.k;
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  int components = n;
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  };
  for (const auto& [a, b] : m1.pairs) unite(a, b);
  for (const auto& [a, b] : m2.pairs) unite(a, b);
  return components;
}

/// <Phi_M1 | Phi_M2> = D^{cc(M1 u M2) - k}, exactly.
inline Rational matching_gram(const Matching& m1, const Matching& m2, int local_dim) {
  const int cc = union_cycle_count(m1, m2);
  const int exponent = cc - m1.k;
  BigInt num = 1, den = 1;
  for (int i = 0; i < exponent; ++i) num *= local_dim;
  for (int i = 0; i < -exponent; ++i) den *= local_dim;
  return Rational(num, den);
}

/// The matching state |Phi_M> in C^{D^{2k}}: D^{-k/2} times the sum of all
/// basis states whose [2k] tensor slots are colored monochromatically along
/// every edge of M.  Slot 0 is the most significant D-ary digit.
inline std::vector<Complex> phi_state(const Matching& m, std::size_t local_dim) {
  if (local_dim < 2) throw PreconditionError("phi_state: local dimension must be >= 2");
  const int k = m.k;
  const int slots = 2 * k;
  std::size_t dim = 1;
  for (int i = 0; i < slots; ++i) {
    if (dim > Caps::instance().dense_entries / local_dim)
      throw SizeCapError("phi_state: dimension exceeds cap");
    dim *= local_dim;
  }
  // Stride of slot s in the flattened index (slot 0 most significant).
  std::vector<std::size_t> stride(slots, 1);
  for (int s = slots - 2; s >= 0; --s) stride[s] = stride[s + 1] * local_dim;
  // One free color per edge; each edge contributes its color at both slots.
  std::vector<std::size_t> edge_stride(k);
  for (int e = 0; e < k; ++e)
    edge_stride[e] = stride[m.pairs[e].first] + stride[m.pairs[e].second];

  std::vector<Complex> v(dim, Complex{0.0, 0.0});
  const double amp = std::pow(static_cast<double>(local_dim), -0.5 * k);
  std::vector<std::size_t> color(k, 0);
  for (;;) {
    std::size_t idx = 0;
    for (int e = 0; e < k; ++e) idx += color[e] * edge_stride[e];
    v[idx] = amp;
    int e = k - 1;
    while (e >= 0 && ++color[e] == local_dim) color[e--] = 0;
    if (e < 0) break;
  }
  return v;
}

}  // namespace designforge
