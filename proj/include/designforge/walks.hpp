#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "designforge/common.hpp"
#include "designforge/complex_matrix.hpp"
#include "designforge/expanders.hpp"

namespace designforge {

/// One symbol of a monomial: a base-alphabet index, possibly daggered.
struct Symbol {
  std::uint64_t base_index = 0;
  bool dagger = false;

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// A word over symbols, read left to right as an operator product: the
/// product m = s_0 s_1 ... s_{L-1} applies s_{L-1} first.  A depth-t cascade
/// produces words of length 2^t.
struct MonomialWalk {
  std::vector<Symbol> symbols;

  MonomialWalk daggered() const {
    MonomialWalk out;
    out.symbols.reserve(symbols.size());
    for (auto it = symbols.rbegin(); it != symbols.rend(); ++it)
      out.symbols.push_back({it->base_index, !it->dagger});
    return out;
  }

  friend bool operator==(const MonomialWalk&, const MonomialWalk&) = default;
};

/// q_G composition: one monomial s_j^dagger s_i per directed edge (i,j) of G,
/// in canonical edge order.  |S| must equal the vertex count.
inline std::vector<MonomialWalk> q_compose(const RegularGraph& g,
                                           const std::vector<MonomialWalk>& s) {
  if (s.size() != g.n)
    throw DimensionError("q_compose: sequence length must equal vertex count");
  std::vector<MonomialWalk> out;
  out.reserve(g.edge_count());
  for (std::uint64_t e = 0; e < g.edge_count(); ++e) {
    const std::uint64_t i = g.edge_tail(e);
    const std::uint64_t j = g.edge_head(e);
    MonomialWalk m = s[j].daggered();
    m.symbols.insert(m.symbols.end(), s[i].symbols.begin(), s[i].symbols.end());
    out.push_back(std::move(m));
  }
  return out;
}

/// The identity sequence (u_1, ..., u_c).
inline std::vector<MonomialWalk> symbol_sequence(std::uint64_t c) {
  std::vector<MonomialWalk> s(c);
  for (std::uint64_t i = 0; i < c; ++i) s[i].symbols = {{i, false}};
  return s;
}

/// One contraction step: f_mu(lambda) = (1-mu) lambda^2 + mu.
inline double f_mu(double mu, double lambda) {
  return (1.0 - mu) * lambda * lambda + mu;
}

/// Composed contraction F = f_{mu_t} o ... o f_{mu_1} applied to lambda.
inline double f_cascade(const std::vector<double>& mus, double lambda) {
  double x = lambda;
  for (double mu : mus) x = f_mu(mu, x);
  return x;
}

/// Evaluates a monomial on a matrix alphabet: the operator product of U_i's
/// and U_i^dagger's in word order (rightmost symbol applied first).
inline ComplexMatrix eval_monomial(const MonomialWalk& m,
                                   const std::vector<ComplexMatrix>& alphabet) {
  if (alphabet.empty()) throw PreconditionError("eval_monomial: empty alphabet");
  const std::size_t dim = alphabet[0].rows();
  for (const auto& u : alphabet)
    if (u.rows() != dim || u.cols() != dim)
      throw DimensionError("eval_monomial: alphabet dimensions disagree");
  ComplexMatrix acc = ComplexMatrix::identity(dim);
  for (const Symbol& s : m.symbols) {
    const ComplexMatrix& u = alphabet[s.base_index];
    acc = acc * (s.dagger ? u.adjoint() : u);
  }
  return acc;
}

/// One stage of a cascade schedule.  Vertex counts and degrees are also kept
/// as exact log2 exponents so full paper-scale schedules (which are never
/// materializable) can still be accounted for precisely: every quantity on
/// the admissible grid is a power of two.
struct CascadeStage {
  int log2_vertices = 0;
  int log2_degree = 0;
  double mu_target = 0.0;
  bool materializable = false;
};

/// Parameters of a derandomized-squaring cascade: alphabet size c = 2^i1,
/// gap delta = 16^{-i2}, target eps = 2^{-2^i3}.  Stage counts follow
/// ell1 = (5/4) log2(1/delta) + 3 and ell2 = log2 log2 (1/eps); the first
/// ell1 stages are 512-regular .11-expanders, stage ell1+j is a 32^{2^j}-
/// regular (1/4)2^{-2^j}-expander.
struct CascadeParams {
  std::uint64_t c = 0;
  double delta = 0.0;
  double eps = 0.0;
  int ell1 = 0;
  int ell2 = 0;
  std::vector<CascadeStage> stages;

  int depth() const { return static_cast<int>(stages.size()); }
  /// log2 of the monomial count N = |E(G_t)|.
  int log2_monomials() const {
    if (stages.empty()) {
      int l = 0;
      while ((std::uint64_t{1} << l) < c) ++l;
      return l;
    }
    return stages.back().log2_vertices + stages.back().log2_degree;
  }
  /// Walk length L = 2^t.
  std::uint64_t length() const { return std::uint64_t{1} << depth(); }

  std::vector<double> mu_targets() const {
    std::vector<double> out;
    for (const auto& s : stages) out.push_back(s.mu_target);
    return out;
  }
};

/// Builds the paper-faithful schedule for admissible (c, delta, eps).
/// Everything is exact exponent arithmetic; no graphs are constructed here.
inline CascadeParams cascade_params(std::uint64_t c, double delta, double eps) {
  CascadeParams p;
  p.c = c;
  p.delta = delta;
  p.eps = eps;
  int log2_c = 0;
  while ((std::uint64_t{1} << log2_c) < c) ++log2_c;
  if ((std::uint64_t{1} << log2_c) != c)
    throw PreconditionError("cascade_params: c must be a power of two (pad the alphabet)");
  // delta = 16^{-i2}
  const double i2 = std::log2(1.0 / delta) / 4.0;
  if (i2 < 1.0 - 1e-9 || std::abs(i2 - std::round(i2)) > 1e-9)
    throw PreconditionError(
        "cascade_params: delta must lie on the admissible grid 16^{-i}, i >= 1");
  // eps = 2^{-2^i3}
  const double log1eps = std::log2(1.0 / eps);
  const double i3 = std::log2(log1eps);
  if (i3 < 0.0 - 1e-9 || std::abs(i3 - std::round(i3)) > 1e-9)
    throw PreconditionError(
        "cascade_params: eps must lie on the admissible grid 2^{-2^i}, i >= 0");
  p.ell1 = static_cast<int>(std::llround(5.0 * i2)) + 3;  // (5/4) log2(1/delta) + 3
  p.ell2 = static_cast<int>(std::llround(i3));

  int log2_vertices = log2_c;
  for (int j = 1; j <= p.ell1; ++j) {
    CascadeStage s;
    s.log2_vertices = log2_vertices;
    s.log2_degree = 9;  // 512-regular
    s.mu_target = 0.11;
    s.materializable = log2_vertices <= 40;
    p.stages.push_back(s);
    log2_vertices += s.log2_degree;
  }
  for (int j = 1; j <= p.ell2; ++j) {
    CascadeStage s;
    s.log2_vertices = log2_vertices;
    s.log2_degree = 5 * (1 << j);  // 32^{2^j}-regular
    s.mu_target = 0.25 * std::pow(2.0, -static_cast<double>(1 << j));
    s.materializable = false;
    p.stages.push_back(s);
    log2_vertices += s.log2_degree;
  }
  return p;
}

/// A materialized cascade: certified expander per stage, with vertex counts
/// chained so V_{i+1} = E_i.  This is the object walks are computed from.
struct Cascade {
  std::uint64_t c = 0;
  std::vector<RegularGraph> graphs;

  int depth() const { return static_cast<int>(graphs.size()); }
  std::uint64_t length() const { return std::uint64_t{1} << depth(); }
  std::uint64_t monomial_count() const {
    return graphs.empty() ? c : graphs.back().edge_count();
  }
  std::vector<double> certified_mus() const {
    std::vector<double> out;
    for (const auto& g : graphs) out.push_back(g.mu_certified.value_or(1.0));
    return out;
  }
  /// F-cascade contraction bound from the certified expansions.
  double f_bound(double base_gap) const { return f_cascade(certified_mus(), base_gap); }
};

/// Materializes a truncated (desk-scale) cascade: `degrees[i]`-regular
/// certified expanders with G_1 on c vertices and V_{i+1} = E_i.  The
/// mu targets may be per-stage; a single value is broadcast.
inline Cascade truncated_cascade(std::uint64_t c, const std::vector<std::uint32_t>& degrees,
                                 const std::vector<double>& mu_targets,
                                 std::uint64_t seed_base = 0) {
  if (degrees.size() != mu_targets.size())
    throw PreconditionError("truncated_cascade: degrees/mu_targets length mismatch");
  Cascade cas;
  cas.c = c;
  std::uint64_t vertices = c;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (vertices > Caps::instance().graph_vertices)
      throw SizeCapError("truncated_cascade: stage vertex count exceeds graph cap");
    cas.graphs.push_back(
        build_expander(vertices, degrees[i], mu_targets[i], seed_base + 101 * i));
    vertices = cas.graphs.back().edge_count();
  }
  return cas;
}

/// The j-th symbol of the i-th monomial of the cascade, by descending the
/// binary composition tree: one rotation-map lookup per level, O(depth) time
/// and O(1) extra space.  Level-t monomials are indexed by edges of G_t.
inline Symbol walk_symbol(const Cascade& cas, std::uint64_t monomial, std::uint64_t position) {
  int level = cas.depth();
  if (monomial >= cas.monomial_count())
    throw PreconditionError("walk_symbol: monomial index out of range");
  if (position >= cas.length())
    throw PreconditionError("walk_symbol: position index out of range");
  std::uint64_t idx = monomial;
  std::uint64_t pos = position;
  bool dag = false;
  while (level > 0) {
    const RegularGraph& g = cas.graphs[static_cast<std::size_t>(level) - 1];
    const std::uint64_t tail = idx / g.d;
    const auto port = static_cast<std::uint32_t>(idx % g.d);
    const std::uint64_t half = std::uint64_t{1} << (level - 1);
    if (pos < half) {
      // Dagger half: symbols of M_head reversed with flipped flags.
      idx = g.rot(tail, port).first;
      pos = half - 1 - pos;
      dag = !dag;
    } else {
      idx = tail;
      pos -= half;
    }
    --level;
  }
  return Symbol{idx, dag};
}

/// Fully materialized monomial list of a cascade (oracle-sized instances
/// only): q_{G_t} o ... o q_{G_1} o (u_1, ..., u_c).
inline std::vector<MonomialWalk> materialize_cascade(const Cascade& cas) {
  std::vector<MonomialWalk> s = symbol_sequence(cas.c);
  for (const auto& g : cas.graphs) s = q_compose(g, s);
  return s;
}

inline nlohmann::ordered_json cascade_manifest(const Cascade& cas) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["c"] = cas.c;
  j["depth"] = cas.depth();
  j["length"] = cas.length();
  j["monomials"] = cas.monomial_count();
  j["graphs"] = nlohmann::ordered_json::array();
  for (const auto& g : cas.graphs) j["graphs"].push_back(graph_manifest(g));
  return j;
}

inline nlohmann::ordered_json cascade_params_manifest(const CascadeParams& p) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["c"] = p.c;
  j["delta"] = p.delta;
  j["eps"] = p.eps;
  j["ell1"] = p.ell1;
  j["ell2"] = p.ell2;
  j["depth"] = p.depth();
  j["length"] = p.length();
  j["log2_monomials"] = p.log2_monomials();
  j["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : p.stages) {
    nlohmann::ordered_json js;
    js["log2_vertices"] = s.log2_vertices;
    js["log2_degree"] = s.log2_degree;
    js["mu_target"] = s.mu_target;
    js["materializable"] = s.materializable;
    j["stages"].push_back(js);
  }
  return j;
}

/// Monomial dump format: one line per monomial, symbols as signed 1-based
/// indices with '-' meaning dagger.
inline std::string monomial_to_line(const MonomialWalk& m) {
  std::string out;
  for (const Symbol& s : m.symbols) {
    if (!out.empty()) out += ' ';
    if (s.dagger) out += '-';
    out += std::to_string(s.base_index + 1);
  }
  return out;
}

}  // namespace designforge
