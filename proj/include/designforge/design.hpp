#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "designforge/common.hpp"
#include "designforge/complex_matrix.hpp"
#include "designforge/gates.hpp"
#include "designforge/moments.hpp"
#include "designforge/walks.hpp"

namespace designforge {

/// One slot of the design's placement alphabet: a base-set element on a
/// 4-subset of the wires, or the lazy identity.
struct AlphabetEntry {
  bool identity = false;
  std::uint32_t base_index = 0;
  std::uint32_t subset_index = 0;
};

/// A random seed for the design sampler: an exact-domain integer below the
/// monomial count (plus one lift bit for O).
struct Seed {
  std::uint64_t value = 0;
  int width = 0;
};

/// End-to-end design specification: the lazy base gate multiset placed on
/// all increasing 4-subsets of [n], padded to a power-of-two alphabet by
/// cycling (duplication counts recorded in `weights`), bound to a cascade.
struct DesignSpec {
  GroupTag group = GroupTag::SO;
  int n = 4;
  int k = 1;
  double eps = 0.0;
  BaseSet base;
  std::vector<std::vector<std::uint32_t>> subsets;
  std::vector<AlphabetEntry> alphabet;  // size c, a power of two
  std::vector<std::uint32_t> weights;   // per unpadded slot: 1 + duplicates
  Cascade cascade;
  double delta_used = 0.0;
  std::optional<double> measured_gap;

  std::uint64_t alphabet_size() const { return alphabet.size(); }
  std::uint64_t monomial_count() const {
    const std::uint64_t n_mon = cascade.monomial_count();
    return group == GroupTag::O ? 2 * n_mon : n_mon;
  }
  int seed_bits() const {
    const std::uint64_t n_mon = cascade.monomial_count();
    int bits = 0;
    while ((std::uint64_t{1} << bits) < n_mon) ++bits;
    return bits + (group == GroupTag::O ? 1 : 0);
  }

  /// The n-qubit matrix of one alphabet slot.
  ComplexMatrix slot_matrix(const AlphabetEntry& e) const {
    if (e.identity) return ComplexMatrix::identity(std::size_t{1} << n);
    Gate g = base.elements[e.base_index];
    for (auto& w : g.wires) w = subsets[e.subset_index][w];
    return embed_gate(g, n);
  }
};

namespace detail {

inline std::vector<std::vector<std::uint32_t>> increasing_subsets(int n, int r) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> cur(r);
  for (int i = 0; i < r; ++i) cur[i] = static_cast<std::uint32_t>(i);
  for (;;) {
    out.push_back(cur);
    int i = r - 1;
    while (i >= 0 && cur[i] == static_cast<std::uint32_t>(n - r + i)) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < r; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

}  // namespace detail

/// Assembles the placement alphabet (lazy base x 4-subsets, power-of-two
/// padding by cycling) and binds it to an already materialized cascade.
/// delta is the gap parameter used for accounting; the empirically measured
/// gap is recorded separately by measure_gap.
inline DesignSpec build_design(GroupTag group, int n, int k, double eps, double delta,
                               Cascade cascade) {
  if (n < 4) throw PreconditionError("build_design: need n >= 4 (the base arity)");
  DesignSpec spec;
  spec.group = group;
  spec.n = n;
  spec.k = k;
  spec.eps = eps;
  spec.delta_used = delta;
  const GroupTag base_group =
      (group == GroupTag::SO || group == GroupTag::O) ? GroupTag::SO : GroupTag::SU;
  spec.base = base_set(base_group, /*lazy=*/true);
  spec.subsets = detail::increasing_subsets(n, spec.base.n0);

  const std::uint64_t per_subset = 2 * spec.base.elements.size();  // gates + identities
  const std::uint64_t c0 = per_subset * spec.subsets.size();
  std::uint64_t c = 1;
  while (c < c0) c <<= 1;
  if (cascade.c != c)
    throw PreconditionError("build_design: cascade alphabet size " +
                            std::to_string(cascade.c) + " != padded alphabet " +
                            std::to_string(c));

  spec.alphabet.reserve(c);
  for (std::uint64_t slot = 0; slot < c0; ++slot) {
    AlphabetEntry e;
    e.subset_index = static_cast<std::uint32_t>(slot / per_subset);
    const std::uint64_t inner = slot % per_subset;
    if (inner < spec.base.elements.size())
      e.base_index = static_cast<std::uint32_t>(inner);
    else
      e.identity = true;
    spec.alphabet.push_back(e);
  }
  spec.weights.assign(c0, 1);
  for (std::uint64_t slot = c0; slot < c; ++slot) {
    spec.alphabet.push_back(spec.alphabet[slot % c0]);
    ++spec.weights[slot % c0];
  }
  spec.cascade = std::move(cascade);
  return spec;
}

/// Padded alphabet size for (group, n) without building anything.
inline std::uint64_t design_alphabet_size(GroupTag group, int n) {
  const GroupTag base_group =
      (group == GroupTag::SO || group == GroupTag::O) ? GroupTag::SO : GroupTag::SU;
  const std::uint64_t base_count = base_group == GroupTag::SO ? 40 : 64;
  std::uint64_t c0 = 2 * base_count;
  c0 *= detail::increasing_subsets(n, 4).size();
  std::uint64_t c = 1;
  while (c < c0) c <<= 1;
  return c;
}

/// First-column lift from the special group to the full one: O scales the
/// first column by b, U needs no augmentation.
inline ComplexMatrix lift_to_full_group(ComplexMatrix g, GroupTag group, int b) {
  if (group == GroupTag::O && b == -1)
    for (std::size_t r = 0; r < g.rows(); ++r) g(r, 0) = -g(r, 0);
  return g;
}

/// Deterministic seed -> circuit map.  Walk symbols are fetched highest
/// position first so gates appear in application (time) order; lazy identity
/// symbols emit nothing; a daggered symbol emits the inverse gate (present
/// in the base set by closure); negated CNOTs are rewritten as NegId + CNOT
/// so emitted circuits use only CNOT and fixed 1-qubit gates.  For O the top
/// seed bit prepends the first-column sign pseudo-gate.
inline Circuit sample_circuit(const DesignSpec& spec, const Seed& seed) {
  const std::uint64_t n_mon = spec.cascade.monomial_count();
  const std::uint64_t domain = spec.group == GroupTag::O ? 2 * n_mon : n_mon;
  if (seed.value >= domain)
    throw PreconditionError("sample_circuit: seed out of range");
  const bool lift_bit = spec.group == GroupTag::O && seed.value >= n_mon;
  const std::uint64_t monomial = lift_bit ? seed.value - n_mon : seed.value;

  Circuit c;
  c.n = spec.n;
  if (lift_bit) c.gates.emplace_back(GateKind::Col1Sign, -1, std::vector<std::uint32_t>{});
  const std::uint64_t length = spec.cascade.length();
  for (std::uint64_t j = length; j-- > 0;) {
    const Symbol sym = walk_symbol(spec.cascade, monomial, j);
    const AlphabetEntry& entry = spec.alphabet[sym.base_index];
    if (entry.identity) continue;
    Gate g = spec.base.elements[entry.base_index];
    if (sym.dagger) g = g.inverse();
    for (auto& w : g.wires) w = spec.subsets[entry.subset_index][w];
    if (g.sign == -1 && g.kind == GateKind::CNOT) {
      c.gates.emplace_back(GateKind::NegId, +1, std::vector<std::uint32_t>{0});
      g.sign = +1;
    }
    c.gates.push_back(std::move(g));
  }
  return c;
}

/// Design-error report from exhaustive enumeration.
struct DesignReport {
  GroupTag group;
  int n = 0;
  int k = 0;
  double eps = 0.0;
  std::uint64_t monomials = 0;
  std::uint64_t length = 0;
  int seed_bits = 0;
  double measured_gap = 0.0;
  double design_error_op = 0.0;
  double design_error_s1 = 0.0;
  double f_bound = 0.0;
};

/// || E_slots[rho^{k,k}(U_slot)] - Pi ||_op: the base spectral gap of the
/// padded lazy alphabet, measured exactly (dense).
inline double measure_base_gap(const DesignSpec& spec, int k_eval,
                               const ComplexMatrix& haar) {
  ComplexMatrix acc(haar.rows(), haar.cols());
  std::uint64_t identity_slots = 0;
  // Group the identity slots: their rho is Id.
  for (std::size_t slot = 0; slot < spec.alphabet.size(); ++slot) {
    const auto& e = spec.alphabet[slot];
    if (e.identity) {
      ++identity_slots;
      continue;
    }
    acc += rho_kk(spec.slot_matrix(e), k_eval);
  }
  if (identity_slots > 0) {
    ComplexMatrix id = ComplexMatrix::identity(acc.rows());
    id *= Complex(static_cast<double>(identity_slots), 0.0);
    acc += id;
  }
  acc *= Complex(1.0 / static_cast<double>(spec.alphabet.size()), 0.0);
  return spectral_gap_norm(acc, haar);
}

/// The Haar projector the design is measured against.  O shares the SO
/// matching span (valid under the same k < D/2 window); U shares SU's.
inline ComplexMatrix design_haar_projector(GroupTag group, int n, int k) {
  const GroupTag proj_group =
      (group == GroupTag::SO || group == GroupTag::O) ? GroupTag::SO : GroupTag::SU;
  return moment_haar_exact(proj_group, std::size_t{1} << n, k);
}

/// Exact average over all N circuits of rho^{k,k}(circuit matrix), compared
/// to the Haar projector; also reports the F-cascade predicted bound from
/// the measured base gap and certified expansions.
inline DesignReport enumerate_design_moment(const DesignSpec& spec, int k_eval) {
  const std::uint64_t n_mon = spec.monomial_count();
  if (n_mon > Caps::instance().enum_limit)
    throw SizeCapError(
        "enumerate_design_moment: monomial count exceeds the enumeration cap; "
        "use Monte-Carlo sampling instead");
  const ComplexMatrix haar = design_haar_projector(spec.group, spec.n, k_eval);

  ComplexMatrix acc(haar.rows(), haar.cols());
  for (std::uint64_t i = 0; i < n_mon; ++i) {
    const Circuit circ = sample_circuit(spec, Seed{i, spec.seed_bits()});
    acc += rho_kk(circ.matrix(), k_eval);
  }
  acc *= Complex(1.0 / static_cast<double>(n_mon), 0.0);

  DesignReport r;
  r.group = spec.group;
  r.n = spec.n;
  r.k = k_eval;
  r.eps = spec.eps;
  r.monomials = n_mon;
  r.length = spec.cascade.length();
  r.seed_bits = spec.seed_bits();
  r.measured_gap = measure_base_gap(spec, k_eval, haar);
  r.design_error_op = design_error(acc, haar, NormKind::Operator);
  r.design_error_s1 = design_error(acc, haar, NormKind::Schatten1);
  r.f_bound = spec.cascade.f_bound(r.measured_gap);
  return r;
}

inline nlohmann::ordered_json design_report_json(const DesignReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["group"] = group_name(r.group);
  j["n"] = r.n;
  j["k"] = r.k;
  j["eps"] = r.eps;
  j["N"] = r.monomials;
  j["L"] = r.length;
  j["seed_bits"] = r.seed_bits;
  j["measured_gap"] = r.measured_gap;
  j["design_error_op"] = r.design_error_op;
  j["design_error_s1"] = r.design_error_s1;
  j["f_bound"] = r.f_bound;
  return j;
}

/// Seed-length accounting for full paper-scale parameters: exact exponent
/// arithmetic over the admissible grid; nothing is materialized.  The
/// default gap placeholder is 1/(n k^3), rounded down to the admissible
/// 16^{-i} grid (the paper's poly(k) is unspecified).
struct DesignAccounting {
  CascadeParams params;
  int seed_bits = 0;
  double delta_used = 0.0;
};

inline DesignAccounting design_accounting(GroupTag group, int n, int k, double eps,
                                          std::optional<double> delta = std::nullopt) {
  const double delta_raw =
      delta.value_or(1.0 / (static_cast<double>(n) * std::pow(static_cast<double>(k), 3)));
  // Round down to 16^{-i}.
  int i2 = 1;
  while (std::pow(16.0, -static_cast<double>(i2)) > delta_raw + 1e-15) ++i2;
  const double delta_grid = std::pow(16.0, -static_cast<double>(i2));
  const double eps_cascade = eps / std::pow(2.0, static_cast<double>(n) * k);
  DesignAccounting acc;
  acc.delta_used = delta_grid;
  acc.params = cascade_params(design_alphabet_size(group, n), delta_grid, eps_cascade);
  acc.seed_bits = acc.params.log2_monomials() + (group == GroupTag::O ? 1 : 0);
  return acc;
}

}  // namespace designforge
