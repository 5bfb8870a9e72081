#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "designforge/common.hpp"
#include "designforge/complex_matrix.hpp"

namespace designforge {

/// Elementary gate kinds.  Q is the rational rotation [[3/5,-4/5],[4/5,3/5]];
/// NegId is -Id on one qubit (a global sign when embedded); Col1Sign is the
/// n-qubit diagonal diag(sign,1,...,1) used to lift SO samples into O.  It is
/// not a local gate and always acts on the full register (empty wire list).
enum class GateKind : std::uint8_t { Q, Qinv, H, S, Sinv, T, Tinv, CNOT, NegId, Col1Sign };

inline const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::Q: return "Q";
    case GateKind::Qinv: return "Qinv";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::Sinv: return "Sinv";
    case GateKind::T: return "T";
    case GateKind::Tinv: return "Tinv";
    case GateKind::CNOT: return "CNOT";
    case GateKind::NegId: return "NegId";
    case GateKind::Col1Sign: return "COL1SIGN";
  }
  return "?";
}

inline GateKind parse_gate_kind(const std::string& s) {
  if (s == "Q") return GateKind::Q;
  if (s == "Qinv") return GateKind::Qinv;
  if (s == "H") return GateKind::H;
  if (s == "S") return GateKind::S;
  if (s == "Sinv") return GateKind::Sinv;
  if (s == "T") return GateKind::T;
  if (s == "Tinv") return GateKind::Tinv;
  if (s == "CNOT") return GateKind::CNOT;
  if (s == "NegId") return GateKind::NegId;
  if (s == "COL1SIGN") return GateKind::Col1Sign;
  throw PreconditionError("unknown gate kind: " + s);
}

inline int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::CNOT: return 2;
    case GateKind::Col1Sign: return 0;
    default: return 1;
  }
}

/// A signed, placed elementary gate.  Wires are 0-indexed qubit positions,
/// distinct, ordered (control before target for CNOT).
struct Gate {
  GateKind kind = GateKind::Q;
  int sign = +1;
  std::vector<std::uint32_t> wires;

  Gate() = default;
  Gate(GateKind k, int s, std::vector<std::uint32_t> w)
      : kind(k), sign(s), wires(std::move(w)) {}

  Gate inverse() const {
    GateKind inv = kind;
    switch (kind) {
      case GateKind::Q: inv = GateKind::Qinv; break;
      case GateKind::Qinv: inv = GateKind::Q; break;
      case GateKind::S: inv = GateKind::Sinv; break;
      case GateKind::Sinv: inv = GateKind::S; break;
      case GateKind::T: inv = GateKind::Tinv; break;
      case GateKind::Tinv: inv = GateKind::T; break;
      // H, CNOT, NegId, Col1Sign are involutions.
      default: break;
    }
    return Gate(inv, sign, wires);
  }

  Gate negated() const { return Gate(kind, -sign, wires); }

  friend bool operator==(const Gate& a, const Gate& b) {
    return a.kind == b.kind && a.sign == b.sign && a.wires == b.wires;
  }
  // Lexicographic in (kind, sign, wires) with +1 ordered before -1; this is
  // the frozen enumeration order for base sets.
  friend bool operator<(const Gate& a, const Gate& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.sign != b.sign) return a.sign > b.sign;
    return a.wires < b.wires;
  }
};

/// The 2x2 or 4x4 matrix of a gate, sign included.  Entries are exactly the
/// defining algebraic values (3/5, 1/sqrt2, e^{i pi/4}, ...).
inline ComplexMatrix gate_matrix(const Gate& g) {
  const double s = static_cast<double>(g.sign);
  const double rt = 1.0 / std::numbers::sqrt2;
  ComplexMatrix m;
  switch (g.kind) {
    case GateKind::Q:
      m = ComplexMatrix{{0.6, -0.8}, {0.8, 0.6}};
      break;
    case GateKind::Qinv:
      m = ComplexMatrix{{0.6, 0.8}, {-0.8, 0.6}};
      break;
    case GateKind::H:
      m = ComplexMatrix{{rt, rt}, {rt, -rt}};
      break;
    case GateKind::S:
      m = ComplexMatrix{{1.0, 0.0}, {0.0, Complex(0.0, 1.0)}};
      break;
    case GateKind::Sinv:
      m = ComplexMatrix{{1.0, 0.0}, {0.0, Complex(0.0, -1.0)}};
      break;
    case GateKind::T:
      m = ComplexMatrix{{1.0, 0.0}, {0.0, Complex(rt, rt)}};
      break;
    case GateKind::Tinv:
      m = ComplexMatrix{{1.0, 0.0}, {0.0, Complex(rt, -rt)}};
      break;
    case GateKind::CNOT:
      m = ComplexMatrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
      break;
    case GateKind::NegId:
      m = ComplexMatrix{{-1.0, 0.0}, {0.0, -1.0}};
      break;
    case GateKind::Col1Sign:
      throw PreconditionError("Col1Sign has no fixed-arity matrix; embed it");
  }
  if (s != 1.0) m *= Complex(s, 0.0);
  return m;
}

/// Embeds a gate on the named tensor factors of an n-qubit register (qubit 0
/// is the most significant bit of the basis index) and identity elsewhere.
inline ComplexMatrix embed_gate(const Gate& g, const std::vector<std::uint32_t>& wires, int n) {
  const std::size_t dim = std::size_t{1} << n;
  if (g.kind == GateKind::Col1Sign) {
    ComplexMatrix out = ComplexMatrix::identity(dim);
    out(0, 0) = static_cast<double>(g.sign);
    return out;
  }
  const int arity = gate_arity(g.kind);
  if (static_cast<int>(wires.size()) != arity)
    throw PreconditionError("embed_gate: wire count does not match gate arity");
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (wires[i] >= static_cast<std::uint32_t>(n))
      throw PreconditionError("embed_gate: wire out of range");
    for (std::size_t j = i + 1; j < wires.size(); ++j)
      if (wires[i] == wires[j]) throw PreconditionError("embed_gate: duplicate wire");
  }

  Gate local = g;
  local.wires.clear();
  const ComplexMatrix m = gate_matrix(local);
  const std::size_t local_dim = std::size_t{1} << arity;

  std::vector<int> shifts(wires.size());
  for (std::size_t i = 0; i < wires.size(); ++i)
    shifts[i] = n - 1 - static_cast<int>(wires[i]);

  ComplexMatrix out(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t local_in = 0;
    for (std::size_t i = 0; i < wires.size(); ++i)
      local_in = (local_in << 1) | ((col >> shifts[i]) & 1u);
    std::size_t base = col;
    for (std::size_t i = 0; i < wires.size(); ++i)
      base &= ~(std::size_t{1} << shifts[i]);
    for (std::size_t local_out = 0; local_out < local_dim; ++local_out) {
      const Complex v = m(local_out, local_in);
      if (v == Complex{0.0, 0.0}) continue;
      std::size_t row = base;
      for (std::size_t i = 0; i < wires.size(); ++i)
        if ((local_out >> (arity - 1 - static_cast<int>(i))) & 1u)
          row |= std::size_t{1} << shifts[i];
      out(row, col) = v;
    }
  }
  return out;
}

/// Convenience: embed a gate using its own wire list.
inline ComplexMatrix embed_gate(const Gate& g, int n) { return embed_gate(g, g.wires, n); }

/// An ordered n-qubit gate list; gates[0] is applied first, so the circuit
/// matrix is global_phase * G_{T-1} ... G_1 G_0.
struct Circuit {
  int n = 0;
  std::vector<Gate> gates;
  Complex global_phase = 1.0;

  ComplexMatrix matrix() const {
    const std::size_t dim = std::size_t{1} << n;
    ComplexMatrix m = ComplexMatrix::identity(dim);
    for (const Gate& g : gates) m = embed_gate(g, n) * m;
    if (global_phase != Complex{1.0, 0.0}) m *= global_phase;
    return m;
  }
};

inline nlohmann::ordered_json circuit_to_json(const Circuit& c) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["n"] = c.n;
  j["gates"] = nlohmann::ordered_json::array();
  for (const Gate& g : c.gates) {
    nlohmann::ordered_json jg;
    jg["kind"] = gate_kind_name(g.kind);
    jg["sign"] = g.sign;
    jg["wires"] = g.wires;
    j["gates"].push_back(jg);
  }
  j["phase"] = {c.global_phase.real(), c.global_phase.imag()};
  return j;
}

inline Circuit circuit_from_json(const nlohmann::json& j) {
  Circuit c;
  c.n = j.at("n").get<int>();
  for (const auto& jg : j.at("gates")) {
    Gate g;
    g.kind = parse_gate_kind(jg.at("kind").get<std::string>());
    g.sign = jg.at("sign").get<int>();
    g.wires = jg.at("wires").get<std::vector<std::uint32_t>>();
    c.gates.push_back(std::move(g));
  }
  const auto& ph = j.at("phase");
  c.global_phase = Complex(ph.at(0).get<double>(), ph.at(1).get<double>());
  return c;
}

/// The fixed 4-qubit base gate multiset: closure of {Q placements} u {CNOT
/// placements} (orthogonal) or {H,S,T placements} u {CNOT placements}
/// (unitary) under inverses and negations, every element determinant-one
/// after embedding on 4 qubits.  Enumeration order is lexicographic in
/// (kind, sign, wires) and frozen by a golden test.
struct BaseSet {
  GroupTag group = GroupTag::SO;
  int n0 = 4;
  std::vector<Gate> elements;
  bool lazy = false;  // logically adjoins Identity at total weight 1/2

  /// 16x16 matrix of element i, including the determinant-one normalization
  /// by the principal 16th root (a no-op for these gate sets, asserted so).
  ComplexMatrix element_matrix(std::size_t i) const {
    ComplexMatrix m = embed_gate(elements[i], n0);
    const Complex det = Eigen::MatrixXcd(m.map()).determinant();
    if (std::abs(det - Complex{1.0, 0.0}) > 1e-9) {
      const double theta = std::arg(det);
      const Complex root = std::polar(
          std::pow(std::abs(det), 1.0 / 16.0), theta / 16.0);
      m *= Complex{1.0, 0.0} / root;
    }
    return m;
  }
};

/// Builds the base gate multiset for SO or SU.
inline BaseSet base_set(GroupTag group, bool lazy) {
  if (!is_special_group(group))
    throw PreconditionError("base_set: group must be SO or SU");
  BaseSet bs;
  bs.group = group;
  bs.lazy = lazy;
  const int n0 = bs.n0;

  std::vector<GateKind> one_qubit_kinds;
  if (group == GroupTag::SO)
    one_qubit_kinds = {GateKind::Q, GateKind::Qinv};
  else
    one_qubit_kinds = {GateKind::H, GateKind::S, GateKind::Sinv, GateKind::T, GateKind::Tinv};

  for (GateKind k : one_qubit_kinds)
    for (int sign : {+1, -1})
      for (std::uint32_t w = 0; w < static_cast<std::uint32_t>(n0); ++w)
        bs.elements.emplace_back(k, sign, std::vector<std::uint32_t>{w});
  for (int sign : {+1, -1})
    for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n0); ++i)
      for (std::uint32_t j = 0; j < static_cast<std::uint32_t>(n0); ++j)
        if (i != j)
          bs.elements.emplace_back(GateKind::CNOT, sign, std::vector<std::uint32_t>{i, j});

  std::sort(bs.elements.begin(), bs.elements.end());
  return bs;
}

}  // namespace designforge
