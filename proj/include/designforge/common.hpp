#pragma once

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace designforge {

using Complex = std::complex<double>;
using BigInt = boost::multiprecision::cpp_int;

/// Exact rational arithmetic over arbitrary-precision integers.  Used for
/// matching Grams, generating-function identities, and small Gram inversions,
/// where "exact" means exact.
using Rational = boost::rational<BigInt>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SizeCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Process-wide size caps.  Defaults are deliberately desk-scale; the
/// DESIGNFORGE_CAPS environment variable ("dense=...,enum=...,mc=...,graph=...")
/// raises them for bigger machines.
struct Caps {
  std::size_t dense_entries = std::size_t{1} << 26;  // max entries of a dense matrix
  std::size_t dense_eig_dim = 4096;                  // dense eigensolve / SVD threshold
  std::size_t enum_limit = std::size_t{1} << 16;     // full design enumeration
  std::size_t mc_samples = 100000;                   // default Monte-Carlo sample count
  std::size_t graph_vertices = 200000;               // expander certification cap
  int matching_k = 6;                                // matching enumeration cap

  static Caps& instance() {
    static Caps caps = from_env();
    return caps;
  }

 private:
  static Caps from_env() {
    Caps c;
    const char* s = std::getenv("DESIGNFORGE_CAPS");
    if (!s) return c;
    std::string spec(s);
    std::size_t pos = 0;
    while (pos < spec.size()) {
      auto eq = spec.find('=', pos);
      if (eq == std::string::npos) break;
      auto end = spec.find(',', eq);
      if (end == std::string::npos) end = spec.size();
      const std::string key = spec.substr(pos, eq - pos);
      const unsigned long long val = std::stoull(spec.substr(eq + 1, end - eq - 1));
      if (key == "dense") c.dense_entries = val;
      else if (key == "dense_eig") c.dense_eig_dim = val;
      else if (key == "enum") c.enum_limit = val;
      else if (key == "mc") c.mc_samples = val;
      else if (key == "graph") c.graph_vertices = val;
      else if (key == "matching_k") c.matching_k = static_cast<int>(val);
      pos = end + (end < spec.size() ? 1 : 0);
    }
    return c;
  }
};

enum class GroupTag { SO, SU, O, U, SymmetricGroup };

inline const char* group_name(GroupTag g) {
  switch (g) {
    case GroupTag::SO: return "SO";
    case GroupTag::SU: return "SU";
    case GroupTag::O: return "O";
    case GroupTag::U: return "U";
    case GroupTag::SymmetricGroup: return "Sym";
  }
  return "?";
}

inline GroupTag parse_group(const std::string& s) {
  if (s == "SO") return GroupTag::SO;
  if (s == "SU") return GroupTag::SU;
  if (s == "O") return GroupTag::O;
  if (s == "U") return GroupTag::U;
  if (s == "Sym") return GroupTag::SymmetricGroup;
  throw PreconditionError("unknown group tag: " + s);
}

/// True for the groups whose elements are real matrices.
inline bool is_real_group(GroupTag g) {
  return g == GroupTag::SO || g == GroupTag::O || g == GroupTag::SymmetricGroup;
}

/// True for SO/SU (the "special" groups the gate sets live in).
inline bool is_special_group(GroupTag g) {
  return g == GroupTag::SO || g == GroupTag::SU;
}

}  // namespace designforge
