#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "designforge/common.hpp"
#include "designforge/complex_matrix.hpp"
#include "designforge/haar.hpp"
#include "designforge/matching.hpp"
#include "designforge/moments.hpp"
#include "designforge/rng.hpp"
#include "designforge/schur_weyl.hpp"

namespace designforge {

/// Outcome of one quantitative check: the claimed bound, the measured value,
/// and whether the stated inequality holds within tolerance.  Monte-Carlo
/// checks carry their standard-error band in `details`.
struct CheckReport {
  std::string name;
  nlohmann::ordered_json parameters;
  double paper_bound = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double runtime_ms = 0.0;
  nlohmann::ordered_json details;

  nlohmann::ordered_json to_json(bool include_runtime = false) const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["name"] = name;
    j["parameters"] = parameters;
    j["paper_bound"] = paper_bound;
    j["measured"] = measured;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    if (include_runtime) j["runtime_ms"] = runtime_ms;
    if (!details.is_null()) j["details"] = details;
    return j;
  }
};

namespace verify_detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Largest |eigenvalue| of a Hermitian operator given as a matvec, by power
/// iteration on T^2 with a deterministic start vector.
inline double hermitian_operator_norm(
    std::size_t dim, const std::function<void(std::span<const Complex>, std::span<Complex>)>& op,
    double tol = 1e-10, std::size_t max_iters = 20000) {
  std::vector<Complex> v(dim), t1(dim), t2(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double x = 0.3187 * static_cast<double>(i + 1);
    v[i] = Complex(std::sin(x) + 0.3, std::cos(2.11 * x));
  }
  double nrm = 0.0;
  for (const auto& z : v) nrm += std::norm(z);
  nrm = std::sqrt(nrm);
  for (auto& z : v) z /= nrm;
  double lambda2 = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    op(v, t1);
    op(t1, t2);
    Complex ray = 0.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      ray += std::conj(v[i]) * t2[i];
      norm2 += std::norm(t2[i]);
    }
    const double next = std::abs(ray);
    norm2 = std::sqrt(norm2);
    if (norm2 == 0.0) return 0.0;
    for (std::size_t i = 0; i < dim; ++i) v[i] = t2[i] / norm2;
    if (std::abs(next - lambda2) <= tol * std::max(1.0, next)) return std::sqrt(next);
    lambda2 = next;
  }
  return std::sqrt(lambda2);
}

}  // namespace verify_detail

/// Pi^{(m-1)} acting on the 2k tensor copies with one qubit removed from
/// each copy, tensored with identity on the removed qubits.  Index layout:
/// 2k groups of m bits, group 0 most significant, bit 0 of a group most
/// significant within it.
class FactorEmbeddedProjector {
 public:
  FactorEmbeddedProjector(const MatchingProjector* base, int m, int k, int removed_qubit)
      : base_(base), m_(m), k_(k), removed_(removed_qubit) {
    full_dim_ = std::size_t{1} << (2 * k_ * m_);
    sub_dim_ = std::size_t{1} << (2 * k_ * (m_ - 1));
    blocks_ = std::size_t{1} << (2 * k_);
    if (full_dim_ > Caps::instance().dense_entries)
      throw SizeCapError("factor-embedded projector exceeds the applier cap");
  }

  std::size_t dim() const { return full_dim_; }

  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    std::vector<Complex> sub(sub_dim_), proj(sub_dim_);
    for (std::size_t b = 0; b < blocks_; ++b) {
      for (std::size_t s = 0; s < sub_dim_; ++s) sub[s] = in[full_index(s, b)];
      base_->apply(std::span<const Complex>(sub), std::span<Complex>(proj));
      for (std::size_t s = 0; s < sub_dim_; ++s) out[full_index(s, b)] = proj[s];
    }
  }

  /// Full index from (subindex on the kept qubits, block on removed qubits).
  std::size_t full_index(std::size_t s, std::size_t b) const {
    std::size_t f = 0;
    const int groups = 2 * k_;
    const int sub_bits = m_ - 1;
    const std::size_t low_mask = (std::size_t{1} << (sub_bits - removed_)) - 1;
    for (int g = 0; g < groups; ++g) {
      const std::size_t sg = (s >> (sub_bits * (groups - 1 - g))) &
                             ((std::size_t{1} << sub_bits) - 1);
      const std::size_t bit = (b >> (groups - 1 - g)) & 1u;
      const std::size_t high = sg & ~low_mask;
      const std::size_t low = sg & low_mask;
      const std::size_t fg = (high << 1) | (bit << (sub_bits - removed_)) | low;
      f = (f << m_) | fg;
    }
    return f;
  }

 private:
  const MatchingProjector* base_;
  int m_, k_, removed_;
  std::size_t full_dim_ = 0, sub_dim_ = 0, blocks_ = 0;
};

/// Thm kappa's generating-function identity, in exact rationals:
///   sum_M <Phi_M | Phi_{M0}> = (1 + 2/D)(1 + 4/D)...(1 + (2k-2)/D),
/// and the kappa bound sum <= 1 + (10/9) k^2 / D whenever 9 k^2 <= D.
inline CheckReport check_kappa_gram(int D, int k) {
  verify_detail::Stopwatch sw;
  CheckReport r;
  r.name = "kappa_gram";
  r.parameters = {{"D", D}, {"k", k}};
  const auto matchings = enumerate_matchings(k, /*bipartite=*/false);
  const Matching m0 = identity_matching(k);
  Rational sum(0);
  for (const auto& m : matchings) sum += matching_gram(m, m0, D);
  Rational product(1);
  for (int i = 1; i < k; ++i) product *= Rational(BigInt(D + 2 * i), BigInt(D));
  const bool identity_holds = (sum == product);

  bool kappa_holds = true;
  const bool kappa_applicable = 9 * k * k <= D;
  const Rational kappa_bound = Rational(1) + Rational(BigInt(10 * k * k), BigInt(9 * D));
  if (kappa_applicable) kappa_holds = (sum <= kappa_bound);

  r.measured = to_double(sum);
  r.paper_bound = to_double(kappa_bound);
  r.tolerance = 0.0;  // exact arithmetic
  r.pass = identity_holds && kappa_holds;
  r.details = {{"matchings", matchings.size()},
               {"identity_exact", identity_holds},
               {"kappa_applicable", kappa_applicable},
               {"product", to_double(product)}};
  r.runtime_ms = sw.ms();
  return r;
}

/// Prop reptheory: Monte-Carlo reconstruction of
///   S0 = E_g[(g (x) g) S (g (x) g)^dagger],  S = SWAP_{K,K'} (x) Id_{m,m'},
/// against c2 Q2 + c3 Q3 + c4 Q4 (SO) or c3' Q3 + c4' Q4 (SU), D = 2^{m-1}.
inline CheckReport check_reptheory_coeffs(GroupTag group, int m, std::size_t trials,
                                          std::uint64_t seed) {
  if (m != 4 && m != 5) throw PreconditionError("check_reptheory_coeffs: m must be 4 or 5");
  if (!is_special_group(group))
    throw PreconditionError("check_reptheory_coeffs: group must be SO or SU");
  verify_detail::Stopwatch sw;
  CheckReport r;
  r.name = "reptheory_coeffs";
  r.parameters = {{"group", group_name(group)}, {"m", m}, {"trials", trials}, {"seed", seed}};

  const std::size_t D = std::size_t{1} << (m - 1);
  const std::size_t dim = D * D;
  const double dD = static_cast<double>(D);

  // S swaps the K-qubit blocks of the two copies and fixes the m qubits:
  // with x = (x',a), y = (y',b), S|x,y> = |(y',a),(x',b)>.
  std::vector<std::size_t> sigma(dim);
  for (std::size_t x = 0; x < D; ++x)
    for (std::size_t y = 0; y < D; ++y) {
      const std::size_t xp = x >> 1, a = x & 1, yp = y >> 1, b = y & 1;
      sigma[x * D + y] = ((yp << 1) | a) * D + ((xp << 1) | b);
    }

  Rng rng(seed);
  ComplexMatrix mean(dim, dim);
  std::vector<Complex> col(D * D);
  ComplexMatrix x_mat(dim, dim), t_mat(dim, dim);
  for (std::size_t t = 0; t < trials; ++t) {
    const ComplexMatrix g = haar_sample(group, D, rng);
    const ComplexMatrix gadj = g.adjoint();
    // X = S (g^dagger (x) g^dagger): a row permutation of the Kronecker
    // square; (S B)(i,:) = B(sigma^{-1}(i),:), and sigma is an involution.
    const ComplexMatrix b_mat = tensor(gadj, gadj);
    for (std::size_t i = 0; i < dim; ++i) {
      const std::size_t src = sigma[i];
      for (std::size_t j = 0; j < dim; ++j) x_mat(i, j) = b_mat(src, j);
    }
    // W = (g (x) g) X, applied one Kronecker factor at a time.
    for (std::size_t cidx = 0; cidx < dim; ++cidx) {
      // T[(a,d)] = sum_c g(a,c) X[(c,d), cidx]
      for (std::size_t aa = 0; aa < D; ++aa)
        for (std::size_t d = 0; d < D; ++d) {
          Complex acc = 0.0;
          for (std::size_t cc = 0; cc < D; ++cc) acc += g(aa, cc) * x_mat(cc * D + d, cidx);
          t_mat(aa * D + d, cidx) = acc;
        }
      for (std::size_t aa = 0; aa < D; ++aa)
        for (std::size_t bb = 0; bb < D; ++bb) {
          Complex acc = 0.0;
          for (std::size_t d = 0; d < D; ++d) acc += g(bb, d) * t_mat(aa * D + d, cidx);
          col[aa * D + bb] = acc;
        }
      for (std::size_t i = 0; i < dim; ++i) mean(i, cidx) += col[i];
    }
  }
  mean *= Complex(1.0 / static_cast<double>(trials), 0.0);

  // Targets.
  ComplexMatrix target(dim, dim);
  const double c3p = (1.5 * dD) / ((dD - 1.0) * (dD + 1.0));
  const double c4p = (0.5 * dD * dD - 2.0) / ((dD - 1.0) * (dD + 1.0));
  const double c2 = (0.5 * dD - 1.0) / ((dD - 1.0) * (dD + 2.0));
  const double c3 = (1.5 * dD + 1.0) / ((dD - 1.0) * (dD + 2.0));
  const double c4 = ((0.5 * dD - 1.0) * (dD + 3.0)) / ((dD - 1.0) * (dD + 2.0));
  const bool so = group == GroupTag::SO;
  const double w2 = so ? c2 : 0.0;
  const double w3 = so ? c3 : c3p;
  const double w4 = so ? c4 : c4p;
  // Q2 = D |Phi><Phi|: entries 1/D ... scaled by D -> (x==y)(u==v) pattern.
  for (std::size_t x = 0; x < D; ++x)
    for (std::size_t u = 0; u < D; ++u)
      target(x * D + x, u * D + u) += w2;
  for (std::size_t i = 0; i < dim; ++i) target(i, i) += w3;  // Q3 = Id
  for (std::size_t x = 0; x < D; ++x)
    for (std::size_t y = 0; y < D; ++y)
      target(x * D + y, y * D + x) += w4;  // Q4 = SWAP

  const double err = matrix_norm(mean - target, NormKind::Frobenius) /
                     matrix_norm(target, NormKind::Frobenius);
  r.measured = err;
  r.tolerance = std::max(0.02, 5.0 / std::sqrt(static_cast<double>(trials)));
  r.paper_bound = r.tolerance;
  r.pass = err <= r.tolerance;
  r.details = {{"c2", w2}, {"c3", w3}, {"c4", w4}};
  r.runtime_ms = sw.ms();
  return r;
}

/// Samples a unit-Frobenius element of the Lie algebra: skew-symmetric real
/// for SO, traceless skew-Hermitian for SU.
inline ComplexMatrix random_algebra_element(GroupTag group, std::size_t dim, Rng& rng) {
  ComplexMatrix a(dim, dim);
  const bool real = is_real_group(group);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const double re = rng.next_gaussian();
      a(i, j) = real ? Complex(re, 0.0) : Complex(re, rng.next_gaussian());
    }
  ComplexMatrix skew = a - a.adjoint();
  skew *= Complex(0.5, 0.0);
  if (!real) {
    const Complex tr = skew.trace() / Complex(static_cast<double>(dim), 0.0);
    for (std::size_t i = 0; i < dim; ++i) skew(i, i) -= tr;
  }
  const double norm = matrix_norm(skew, NormKind::Frobenius);
  if (norm > 0.0) skew *= Complex(1.0 / norm, 0.0);
  return skew;
}

/// Lem yummy2: with delta = 2^{2-m} and A a unit-Frobenius algebra element,
///   E_g || tr_m ((Id (x) g) A (Id (x) g)^dagger) ||_F^2 >= (1-delta)/(2-delta).
/// Monte-Carlo with a 3-sigma band on the sample mean.
inline CheckReport check_trace_lemma(GroupTag group, int m, std::size_t trials,
                                     std::uint64_t seed) {
  if (m < 4) throw PreconditionError("check_trace_lemma: need m >= 4");
  if (!is_special_group(group))
    throw PreconditionError("check_trace_lemma: group must be SO or SU");
  verify_detail::Stopwatch sw;
  CheckReport r;
  r.name = "trace_lemma";
  r.parameters = {{"group", group_name(group)}, {"m", m}, {"trials", trials}, {"seed", seed}};

  const std::size_t dim = std::size_t{1} << m;
  const std::size_t sub = dim >> 1;
  Rng rng(seed);
  const ComplexMatrix a = random_algebra_element(group, dim, rng);
  const ComplexMatrix id2 = ComplexMatrix::identity(2);

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const ComplexMatrix g = haar_sample(group, sub, rng);
    const ComplexMatrix u = tensor(id2, g);
    const ComplexMatrix conj = u * a * u.adjoint();
    const ComplexMatrix traced = partial_trace(conj, m, m - 1);
    const double v = matrix_norm(traced, NormKind::Frobenius);
    const double v2 = v * v;
    sum += v2;
    sum_sq += v2 * v2;
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  const double stderr_mean = std::sqrt(var / n);

  const double delta = std::pow(2.0, 2.0 - static_cast<double>(m));
  const double bound = (1.0 - delta) / (2.0 - delta);
  r.measured = mean;
  r.paper_bound = bound;
  r.tolerance = 3.0 * stderr_mean;
  r.pass = mean >= bound - 3.0 * stderr_mean;
  r.details = {{"stderr", stderr_mean}, {"delta", delta}};
  r.runtime_ms = sw.ms();
  return r;
}

/// Lem projs / Cor projs property suite: for random m-tuples of orthogonal
/// projections with measured pairwise eps = max ||P_i P_j||,
///   || avg P_i || <= 1/m + min(sqrt(eps), m eps) + 1e-9,
/// including the variant with a common sub-projector subtracted.
inline CheckReport check_projector_lemma(int instances, std::uint64_t seed) {
  verify_detail::Stopwatch sw;
  CheckReport r;
  r.name = "projector_lemma";
  r.parameters = {{"instances", instances}, {"seed", seed}};
  Rng rng(seed);
  int failures = 0;
  double max_slack = -1.0;

  for (int inst = 0; inst < instances; ++inst) {
    const int m = 2 + static_cast<int>(rng.next_below(5));  // 2..6
    const std::size_t dim = 16 + 8 * rng.next_below(7);     // 16..64
    const bool with_common = (inst % 2) == 1;
    const std::size_t common_rank = with_common ? 1 + rng.next_below(2) : 0;
    // Ranks: common block plus a private block per projector, all fitting.
    const std::size_t private_rank =
        1 + rng.next_below((dim - common_rank) / static_cast<std::size_t>(m));

    const ComplexMatrix frame = haar_sample(GroupTag::U, dim, rng);
    const double eta = 0.25 * rng.next_double();

    // Common subspace basis: first common_rank frame columns.
    std::vector<ComplexMatrix> projs;
    ComplexMatrix common_proj(dim, dim);
    for (std::size_t c = 0; c < common_rank; ++c)
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          common_proj(i, j) += frame(i, c) * std::conj(frame(j, c));

    for (int p = 0; p < m; ++p) {
      // Perturb this projector's private columns, then orthonormalize
      // against the (exact) common block so Img P >= common subspace.
      Eigen::MatrixXcd cols(dim, common_rank + private_rank);
      for (std::size_t c = 0; c < common_rank; ++c)
        for (std::size_t i = 0; i < dim; ++i) cols(i, c) = frame(i, c);
      for (std::size_t c = 0; c < private_rank; ++c) {
        const std::size_t src = common_rank + p * private_rank + c;
        for (std::size_t i = 0; i < dim; ++i) {
          const Complex noise(eta * rng.next_gaussian(), eta * rng.next_gaussian());
          cols(i, common_rank + c) = frame(i, src) + noise;
        }
      }
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(cols);
      Eigen::MatrixXcd q = qr.householderQ() *
                           Eigen::MatrixXcd::Identity(dim, common_rank + private_rank);
      ComplexMatrix proj(dim, dim);
      proj.map() = q * q.adjoint();
      projs.push_back(std::move(proj));
    }

    auto run_case = [&](const std::vector<ComplexMatrix>& ps) {
      double eps = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          eps = std::max(eps, matrix_norm(ps[i] * ps[j], NormKind::Operator));
      ComplexMatrix avg(dim, dim);
      for (const auto& p : ps) avg += p;
      avg *= Complex(1.0 / m, 0.0);
      const double lhs = matrix_norm(avg, NormKind::Operator);
      const double bound = 1.0 / m + std::min(std::sqrt(eps), m * eps);
      max_slack = std::max(max_slack, lhs - bound);
      if (lhs > bound + 1e-9) ++failures;
    };

    run_case(projs);
    if (with_common) {
      std::vector<ComplexMatrix> tilde;
      for (const auto& p : projs) tilde.push_back(p - common_proj);
      run_case(tilde);
    }
  }

  r.measured = max_slack;
  r.paper_bound = 0.0;
  r.tolerance = 1e-9;
  r.pass = failures == 0;
  r.details = {{"failures", failures}};
  r.runtime_ms = sw.ms();
  return r;
}

/// Tau-bound envelope: || avg_i {Pi_{[m]\i} (x) Id_i} - Pi^{(m)} || against
/// the small-m bound .96 (m >= 4, all k) and the large-m bound
/// 1/m + sqrt(10) k m / 2^{m/2} when its hypothesis applies.  Also verifies
/// the image containment (P_i - Id) Pi^{(m)} = 0.
inline CheckReport check_tau_bounds(GroupTag group, int m, int k) {
  if (!is_special_group(group))
    throw PreconditionError("check_tau_bounds: group must be SO or SU");
  verify_detail::Stopwatch sw;
  CheckReport r;
  r.name = "tau_bounds";
  r.parameters = {{"group", group_name(group)}, {"m", m}, {"k", k}};

  const std::size_t big_dim = std::size_t{1} << (2 * k * m);
  const MatchingProjector top(group, std::size_t{1} << m, k);
  const MatchingProjector sub(group, std::size_t{1} << (m - 1), k);
  std::vector<FactorEmbeddedProjector> embedded;
  embedded.reserve(m);
  for (int i = 0; i < m; ++i) embedded.emplace_back(&sub, m, k, i);

  // Image containment: P_i fixes every top matching state.
  double containment = 0.0;
  for (std::size_t mi = 0; mi < top.rank(); ++mi) {
    std::vector<Complex> phi = phi_state(top.matchings()[mi], std::size_t{1} << m);
    std::vector<Complex> out(big_dim);
    for (const auto& p : embedded) {
      p.apply(std::span<const Complex>(phi), std::span<Complex>(out));
      double diff = 0.0;
      for (std::size_t i = 0; i < big_dim; ++i) diff += std::norm(out[i] - phi[i]);
      containment = std::max(containment, std::sqrt(diff));
    }
  }

  auto op = [&](std::span<const Complex> in, std::span<Complex> out) {
    std::vector<Complex> tmp(big_dim);
    std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
    for (const auto& p : embedded) {
      p.apply(in, std::span<Complex>(tmp));
      for (std::size_t i = 0; i < big_dim; ++i) out[i] += tmp[i];
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < big_dim; ++i) out[i] *= inv_m;
    top.apply(in, std::span<Complex>(tmp));
    for (std::size_t i = 0; i < big_dim; ++i) out[i] -= tmp[i];
  };
  const double measured = verify_detail::hermitian_operator_norm(big_dim, op);

  const double large_m_bound =
      1.0 / m + std::sqrt(10.0) * k * m / std::pow(2.0, 0.5 * m);
  const bool large_m_applicable =
      k <= std::pow(2.0, 0.5 * m) / (std::sqrt(10.0) * m * m);
  double bound = 0.96;  // small-m, m >= 4, all k
  if (large_m_applicable) bound = std::min(bound, large_m_bound);

  r.measured = measured;
  r.paper_bound = bound;
  r.tolerance = 1e-9;
  r.pass = measured <= bound + 1e-9 && containment <= 1e-9;
  r.details = {{"large_m_bound", large_m_bound},
               {"large_m_applicable", large_m_applicable},
               {"containment_residual", containment}};
  r.runtime_ms = sw.ms();
  return r;
}

/// Spectral gap of the simple-3-bit-permutation multiset under W^k against
/// the uniform-S_N moment; the gap is strictly below 1.
inline CheckReport check_perm_gap(int n, int k) {
  verify_detail::Stopwatch sw;
  CheckReport r;
  r.name = "perm_gap";
  r.parameters = {{"n", n}, {"k", k}};
  const std::size_t N = std::size_t{1} << n;
  const auto perms = simple_3bit_perms(n);
  const ComplexMatrix moment = wk_moment(perms, N, k);
  const ComplexMatrix uniform = wk_moment_uniform(N, k);
  const double gap = matrix_norm(moment - uniform, NormKind::Operator);
  r.measured = gap;
  r.paper_bound = 1.0;
  r.tolerance = 0.0;
  r.pass = gap < 1.0;
  r.details = {{"multiset_size", perms.size()},
               {"tuple_space", moment.rows()}};
  r.runtime_ms = sw.ms();
  return r;
}

/// Human-readable one-line rendering for table output.
inline std::string check_report_line(const CheckReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-18s %-6s measured=%-12.6g bound=%-12.6g tol=%-10.3g %6.0fms",
                r.name.c_str(), r.pass ? "PASS" : "FAIL", r.measured, r.paper_bound,
                r.tolerance, r.runtime_ms);
  return buf;
}

}  // namespace designforge
