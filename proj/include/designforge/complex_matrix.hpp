#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "designforge/common.hpp"

namespace designforge {

/// Dense square-or-rectangular complex matrix, row-major storage.
///
/// This is the carrier for every operator in the library: group elements,
/// tensor-power representations, moment operators, projectors, adjacency
/// matrices.  Decompositions (QR, SVD, eigensolves) are delegated to Eigen
/// through zero-copy maps; everything the public surface promises is in
/// terms of this type.
class ComplexMatrix {
 public:
  using EigenMap = Eigen::Map<
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstEigenMap = Eigen::Map<
      const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(check_size(rows, cols)) {}

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
      throw DimensionError("entry count does not match rows*cols");
  }

  /// Row-major initializer, for small literal matrices in tests and gates.
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> init)
      : rows_(init.size()), cols_(init.begin() == init.end() ? 0 : init.begin()->size()) {
    entries_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw DimensionError("ragged initializer");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix zero(std::size_t rows, std::size_t cols) {
    return ComplexMatrix(rows, cols);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  const std::vector<Complex>& entries() const { return entries_; }
  std::vector<Complex>& entries() { return entries_; }

  EigenMap map() {
    return EigenMap(entries_.data(), static_cast<Eigen::Index>(rows_),
                    static_cast<Eigen::Index>(cols_));
  }
  ConstEigenMap map() const {
    return ConstEigenMap(entries_.data(), static_cast<Eigen::Index>(rows_),
                         static_cast<Eigen::Index>(cols_));
  }

  static ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
    ComplexMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    out.map() = m;
    return out;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  ComplexMatrix conjugate() const {
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = std::conj(entries_[i]);
    return out;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
  }

  ComplexMatrix& operator*=(Complex s) {
    for (auto& e : entries_) e *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matmul shape mismatch");
    ComplexMatrix out(a.rows_, b.cols_);
    out.map().noalias() = a.map() * b.map();
    return out;
  }

  Complex trace() const {
    if (!is_square()) throw DimensionError("trace of non-square matrix");
    Complex t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e));
    return m;
  }

  bool is_hermitian(double tol = 1e-12) const {
    if (!is_square()) return false;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = r; c < cols_; ++c)
        if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
    return true;
  }

 private:
  static std::size_t check_size(std::size_t rows, std::size_t cols) {
    const std::size_t n = rows * cols;
    if (rows != 0 && n / rows != cols) throw DimensionError("matrix size overflow");
    if (n > Caps::instance().dense_entries)
      throw DimensionError("matrix exceeds dense entry cap");
    return n;
  }

  void require_same_shape(const ComplexMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
      throw DimensionError("shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

/// Kronecker product, A-major block order: result block (i,j) is A(i,j)*B.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (a.rows() != 0 && rows / a.rows() != b.rows())
    throw DimensionError("tensor dimension overflow");
  if (rows * cols > Caps::instance().dense_entries)
    throw DimensionError("tensor exceeds dense entry cap");
  ComplexMatrix out(rows, cols);
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const Complex v = a(ar, ac);
      if (v == Complex{0.0, 0.0}) continue;
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = v * b(br, bc);
    }
  return out;
}

enum class NormKind { Operator, Frobenius, Schatten1 };

namespace detail {

inline double operator_norm_power_iteration(const ComplexMatrix& a) {
  // Power iteration on A^dagger A; the norm is the root of its top eigenvalue.
  const std::size_t n = a.cols();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
  // Deterministic start vector with irrational-phase spread so no structured
  // operator is orthogonal to it by accident.
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 0.7368062997 * static_cast<double>(i + 1);
    v(static_cast<Eigen::Index>(i)) = Complex(std::cos(t), std::sin(1.9128973 * t));
  }
  v.normalize();
  auto m = a.map();
  double lambda = 0.0;
  constexpr std::size_t kMaxIters = 100000;
  for (std::size_t it = 0; it < kMaxIters; ++it) {
    Eigen::VectorXcd w = m.adjoint() * (m * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = std::sqrt(std::abs((w.adjoint() * (m.adjoint() * (m * w)))(0, 0)));
    if (std::abs(next - lambda) <= 1e-8 * std::max(1.0, next)) return next;
    lambda = next;
    v.swap(w);
  }
  throw ConvergenceError("operator-norm power iteration did not converge; last iterate " +
                         std::to_string(lambda));
}

}  // namespace detail

/// Matrix norms.  Operator norm uses a dense SVD up to the dense threshold
/// and power iteration on A^dagger A beyond it.
inline double matrix_norm(const ComplexMatrix& a, NormKind kind) {
  switch (kind) {
    case NormKind::Frobenius: {
      double s = 0.0;
      for (const auto& e : a.entries()) s += std::norm(e);
      return std::sqrt(s);
    }
    case NormKind::Operator: {
      if (std::max(a.rows(), a.cols()) <= Caps::instance().dense_eig_dim) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a.map());
        return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
      }
      return detail::operator_norm_power_iteration(a);
    }
    case NormKind::Schatten1: {
      if (std::max(a.rows(), a.cols()) > Caps::instance().dense_eig_dim)
        throw SizeCapError("Schatten-1 norm requires dense SVD");
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a.map());
      return svd.singularValues().sum();
    }
  }
  throw PreconditionError("unknown norm kind");
}

/// Partial trace over one qubit of a 2^q x 2^q operator.  Qubits are
/// 0-indexed with qubit 0 the most significant bit of the basis index.
inline ComplexMatrix partial_trace(const ComplexMatrix& a, int qubit_count, int traced_qubit) {
  const std::size_t dim = std::size_t{1} << qubit_count;
  if (a.rows() != dim || a.cols() != dim)
    throw DimensionError("partial_trace: matrix is not 2^q x 2^q");
  if (traced_qubit < 0 || traced_qubit >= qubit_count)
    throw PreconditionError("partial_trace: qubit index out of range");
  const int shift = qubit_count - 1 - traced_qubit;
  const std::size_t bit = std::size_t{1} << shift;
  const std::size_t lo_mask = bit - 1;
  const std::size_t out_dim = dim >> 1;
  ComplexMatrix out(out_dim, out_dim);
  for (std::size_t r = 0; r < out_dim; ++r) {
    const std::size_t r_base = ((r & ~lo_mask) << 1) | (r & lo_mask);
    for (std::size_t c = 0; c < out_dim; ++c) {
      const std::size_t c_base = ((c & ~lo_mask) << 1) | (c & lo_mask);
      out(r, c) = a(r_base, c_base) + a(r_base | bit, c_base | bit);
    }
  }
  return out;
}

/// vec(X): stacks rows, |i><j| -> |ij>, so vec lives in C^rows (x) C^cols.
inline std::vector<Complex> vec(const ComplexMatrix& a) {
  return a.entries();
}

inline ComplexMatrix unvec(const std::vector<Complex>& v, std::size_t rows, std::size_t cols) {
  return ComplexMatrix(rows, cols, v);
}

}  // namespace designforge
