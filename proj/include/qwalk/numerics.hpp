#pragma once

// Dense complex linear algebra used by every other part of the library.
//
// ComplexMatrix is a plain row-major value type. Eigenproblems and the
// singular values behind trace_norm are delegated to Eigen through
// zero-copy maps; everything else is written out directly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qwalk/error.hpp"

namespace qwalk {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorCode::InvalidArgument,
                  "entry count " + std::to_string(data_.size()) + " != " +
                      std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    if (!is_finite()) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entry");
  }

  /// Row-by-row literal, e.g. {{1, 0}, {0, 1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(ErrorCode::InvalidArgument, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    if (!is_finite()) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entry");
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const cplx> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static ComplexMatrix diagonal(std::initializer_list<cplx> d) {
    return diagonal(std::span<const cplx>(d.begin(), d.size()));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  bool is_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  cplx trace() const {
    require_square("trace");
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o, "+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o, "-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) noexcept {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorCode::InvalidArgument, "matmul shape mismatch");
    ComplexMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{0.0, 0.0}) continue;
        const cplx* brow = &b.data_[k * b.cols_];
        cplx* crow = &c.data_[i * c.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
      }
    }
    return c;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  void require_square(const char* what) const {
    if (!is_square()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs a square matrix");
  }
  void require_same_shape(const ComplexMatrix& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

struct HermitianEigenResult {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns
};

namespace detail {

using EigenRowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const EigenRowMajor> as_eigen(const ComplexMatrix& a) {
  return {a.data().data(), static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols())};
}

inline void require_square(const ComplexMatrix& a, const char* what) {
  if (!a.is_square()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs a square matrix");
}

}  // namespace detail

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

inline ComplexMatrix dagger(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline ComplexMatrix transpose(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

inline ComplexMatrix conjugate(const ComplexMatrix& a) {
  ComplexMatrix out = a;
  for (auto& z : out.data()) z = std::conj(z);
  return out;
}

inline double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const auto& z : a.data()) m = std::max(m, std::abs(z));
  return m;
}

/// Max-entry distance. Shapes must agree.
inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::InvalidArgument, "max_abs_diff shape mismatch");
  double m = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(da[i] - db[i]));
  return m;
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  return a.rows() == b.rows() && a.cols() == b.cols() && max_abs_diff(a, b) <= tol;
}

/// max |a - a^dagger| entrywise.
inline double hermiticity_defect(const ComplexMatrix& a) {
  detail::require_square(a, "hermiticity_defect");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

/// Frobenius inner product <a, b> = Tr(a^dagger b).
inline cplx frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::InvalidArgument, "frobenius_inner shape mismatch");
  cplx s{0.0, 0.0};
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) s += std::conj(da[i]) * db[i];
  return s;
}

inline double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

/// Column-stacking vectorization: vec(B)[j*rows + i] = B(i, j).
inline std::vector<cplx> vec(const ComplexMatrix& b) {
  std::vector<cplx> v(b.rows() * b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < b.rows(); ++i) v[j * b.rows() + i] = b(i, j);
  return v;
}

inline ComplexMatrix unvec(std::span<const cplx> v, std::size_t rows) {
  if (rows == 0 || v.size() % rows != 0) throw Error(ErrorCode::InvalidArgument, "unvec length mismatch");
  const std::size_t cols = v.size() / rows;
  ComplexMatrix b(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) b(i, j) = v[j * rows + i];
  return b;
}

inline std::vector<cplx> matvec(const ComplexMatrix& a, std::span<const cplx> v) {
  if (a.cols() != v.size()) throw Error(ErrorCode::InvalidArgument, "matvec shape mismatch");
  std::vector<cplx> out(a.rows(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

inline HermitianEigenResult hermitian_eig(const ComplexMatrix& a, double tol = 1e-10) {
  detail::require_square(a, "hermitian_eig");
  if (a.rows() == 0) return {};
  const double defect = hermiticity_defect(a);
  if (!(defect <= tol)) {
    throw Error(ErrorCode::NotHermitian, "max|a - a^dagger| = " + std::to_string(defect));
  }
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXcd m = detail::as_eigen(a);
  // Symmetrize so the solver sees an exactly Hermitian input.
  m = (0.5 * (m + m.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "Hermitian eigensolver");

  HermitianEigenResult out;
  out.eigenvalues.resize(a.rows());
  out.eigenvectors = ComplexMatrix(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    for (Eigen::Index j = 0; j < n; ++j)
      out.eigenvectors(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = solver.eigenvectors()(i, j);
  }
  return out;
}

/// Eigenvalues only; cheaper than hermitian_eig when vectors are not needed.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a, double tol = 1e-10) {
  detail::require_square(a, "hermitian_eigenvalues");
  if (a.rows() == 0) return {};
  const double defect = hermiticity_defect(a);
  if (!(defect <= tol)) {
    throw Error(ErrorCode::NotHermitian, "max|a - a^dagger| = " + std::to_string(defect));
  }
  Eigen::MatrixXcd m = detail::as_eigen(a);
  m = (0.5 * (m + m.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "Hermitian eigensolver");
  return {solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size()};
}

inline std::vector<cplx> general_eigenvalues(const ComplexMatrix& a) {
  detail::require_square(a, "general_eigenvalues");
  if (a.rows() == 0) return {};
  Eigen::MatrixXcd m = detail::as_eigen(a);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "complex Schur iteration");
  return {solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size()};
}

inline cplx determinant(const ComplexMatrix& a) {
  detail::require_square(a, "determinant");
  Eigen::MatrixXcd m = detail::as_eigen(a);
  return m.determinant();
}

/// Sum of singular values. Hermitian inputs take the eigenvalue route.
inline double trace_norm(const ComplexMatrix& a) {
  detail::require_square(a, "trace_norm");
  if (a.rows() == 0) return 0.0;
  const double scale = std::max(1.0, max_abs(a));
  if (hermiticity_defect(a) <= 1e-12 * scale) {
    double s = 0.0;
    for (double l : hermitian_eigenvalues(a, 1e-12 * scale)) s += std::abs(l);
    return s;
  }
  Eigen::MatrixXcd m = detail::as_eigen(a);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().sum();
}

}  // namespace qwalk
