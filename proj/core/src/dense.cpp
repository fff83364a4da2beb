#include "couplerlab/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "couplerlab/errors.hpp"

namespace couplerlab {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, Complex fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> values) {
  CMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw InvalidInputError("CMatrix::block out of range");
  CMatrix out(nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) out(r, c) = (*this)(r0 + r, c0 + c);
  return out;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& src) {
  if (r0 + src.rows() > rows_ || c0 + src.cols() > cols_)
    throw InvalidInputError("CMatrix::set_block out of range");
  for (std::size_t r = 0; r < src.rows(); ++r)
    for (std::size_t c = 0; c < src.cols(); ++c) (*this)(r0 + r, c0 + c) = src(r, c);
}

CMatrix CMatrix::transpose() const {
  CMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

CVector CMatrix::column(std::size_t c) const {
  CVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void CMatrix::set_column(std::size_t c, std::span<const Complex> values) {
  if (values.size() != rows_) throw InvalidInputError("CMatrix::set_column size mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidInputError("CMatrix += shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidInputError("CMatrix -= shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInputError("CMatrix product shape mismatch");
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

CVector operator*(const CMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) throw InvalidInputError("CMatrix-vector product shape mismatch");
  CVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s{};
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    out[i] = s;
  }
  return out;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidInputError("max_abs_diff shape mismatch");
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

LuDecomposition::LuDecomposition(CMatrix a, std::vector<std::string> unknown_labels, std::string context,
                                 double pivot_tolerance)
    : n_(a.rows()), lu_(std::move(a)), perm_(n_), row_scale_(n_, 1.0) {
  if (lu_.rows() != lu_.cols()) throw InvalidInputError(context + ": matrix is not square");
  auto label_of = [&](std::size_t k) {
    return k < unknown_labels.size() ? unknown_labels[k] : "x" + std::to_string(k);
  };

  for (std::size_t i = 0; i < n_; ++i) {
    perm_[i] = i;
    double m = 0.0;
    for (std::size_t j = 0; j < n_; ++j) m = std::max(m, std::abs(lu_(i, j)));
    if (m == 0.0) {
      // An all-zero row: report the unknown sharing its index, the best we can do.
      throw SingularSystemError(label_of(i), 0.0, context);
    }
    row_scale_[i] = 1.0 / m;
    for (std::size_t j = 0; j < n_; ++j) lu_(i, j) *= row_scale_[i];
  }

  min_pivot_ = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    min_pivot_ = std::min(min_pivot_, best);
    if (!(best > pivot_tolerance)) throw SingularSystemError(label_of(k), best, context);
    if (p != k) {
      for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(perm_[k], perm_[p]);
      perm_sign_ = -perm_sign_;
    }
    const Complex pivot = lu_(k, k);
    for (std::size_t i = k + 1; i < n_; ++i) {
      const Complex f = lu_(i, k) / pivot;
      lu_(i, k) = f;
      if (f == Complex{}) continue;
      for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
  if (n_ == 0) min_pivot_ = 0.0;
}

CVector LuDecomposition::solve(std::span<const Complex> b) const {
  if (b.size() != n_) throw InvalidInputError("LuDecomposition::solve size mismatch");
  CVector x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]] * row_scale_[perm_[i]];
  for (std::size_t i = 0; i < n_; ++i) {
    Complex s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n_; i-- > 0;) {
    Complex s = x[i];
    for (std::size_t j = i + 1; j < n_; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

CMatrix LuDecomposition::solve(const CMatrix& b) const {
  if (b.rows() != n_) throw InvalidInputError("LuDecomposition::solve size mismatch");
  CMatrix x(n_, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) x.set_column(c, solve(b.column(c)));
  return x;
}

Complex LuDecomposition::determinant() const {
  Complex d = static_cast<double>(perm_sign_);
  for (std::size_t i = 0; i < n_; ++i) d *= lu_(i, i) / row_scale_[i];
  return d;
}

CMatrix inverse(const CMatrix& a, const std::string& context) {
  LuDecomposition lu(a, {}, context);
  return lu.solve(CMatrix::identity(a.rows()));
}

CVector solve_dense(const CMatrix& a, std::span<const Complex> b) {
  return LuDecomposition(a).solve(b);
}

}  // namespace couplerlab
