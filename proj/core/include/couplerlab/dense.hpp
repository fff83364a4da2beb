#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace couplerlab {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

// Row-major dense complex matrix.  Sizes in this toolkit stay small (tens to a
// few hundred unknowns), so nothing more elaborate is needed.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols, Complex fill = Complex{});

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const Complex> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const CMatrix& src);

  CMatrix transpose() const;
  CVector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const Complex> values);

  double max_abs() const;
  double frobenius_norm() const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex s);

  bool operator==(const CMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(Complex s, CMatrix a);
CVector operator*(const CMatrix& a, std::span<const Complex> x);

// Largest elementwise |a - b|; throws on shape mismatch.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

// LU factorisation with row equilibration and partial pivoting.  A pivot whose
// magnitude (after equilibration) falls below `pivot_tolerance` marks the
// system as singular; the error names the unknown of the column concerned.
class LuDecomposition {
 public:
  static constexpr double kDefaultPivotTolerance = 1e-13;

  explicit LuDecomposition(CMatrix a, std::vector<std::string> unknown_labels = {},
                           std::string context = "linear solve",
                           double pivot_tolerance = kDefaultPivotTolerance);

  std::size_t size() const { return n_; }
  CVector solve(std::span<const Complex> b) const;
  CMatrix solve(const CMatrix& b) const;
  Complex determinant() const;
  // Smallest equilibrated pivot magnitude over the factorisation.
  double min_pivot() const { return min_pivot_; }

 private:
  std::size_t n_ = 0;
  CMatrix lu_;
  std::vector<std::size_t> perm_;
  std::vector<double> row_scale_;
  int perm_sign_ = 1;
  double min_pivot_ = 0.0;
};

CMatrix inverse(const CMatrix& a, const std::string& context = "matrix inverse");
CVector solve_dense(const CMatrix& a, std::span<const Complex> b);

}  // namespace couplerlab
