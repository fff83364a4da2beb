#include <doctest.h>

#include "couplerlab/dense.hpp"
#include "couplerlab/errors.hpp"
#include "test_support.hpp"

using namespace couplerlab;

namespace {

// Gauss-Jordan with full pivoting, test-only reference.
CVector reference_solve(CMatrix a, CVector b) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = k, pc = k;
    for (std::size_t r = k; r < n; ++r)
      for (std::size_t c = k; c < n; ++c)
        if (std::abs(a(r, c)) > std::abs(a(pr, pc))) pr = r, pc = c;
    for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pr, c));
    std::swap(b[k], b[pr]);
    for (std::size_t r = 0; r < n; ++r) std::swap(a(r, k), a(r, pc));
    std::swap(col[k], col[pc]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k) continue;
      const Complex f = a(r, k) / a(k, k);
      for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
      b[r] -= f * b[k];
    }
  }
  CVector x(n);
  for (std::size_t k = 0; k < n; ++k) x[col[k]] = b[k] / a(k, k);
  return x;
}

}  // namespace

TEST_CASE("lu solve agrees with full-pivoting elimination on random systems") {
  testing::Rng rng(20240101);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.index(30);
    CMatrix a(n, n);
    CVector b(n);
    for (std::size_t r = 0; r < n; ++r) {
      b[r] = rng.complex(-1, 1, -1, 1);
      for (std::size_t c = 0; c < n; ++c) a(r, c) = rng.complex(-1, 1, -1, 1) * std::pow(10.0, rng.uniform(-3, 3));
    }
    const CVector x = LuDecomposition(a).solve(b);
    const CVector ref = reference_solve(a, b);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err = std::max(err, std::abs(x[i] - ref[i]));
      scale = std::max(scale, std::abs(ref[i]));
    }
    CHECK(err <= 1e-8 * scale);
  }
}

TEST_CASE("lu reports the unknown label of a singular column") {
  CMatrix a(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  // Row and column 2 empty.
  try {
    LuDecomposition lu(a, {"V(a)", "V(b)", "I(L1)"}, "test");
    FAIL("expected SingularSystemError");
  } catch (const SingularSystemError& e) {
    CHECK(e.unknown() == "I(L1)");
    CHECK(std::string(e.what()).find("test") != std::string::npos);
  }
}

TEST_CASE("lu detects rank deficiency after equilibration") {
  CMatrix a(2, 2);
  a(0, 0) = 1e6;
  a(0, 1) = 2e6;
  a(1, 0) = 1e-6;
  a(1, 1) = 2e-6;
  CHECK_THROWS_AS(LuDecomposition{a}, SingularSystemError);
}

TEST_CASE("determinant, inverse and products") {
  CMatrix a(2, 2);
  a(0, 0) = 2.0;
  a(0, 1) = Complex(0, 1);
  a(1, 0) = Complex(0, -1);
  a(1, 1) = 3.0;
  const LuDecomposition lu(a);
  CHECK(std::abs(lu.determinant() - Complex(5.0)) < 1e-14);
  const CMatrix id = a * inverse(a);
  CHECK(max_abs_diff(id, CMatrix::identity(2)) < 1e-15);
  CHECK(a.transpose()(0, 1) == Complex(0, -1));
  CMatrix blk(4, 4);
  blk.set_block(2, 2, a);
  CHECK(blk.block(2, 2, 2, 2) == a);
  CHECK_THROWS_AS(max_abs_diff(a, blk), InvalidInputError);
}

TEST_CASE("matrix-vector and scalar operators") {
  CMatrix a = CMatrix::identity(3);
  a(0, 2) = 2.0;
  const CVector x{1.0, 2.0, 3.0};
  const CVector y = a * std::span<const Complex>(x);
  CHECK(y[0] == Complex(7.0));
  CHECK(y[2] == Complex(3.0));
  const CMatrix s = Complex(2.0) * a;
  CHECK(s(0, 2) == Complex(4.0));
  CHECK((s - a)(0, 2) == Complex(2.0));
  CHECK(s.frobenius_norm() == doctest::Approx(std::sqrt(4.0 * 3 + 16.0)));
}
