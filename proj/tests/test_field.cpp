#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "drekit/field.hpp"
#include "support.hpp"

using namespace drekit;
using drekit::testing::ExprGen;

namespace {

const ZeroTestPolicy kPolicy;

CExpr C(const std::string& s, int n = 2) {
  auto at = s.find('@');
  if (at == std::string::npos) return CExpr(parse(s, n));
  return CExpr(parse(s.substr(0, at), n), parse(s.substr(at + 1), n));
}

CMatrix M(const std::vector<std::vector<std::string>>& rows, int n = 2) {
  CMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      m.at(r, c) = C(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], n);
  return m;
}

CMatrix random_rational_matrix(ExprGen& gen, int rows, int cols, int depth = 2) {
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.at(r, c) = CExpr(gen(depth));
  return m;
}

}  // namespace

TEST_CASE("complex scalar arithmetic") {
  // j * j = -1
  CExpr j = CExpr::imaginary_unit();
  CExpr jj = j * j;
  CHECK(test_zero(jj + CExpr(Expr::integer(1)), kPolicy).is_zero());

  // conj(x1 + x2 j) = x1 - x2 j
  CExpr z = C("x1 @ x2");
  CExpr w = z.conj();
  CHECK(test_zero(w - C("x1 @ -x2"), kPolicy).is_zero());

  // 1 / (1 + x1^2) round trips through division.
  CExpr u = CExpr(Expr::integer(1)) / C("1 + x1^2");
  CHECK(test_zero(u - C("1/(1+x1^2)"), kPolicy).is_zero());

  CHECK_THROWS_AS(z / CExpr(), Error);
}

TEST_CASE("complex division by conjugate pair") {
  CExpr a = C("1 + x1 @ x2");
  CExpr b = C("x1 @ 1");
  CExpr q = a / b;
  CHECK(test_zero(q * b - a, kPolicy).is_zero());
}

TEST_CASE("matrix product and identities") {
  CMatrix m = M({{"x1", "1 @ 1"}, {"0", "x2"}});
  CMatrix i2 = CMatrix::identity(2);
  CHECK(test_zero(i2 * m - m, kPolicy).is_zero());
  CHECK(test_zero(m.conj_transpose().conj_transpose() - m, kPolicy).is_zero());
  CHECK_THROWS_AS(m * CMatrix(3, 3), Error);
}

TEST_CASE("transpose and adjoint anti-homomorphism") {
  ExprGen gen(51, 2);
  for (int trial = 0; trial < 8; ++trial) {
    int sz = trial % 2 ? 2 : 3;
    CMatrix a = random_rational_matrix(gen, sz, sz);
    CMatrix b = random_rational_matrix(gen, sz, sz);
    CHECK(test_zero((a * b).transpose() - b.transpose() * a.transpose(), kPolicy)
              .is_zero());
    CHECK(test_zero((a * b).conj_transpose() - b.conj_transpose() * a.conj_transpose(),
                    kPolicy)
              .is_zero());
  }
}

TEST_CASE("inverse of identity and scalar matrices") {
  CHECK(test_zero(inverse(CMatrix::identity(2), kPolicy) - CMatrix::identity(2), kPolicy)
            .is_zero());

  CMatrix s = M({{"1/(1+x1^2)"}});
  CMatrix sinv = inverse(s, kPolicy);
  CHECK(to_string(simplify(sinv.at(0, 0).re())) == "x1^2 + 1");

  CMatrix d = M({{"2", "0"}, {"0", "1/2"}});
  CMatrix dinv = inverse(d, kPolicy);
  CHECK(test_zero(d * dinv - CMatrix::identity(2), kPolicy).is_zero());
  CHECK(dinv.at(0, 0).re().constant_value() == Rational(1, 2));
  CHECK(dinv.at(1, 1).re().constant_value() == 2);
}

TEST_CASE("inverse round trip on random regular matrices") {
  ExprGen gen(52, 2);
  int done = 0;
  for (int trial = 0; trial < 20 && done < 6; ++trial) {
    CMatrix a = random_rational_matrix(gen, 2, 2);
    try {
      CMatrix ainv = inverse(a, kPolicy);
      CHECK(test_zero(a * ainv - CMatrix::identity(2), kPolicy).is_zero());
      CHECK(test_zero(ainv * a - CMatrix::identity(2), kPolicy).is_zero());
      ++done;
    } catch (const Error&) {
      // singular draw; try another
    }
  }
  CHECK(done == 6);
}

TEST_CASE("inverse reports singular matrices") {
  CMatrix s = M({{"x1", "x1"}, {"x2", "x2"}});
  CHECK_THROWS_WITH_AS(inverse(s, kPolicy), doctest::Contains("singular"), Error);
}

TEST_CASE("numeric rank") {
  CMatrix r1 = M({{"x1", "x2"}, {"2*x1", "2*x2"}});
  CHECK(rank_numeric(r1, kPolicy) == 1);

  // Column from the circuit example: nonzero column has rank 1.
  CMatrix col = M({{"1/(1+x1^2)"}, {"-1"}, {"1+x1^2"}, {"0"}});
  CHECK(rank_numeric(col, kPolicy) == 1);

  // Completion with a standard basis vector is regular.
  CMatrix u = M({{"1/(1+x1^2)", "1"}, {"-1", "0"}});
  CHECK(rank_numeric(u, kPolicy) == 2);
}

TEST_CASE("rank is transpose invariant and regular-factor invariant") {
  ExprGen gen(53, 2);
  for (int trial = 0; trial < 6; ++trial) {
    CMatrix a = random_rational_matrix(gen, 2, 3);
    CHECK(rank_numeric(a, kPolicy) == rank_numeric(a.transpose(), kPolicy));
  }
  CMatrix t = M({{"1", "x1"}, {"0", "1"}});  // unit determinant
  for (int trial = 0; trial < 6; ++trial) {
    CMatrix a = random_rational_matrix(gen, 2, 2);
    CHECK(rank_numeric(a * t, kPolicy) == rank_numeric(a, kPolicy));
  }
}

TEST_CASE("stacking helpers") {
  CMatrix a = CMatrix::identity(2);
  CMatrix s = vstack(a, a);
  CHECK(s.rows() == 4);
  CHECK(rank_numeric(s, kPolicy) == 2);
  CMatrix h = hstack(a, a);
  CHECK(h.cols() == 4);
}
