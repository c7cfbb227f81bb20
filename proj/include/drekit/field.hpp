#ifndef DREKIT_FIELD_HPP
#define DREKIT_FIELD_HPP

#include "drekit/expr.hpp"
#include "drekit/zerotest.hpp"

#include <complex>
#include <vector>

namespace drekit {

/// Element of the complex function field: re + im*j with both parts in the
/// real field. im identically zero means the element is real.
class CExpr {
 public:
  CExpr() = default;  // zero
  CExpr(Expr re) : re_(std::move(re)) {}
  CExpr(Expr re, Expr im) : re_(std::move(re)), im_(std::move(im)) {}

  static CExpr from_rational(const Rational& r) { return CExpr(Expr::constant(r)); }
  static CExpr imaginary_unit() { return CExpr(Expr(), Expr::integer(1)); }
  static CExpr from_complex(const std::complex<double>& z);

  const Expr& re() const { return re_; }
  const Expr& im() const { return im_; }

  bool im_is_literal_zero() const { return im_.is_zero_literal(); }

  CExpr conj() const { return CExpr(re_, Expr::negate(im_)); }
  CExpr simplified() const { return CExpr(simplify(re_), simplify(im_)); }

  std::complex<double> eval_at(const EvalPoint& p) const {
    return {eval(re_, p), eval(im_, p)};
  }

  std::string str() const;

  friend CExpr operator+(const CExpr& a, const CExpr& b);
  friend CExpr operator-(const CExpr& a, const CExpr& b);
  friend CExpr operator*(const CExpr& a, const CExpr& b);
  /// Requires b nonzero in the field; throws on a literally zero divisor.
  friend CExpr operator/(const CExpr& a, const CExpr& b);
  CExpr operator-() const { return CExpr(Expr::negate(re_), Expr::negate(im_)); }

 private:
  Expr re_;
  Expr im_ = Expr();
};

ZeroCertificate test_zero(const CExpr& e, const ZeroTestPolicy& policy);

/// Dense matrix over the complex function field. Immutable dimensions.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(int rows, int cols);
  static CMatrix identity(int n);
  static CMatrix from_real(const std::vector<std::vector<Expr>>& entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  const CExpr& at(int r, int c) const { return entries_[idx(r, c)]; }
  CExpr& at(int r, int c) { return entries_[idx(r, c)]; }

  CMatrix transpose() const;
  CMatrix conj_transpose() const;
  CMatrix simplified() const;
  CMatrix scaled(const CExpr& s) const;
  CMatrix block(int r0, int c0, int nrows, int ncols) const;
  CMatrix col(int c) const { return block(0, c, rows_, 1); }

  bool all_entries_constant() const;

  friend CMatrix operator+(const CMatrix& a, const CMatrix& b);
  friend CMatrix operator-(const CMatrix& a, const CMatrix& b);
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  CMatrix operator-() const;

  std::string str() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<CExpr> entries_;

  std::size_t idx(int r, int c) const;
};

/// Stack [top; bottom] vertically / [left, right] horizontally.
CMatrix vstack(const CMatrix& top, const CMatrix& bottom);
CMatrix hstack(const CMatrix& left, const CMatrix& right);

/// Entrywise zero test over a whole matrix, merged into one certificate.
ZeroCertificate test_zero(const CMatrix& m, const ZeroTestPolicy& policy);

/// Symbolic Gauss-Jordan inverse. Pivots are chosen as the first row whose
/// candidate is decisively nonzero under the policy; entries are
/// canonicalized after each elimination step.
/// Throws Error("singular...") / Error("inconclusive...") accordingly.
CMatrix inverse(const CMatrix& a, const ZeroTestPolicy& policy);

/// Generic rank: the maximum numeric rank (SVD, relative threshold 1e-9)
/// over sampled finite evaluation points.
int rank_numeric(const CMatrix& a, const ZeroTestPolicy& policy);

/// Largest state-variable index appearing anywhere in the matrix.
int max_var_index(const CMatrix& a);

}  // namespace drekit

#endif
