#include "drekit/field.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <random>
#include <sstream>

namespace drekit {

namespace {

// Exact binary expansion: every finite double is a rational p / 2^k.
Rational rational_from_double(double d) {
  if (!std::isfinite(d)) throw Error("cannot convert non-finite double to rational");
  if (d == 0.0) return Rational(0);
  int exp = 0;
  double fr = std::frexp(d, &exp);  // d = fr * 2^exp, |fr| in [0.5, 1)
  long long mant = std::llround(std::ldexp(fr, 53));
  int shift = exp - 53;
  Rational r(mant);
  if (shift >= 0) {
    r *= Rational(BigInt(1) << shift);
  } else {
    r /= Rational(BigInt(1) << -shift);
  }
  return r;
}

}  // namespace

CExpr CExpr::from_complex(const std::complex<double>& z) {
  return CExpr(Expr::constant(rational_from_double(z.real())),
               Expr::constant(rational_from_double(z.imag())));
}

CExpr operator+(const CExpr& a, const CExpr& b) {
  return CExpr(a.re_ + b.re_, a.im_ + b.im_);
}

CExpr operator-(const CExpr& a, const CExpr& b) {
  return CExpr(a.re_ - b.re_, a.im_ - b.im_);
}

CExpr operator*(const CExpr& a, const CExpr& b) {
  if (a.im_is_literal_zero() && b.im_is_literal_zero())
    return CExpr(a.re_ * b.re_);
  return CExpr(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
}

CExpr operator/(const CExpr& a, const CExpr& b) {
  if (b.re_.is_zero_literal() && b.im_.is_zero_literal())
    throw Error("division by the zero field element");
  if (b.im_is_literal_zero()) {
    return CExpr(Expr::quotient(a.re_, b.re_), Expr::quotient(a.im_, b.re_));
  }
  // (a re + a im j)(b re - b im j) / (b re^2 + b im^2)
  Expr den = Expr::power(b.re_, 2) + Expr::power(b.im_, 2);
  CExpr num = a * b.conj();
  return CExpr(Expr::quotient(num.re_, den), Expr::quotient(num.im_, den));
}

std::string CExpr::str() const {
  if (im_is_literal_zero()) return to_string(re_);
  return to_string(re_) + " @ " + to_string(im_);
}

ZeroCertificate test_zero(const CExpr& e, const ZeroTestPolicy& policy) {
  ZeroCertificate re = test_zero(e.re(), policy);
  if (e.im_is_literal_zero()) return re;
  return merge_certificates(re, test_zero(e.im(), policy));
}

// ---------------------------------------------------------------------------

std::size_t CMatrix::idx(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw Error("matrix index out of range");
  return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
         static_cast<std::size_t>(c);
}

CMatrix::CMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw Error("matrix dimensions must be positive");
  entries_.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
}

CMatrix CMatrix::identity(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = CExpr(Expr::integer(1));
  return m;
}

CMatrix CMatrix::from_real(const std::vector<std::vector<Expr>>& entries) {
  if (entries.empty() || entries.front().empty())
    throw Error("matrix literal must be non-empty");
  CMatrix m(static_cast<int>(entries.size()),
            static_cast<int>(entries.front().size()));
  for (int r = 0; r < m.rows(); ++r) {
    if (static_cast<int>(entries[static_cast<std::size_t>(r)].size()) != m.cols())
      throw Error("ragged matrix literal");
    for (int c = 0; c < m.cols(); ++c)
      m.at(r, c) = CExpr(entries[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
  }
  return m;
}

CMatrix CMatrix::transpose() const {
  CMatrix m(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) m.at(c, r) = at(r, c);
  return m;
}

CMatrix CMatrix::conj_transpose() const {
  CMatrix m(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) m.at(c, r) = at(r, c).conj();
  return m;
}

CMatrix CMatrix::simplified() const {
  CMatrix m(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) m.at(r, c) = at(r, c).simplified();
  return m;
}

CMatrix CMatrix::scaled(const CExpr& s) const {
  CMatrix m(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) m.at(r, c) = s * at(r, c);
  return m;
}

CMatrix CMatrix::block(int r0, int c0, int nrows, int ncols) const {
  CMatrix m(nrows, ncols);
  for (int r = 0; r < nrows; ++r)
    for (int c = 0; c < ncols; ++c) m.at(r, c) = at(r0 + r, c0 + c);
  return m;
}

bool CMatrix::all_entries_constant() const {
  for (const auto& e : entries_) {
    if (e.re().max_var_index() > 0 || e.re().depends_on_time()) return false;
    if (e.im().max_var_index() > 0 || e.im().depends_on_time()) return false;
  }
  return true;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error("matrix dimension mismatch in addition");
  CMatrix m(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) m.at(r, c) = a.at(r, c) + b.at(r, c);
  return m;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error("matrix dimension mismatch in subtraction");
  CMatrix m(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) m.at(r, c) = a.at(r, c) - b.at(r, c);
  return m;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows())
    throw Error("matrix dimension mismatch in multiplication");
  CMatrix m(a.rows(), b.cols());
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < b.cols(); ++c) {
      CExpr s;
      for (int k = 0; k < a.cols(); ++k) s = s + a.at(r, k) * b.at(k, c);
      m.at(r, c) = s;
    }
  }
  return m;
}

CMatrix CMatrix::operator-() const {
  CMatrix m(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) m.at(r, c) = -at(r, c);
  return m;
}

std::string CMatrix::str() const {
  std::ostringstream os;
  for (int r = 0; r < rows_; ++r) {
    os << "[ ";
    for (int c = 0; c < cols_; ++c) {
      if (c) os << " , ";
      os << at(r, c).str();
    }
    os << " ]\n";
  }
  return os.str();
}

CMatrix vstack(const CMatrix& top, const CMatrix& bottom) {
  if (top.cols() != bottom.cols()) throw Error("vstack column mismatch");
  CMatrix m(top.rows() + bottom.rows(), top.cols());
  for (int r = 0; r < top.rows(); ++r)
    for (int c = 0; c < top.cols(); ++c) m.at(r, c) = top.at(r, c);
  for (int r = 0; r < bottom.rows(); ++r)
    for (int c = 0; c < top.cols(); ++c) m.at(top.rows() + r, c) = bottom.at(r, c);
  return m;
}

CMatrix hstack(const CMatrix& left, const CMatrix& right) {
  if (left.rows() != right.rows()) throw Error("hstack row mismatch");
  CMatrix m(left.rows(), left.cols() + right.cols());
  for (int r = 0; r < left.rows(); ++r) {
    for (int c = 0; c < left.cols(); ++c) m.at(r, c) = left.at(r, c);
    for (int c = 0; c < right.cols(); ++c) m.at(r, left.cols() + c) = right.at(r, c);
  }
  return m;
}

ZeroCertificate test_zero(const CMatrix& m, const ZeroTestPolicy& policy) {
  ZeroCertificate cert;
  cert.verdict = Verdict::Zero;
  cert.exact = true;
  bool first = true;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      ZeroCertificate e = test_zero(m.at(r, c), policy);
      cert = first ? e : merge_certificates(cert, e);
      first = false;
      if (cert.is_nonzero()) return cert;
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------

CMatrix inverse(const CMatrix& a, const ZeroTestPolicy& policy) {
  if (a.rows() != a.cols()) throw Error("inverse of a non-square matrix");
  const int n = a.rows();
  CMatrix work = hstack(a, CMatrix::identity(n)).simplified();

  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    bool saw_inconclusive = false;
    for (int r = col; r < n && pivot < 0; ++r) {
      ZeroCertificate z = test_zero(work.at(r, col), policy);
      if (z.is_nonzero()) pivot = r;
      else if (z.inconclusive()) saw_inconclusive = true;
    }
    if (pivot < 0) {
      throw Error(saw_inconclusive
                      ? "inconclusive pivot: zero test could not decide regularity"
                      : "singular matrix over the function field");
    }
    if (pivot != col) {
      for (int c = 0; c < 2 * n; ++c)
        std::swap(work.at(pivot, c), work.at(col, c));
    }
    CExpr p = work.at(col, col);
    for (int c = 0; c < 2 * n; ++c)
      work.at(col, c) = (work.at(col, c) / p).simplified();
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      CExpr f = work.at(r, col);
      if (f.re().is_zero_literal() && f.im().is_zero_literal()) continue;
      for (int c = 0; c < 2 * n; ++c)
        work.at(r, c) = (work.at(r, c) - f * work.at(col, c)).simplified();
    }
  }
  return work.block(0, n, n, n);
}

int rank_numeric(const CMatrix& a, const ZeroTestPolicy& policy) {
  policy.validate();
  std::mt19937_64 rng(policy.seed);
  std::uniform_real_distribution<double> dist(policy.center - policy.half_width,
                                              policy.center + policy.half_width);
  int nvars = max_var_index(a);

  int best = -1;
  for (int i = 0; i < policy.samples; ++i) {
    bool found = false;
    for (int attempt = 0; attempt < policy.retry_cap && !found; ++attempt) {
      EvalPoint p;
      p.x.resize(static_cast<std::size_t>(nvars));
      for (auto& xi : p.x) xi = dist(rng);
      p.t = dist(rng);

      Eigen::MatrixXcd m(a.rows(), a.cols());
      bool finite = true;
      for (int r = 0; r < a.rows() && finite; ++r) {
        for (int c = 0; c < a.cols() && finite; ++c) {
          std::complex<double> v = a.at(r, c).eval_at(p);
          if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) finite = false;
          m(r, c) = v;
        }
      }
      if (!finite) continue;
      found = true;
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
      const auto& sv = svd.singularValues();
      double smax = sv.size() ? sv(0) : 0.0;
      int rank = 0;
      for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > 1e-9 * smax) ++rank;
      best = std::max(best, rank);
    }
  }
  if (best < 0)
    throw Error("inconclusive rank: no finite sample point found");
  return best;
}

int max_var_index(const CMatrix& a) {
  int n = 0;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      n = std::max({n, a.at(r, c).re().max_var_index(), a.at(r, c).im().max_var_index()});
  return n;
}

}  // namespace drekit
