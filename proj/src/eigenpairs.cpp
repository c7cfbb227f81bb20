#include "drekit/eigenpairs.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace drekit {

namespace {

void require_column(const CMatrix& v, int n, const char* what) {
  if (v.cols() != 1 || v.rows() != n)
    throw Error(std::string(what) + ": expected an n x 1 column");
}

CheckResult vector_nonzero(const CMatrix& v, const ZeroTestPolicy& policy) {
  CheckResult r;
  bool inconclusive = false;
  for (int i = 0; i < v.rows(); ++i) {
    ZeroCertificate z = test_zero(v.at(i, 0), policy);
    if (z.is_nonzero()) {
      r.pass = true;
      r.cert = z;
      return r;
    }
    if (z.inconclusive()) inconclusive = true;
  }
  if (inconclusive) throw Error("inconclusive zero test on eigenvector entries");
  r.pass = false;
  r.note = "vector tests zero";
  return r;
}

CheckResult residual_check(const CMatrix& residual, const ZeroTestPolicy& policy) {
  ZeroCertificate z = test_zero(residual, policy);
  if (z.inconclusive()) throw Error("inconclusive zero test on residual");
  return CheckResult{z.is_zero(), z, ""};
}

}  // namespace

CheckResult check_right_eigenpair(const CMatrix& m, const EigenPair& p,
                                  const VectorField& f, const ZeroTestPolicy& policy) {
  if (p.side != EigenSide::Right) throw Error("expected a right eigenpair");
  if (m.rows() != m.cols()) throw Error("eigenpair target must be square");
  require_column(p.vector, m.rows(), "right eigenvector");
  if (!vector_nonzero(p.vector, policy).pass)
    return CheckResult{false, {}, "eigenvector is zero in the field"};
  CMatrix residual =
      m * p.vector - flow_derivative(p.vector, f) - p.vector.scaled(p.lambda);
  return residual_check(residual, policy);
}

CheckResult check_left_eigenpair(const CMatrix& m, const EigenPair& p,
                                 const VectorField& f, const ZeroTestPolicy& policy) {
  if (p.side != EigenSide::Left) throw Error("expected a left eigenpair");
  if (m.rows() != m.cols()) throw Error("eigenpair target must be square");
  require_column(p.vector, m.rows(), "left eigenvector");
  if (!vector_nonzero(p.vector, policy).pass)
    return CheckResult{false, {}, "eigenvector is zero in the field"};
  // v^T M + D_f(v)^T - lambda v^T = 0, transposed to a column residual.
  CMatrix residual = m.transpose() * p.vector + flow_derivative(p.vector, f) -
                     p.vector.scaled(p.lambda);
  return residual_check(residual, policy);
}

EigenPair scale_eigenpair(const EigenPair& p, const CExpr& a, const VectorField& f,
                          const ZeroTestPolicy& policy) {
  if (p.side != EigenSide::Right) throw Error("scaling is defined for right pairs");
  ZeroCertificate z = test_zero(a, policy);
  if (z.inconclusive()) throw Error("inconclusive zero test on scaling element");
  if (z.is_zero()) throw Error("scaling element tests zero");
  EigenPair out;
  out.side = EigenSide::Right;
  out.lambda = (p.lambda - flow_derivative(a, f) / a).simplified();
  out.vector = p.vector.scaled(a).simplified();
  out.label = p.label.empty() ? "scaled" : p.label + "/scaled";
  return out;
}

CheckResult check_scalar_conjugate(const CExpr& a, const CExpr& b, const CExpr& witness,
                                   const VectorField& f, const ZeroTestPolicy& policy) {
  ZeroCertificate wz = test_zero(witness, policy);
  if (wz.inconclusive()) throw Error("inconclusive zero test on conjugacy witness");
  if (wz.is_zero()) throw Error("conjugacy witness tests zero");
  CExpr residual = b - a - flow_derivative(witness, f) / witness;
  ZeroCertificate z = test_zero(residual, policy);
  if (z.inconclusive()) throw Error("inconclusive zero test on conjugacy residual");
  return CheckResult{z.is_zero(), z, ""};
}

CheckResult check_matrix_conjugate(const CMatrix& m, const CMatrix& n, const CMatrix& t,
                                   const VectorField& f, const ZeroTestPolicy& policy) {
  if (m.rows() != m.cols() || n.rows() != n.cols() || t.rows() != t.cols() ||
      m.rows() != n.rows() || m.rows() != t.rows())
    throw Error("conjugacy check needs square matrices of one size");
  if (rank_numeric(t, policy) != t.rows())
    throw Error("conjugacy witness T is singular");
  CMatrix residual = m * t - t * n - flow_derivative(t, f);
  return residual_check(residual, policy);
}

CheckResult check_simple(const CMatrix& m, const std::vector<EigenPair>& pairs,
                         const VectorField& f, const ZeroTestPolicy& policy) {
  if (pairs.empty()) throw Error("simplicity check needs at least one pair");
  const int n = m.rows();
  EigenSide side = pairs.front().side;
  for (const auto& p : pairs) {
    if (p.side != side) throw Error("simplicity check: mixed eigenpair sides");
    CheckResult r = side == EigenSide::Right ? check_right_eigenpair(m, p, f, policy)
                                             : check_left_eigenpair(m, p, f, policy);
    if (!r.pass)
      throw Error("simplicity check: pair '" + p.label + "' failed verification");
  }
  CMatrix stacked = pairs.front().vector;
  for (std::size_t i = 1; i < pairs.size(); ++i)
    stacked = hstack(stacked, pairs[i].vector);
  int rank = rank_numeric(stacked, policy);
  CheckResult out;
  out.pass = static_cast<int>(pairs.size()) >= n && rank == n;
  out.note = "stacked eigenvector rank " + std::to_string(rank) + " of " + std::to_string(n);
  return out;
}

std::vector<EigenPair> constant_eigendecomposition(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error("eigendecomposition of a non-square matrix");
  if (!m.all_entries_constant())
    throw Error("constant eigendecomposition requires a numeric matrix");
  const int n = m.rows();
  Eigen::MatrixXcd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = m.at(r, c).eval_at({{}, 0.0});

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed to converge");

  // Geometric multiplicity deficit shows up as a rank-deficient
  // eigenvector matrix.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-9 * sv(0))
    throw Error("defective matrix: eigenvectors do not span, not simple");

  std::vector<EigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    EigenPair p;
    p.side = EigenSide::Right;
    p.lambda = CExpr::from_complex(es.eigenvalues()(k));
    p.vector = CMatrix(n, 1);
    for (int r = 0; r < n; ++r)
      p.vector.at(r, 0) = CExpr::from_complex(es.eigenvectors()(r, k));
    p.label = "numeric-" + std::to_string(k);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace drekit
