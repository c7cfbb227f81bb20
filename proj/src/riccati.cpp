#include "drekit/riccati.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace drekit {

void RiccatiData::validate(const ZeroTestPolicy& policy) const {
  f.validate();
  const int nn = A.rows();
  if (A.cols() != nn || R.rows() != nn || R.cols() != nn || Q.rows() != nn ||
      Q.cols() != nn)
    throw Error("Riccati data matrices must all be n x n");
  if (nn != f.n) throw Error("Riccati data dimension differs from the vector field");
  if (!test_zero(R - R.transpose(), policy).is_zero())
    throw Error("symmetry precondition violation: R is not symmetric");
  if (!test_zero(Q - Q.transpose(), policy).is_zero())
    throw Error("symmetry precondition violation: Q is not symmetric");
}

bool SubspaceBasis::has_full_diagonal() const {
  if (!diag_lambda) return false;
  for (const auto& l : *diag_lambda)
    if (!l) return false;
  return true;
}

CMatrix build_hamiltonian(const RiccatiData& d, const ZeroTestPolicy& policy) {
  d.validate(policy);
  return vstack(hstack(d.A, -d.R), hstack(-d.Q, -d.A.transpose()));
}

CMatrix dre_residual(const CMatrix& X, const RiccatiData& d) {
  const int nn = d.n();
  if (X.rows() != nn || X.cols() != nn)
    throw Error("solution candidate has the wrong dimension");
  return flow_derivative(X, d.f) + X * d.A + d.A.transpose() * X - X * d.R * X + d.Q;
}

namespace {

// Lambda for the supplied basis, either taken from the basis data or
// recovered by solving S_sel Lambda = (H S - D_f S)_sel on an n-row
// regular subblock selected by the field pivoting rule.
CMatrix recover_lambda(const SubspaceBasis& b, const CMatrix& H, const VectorField& f,
                       const ZeroTestPolicy& policy) {
  const int n = b.n();
  if (b.Lambda) {
    if (b.Lambda->rows() != n || b.Lambda->cols() != n)
      throw Error("Lambda has the wrong dimension");
    return *b.Lambda;
  }
  if (b.diag_lambda) {
    if (static_cast<int>(b.diag_lambda->size()) != n)
      throw Error("diagonal Lambda entry count mismatch");
    CMatrix L(n, n);
    for (int i = 0; i < n; ++i)
      if ((*b.diag_lambda)[static_cast<std::size_t>(i)])
        L.at(i, i) = *(*b.diag_lambda)[static_cast<std::size_t>(i)];
    return L;
  }

  CMatrix S = b.stacked();
  CMatrix M = (H * S - flow_derivative(S, f)).simplified();

  // Row selection by elimination with pivot scanning in row order.
  CMatrix work = S.simplified();
  std::vector<bool> used(static_cast<std::size_t>(work.rows()), false);
  std::vector<int> selected;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    bool saw_inconclusive = false;
    for (int r = 0; r < work.rows() && pivot < 0; ++r) {
      if (used[static_cast<std::size_t>(r)]) continue;
      ZeroCertificate z = test_zero(work.at(r, col), policy);
      if (z.is_nonzero()) pivot = r;
      else if (z.inconclusive()) saw_inconclusive = true;
    }
    if (pivot < 0)
      throw Error(saw_inconclusive ? "inconclusive pivot while recovering Lambda"
                                   : "rank deficiency of [U; V]: cannot recover Lambda");
    used[static_cast<std::size_t>(pivot)] = true;
    selected.push_back(pivot);
    for (int r = 0; r < work.rows(); ++r) {
      if (used[static_cast<std::size_t>(r)] || r == pivot) continue;
      CExpr factor = work.at(r, col) / work.at(pivot, col);
      for (int c = 0; c < n; ++c)
        work.at(r, c) = (work.at(r, c) - factor * work.at(pivot, c)).simplified();
    }
  }
  std::sort(selected.begin(), selected.end());

  CMatrix S_sel(n, n), M_sel(n, n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n; ++c) {
      S_sel.at(i, c) = S.at(selected[static_cast<std::size_t>(i)], c);
      M_sel.at(i, c) = M.at(selected[static_cast<std::size_t>(i)], c);
    }
  return (inverse(S_sel, policy) * M_sel).simplified();
}

}  // namespace

InvarianceResult check_invariance(const SubspaceBasis& b, const CMatrix& H,
                                  const VectorField& f, const ZeroTestPolicy& policy,
                                  const std::set<int>& skip_columns) {
  const int n = b.n();
  if (b.U.rows() != n || b.V.rows() != n || b.V.cols() != n)
    throw Error("subspace basis blocks must be n x n");
  if (H.rows() != 2 * n || H.cols() != 2 * n)
    throw Error("Hamiltonian dimension mismatch");

  CMatrix S = b.stacked();
  if (rank_numeric(S, policy) != n)
    throw Error("rank deficiency of [U; V]: not an n-dimensional subspace");

  CMatrix Lambda = recover_lambda(b, H, f, policy);
  CMatrix residual = H * S - flow_derivative(S, f) - S * Lambda;

  std::set<int> skip = skip_columns;
  if (b.diag_lambda) {
    for (int i = 0; i < n; ++i)
      if (!(*b.diag_lambda)[static_cast<std::size_t>(i)]) skip.insert(i);
  }

  InvarianceResult out{CheckResult{}, Lambda};
  out.check.pass = true;
  out.check.cert.verdict = Verdict::Zero;
  out.check.cert.exact = true;
  bool first = true;
  for (int c = 0; c < n; ++c) {
    if (skip.count(c)) continue;
    for (int r = 0; r < 2 * n; ++r) {
      ZeroCertificate z = test_zero(residual.at(r, c), policy);
      if (z.inconclusive()) throw Error("inconclusive zero test in invariance residual");
      out.check.cert = first ? z : merge_certificates(out.check.cert, z);
      first = false;
      if (!z.is_zero()) out.check.pass = false;
    }
  }
  if (!skip.empty())
    out.check.note = "residual verified on " + std::to_string(n - static_cast<int>(skip.size())) +
                     " of " + std::to_string(n) + " columns";
  return out;
}

CMatrix solve_from_subspace(const SubspaceBasis& b, const RiccatiData& d,
                            const ZeroTestPolicy& policy,
                            const std::set<int>& skip_columns) {
  CMatrix H = build_hamiltonian(d, policy);
  InvarianceResult inv = check_invariance(b, H, d.f, policy, skip_columns);
  if (!inv.check.pass)
    throw Error("subspace is not right invariant for the Hamiltonian");

  CMatrix Uinv;
  try {
    Uinv = inverse(b.U, policy);
  } catch (const Error& e) {
    throw Error(std::string(e.what()) +
                " (U regularity fails; look for an accessibility witness: "
                "A^T v + D_f(v) = -lambda v with R v = 0)");
  }
  CMatrix X = (b.V * Uinv).simplified();
  ZeroCertificate res = test_zero(dre_residual(X, d), policy);
  if (!res.is_zero())
    throw Error("constructed X fails the equation residual: inconsistent basis "
                "or inconclusive zero test");
  return X;
}

CheckResult check_closedloop_spectrum(const SubspaceBasis& b, const CMatrix& X,
                                      const RiccatiData& d,
                                      const std::vector<std::pair<CExpr, int>>& pairs,
                                      const ZeroTestPolicy& policy) {
  if (pairs.empty()) throw Error("closed-loop spectrum check: no pairs supplied");
  CMatrix Acl = d.A - d.R * X;
  CheckResult out;
  out.pass = true;
  bool first = true;
  for (const auto& [lambda, col] : pairs) {
    if (col < 0 || col >= b.U.cols())
      throw Error("closed-loop spectrum check: column index out of range");
    CMatrix u = b.U.col(col);
    CMatrix residual = Acl * u - flow_derivative(u, d.f) - u.scaled(lambda);
    ZeroCertificate z = test_zero(residual, policy);
    if (z.inconclusive())
      throw Error("inconclusive zero test in closed-loop spectrum residual");
    out.cert = first ? z : merge_certificates(out.cert, z);
    first = false;
    if (!z.is_zero()) out.pass = false;
  }
  return out;
}

CMatrix symplectic_J(int n) {
  CMatrix J(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    J.at(i, n + i) = CExpr(Expr::integer(1));
    J.at(n + i, i) = CExpr(Expr::integer(-1));
  }
  return J;
}

CheckResult check_J_skew(const CMatrix& H, const ZeroTestPolicy& policy) {
  if (H.rows() != H.cols() || H.rows() % 2 != 0)
    throw Error("J-skew check needs a 2n x 2n matrix");
  const int n = H.rows() / 2;
  CMatrix Jinv = -symplectic_J(n);  // J^{-1} = -J
  CMatrix residual = Jinv * H + H.transpose() * Jinv;
  ZeroCertificate z = test_zero(residual, policy);
  if (z.inconclusive()) throw Error("inconclusive zero test in J-skew residual");
  return CheckResult{z.is_zero(), z, ""};
}

GramSymmetry check_gram_symmetry(const SubspaceBasis& b, const ZeroTestPolicy& policy) {
  CMatrix omega = b.U.conj_transpose() * b.V;
  CMatrix omega_t = b.U.transpose() * b.V;
  GramSymmetry g;
  ZeroCertificate zh = test_zero(omega - omega.conj_transpose(), policy);
  if (zh.inconclusive()) throw Error("inconclusive zero test in Hermitian Gram check");
  g.hermitian = CheckResult{zh.is_zero(), zh, ""};
  ZeroCertificate zs = test_zero(omega_t - omega_t.transpose(), policy);
  if (zs.inconclusive()) throw Error("inconclusive zero test in symmetric Gram check");
  g.symmetric = CheckResult{zs.is_zero(), zs, ""};
  return g;
}

namespace {

CheckResult witness_check(const CMatrix& vec, const CMatrix& first_residual,
                          const CMatrix& second_residual, const ZeroTestPolicy& policy) {
  bool nonzero = false;
  for (int i = 0; i < vec.rows() && !nonzero; ++i)
    nonzero = test_zero(vec.at(i, 0), policy).is_nonzero();
  if (!nonzero) throw Error("witness vector tests zero");
  ZeroCertificate z =
      merge_certificates(test_zero(first_residual, policy), test_zero(second_residual, policy));
  if (z.inconclusive()) throw Error("inconclusive zero test in witness residual");
  return CheckResult{z.is_zero(), z, ""};
}

}  // namespace

CheckResult check_regularity_witness_U(const CMatrix& v, const CExpr& lambda,
                                       const RiccatiData& d, const ZeroTestPolicy& policy) {
  if (v.cols() != 1 || v.rows() != d.n()) throw Error("witness must be an n x 1 column");
  CMatrix r1 = d.A.transpose() * v + flow_derivative(v, d.f) + v.scaled(lambda);
  CMatrix r2 = d.R * v;
  return witness_check(v, r1, r2, policy);
}

CheckResult check_regularity_witness_V(const CMatrix& u, const CExpr& lambda,
                                       const RiccatiData& d, const ZeroTestPolicy& policy) {
  if (u.cols() != 1 || u.rows() != d.n()) throw Error("witness must be an n x 1 column");
  CMatrix r1 = d.A * u - flow_derivative(u, d.f) - u.scaled(lambda);
  CMatrix r2 = d.Q * u;
  return witness_check(u, r1, r2, policy);
}

CheckResult check_lyapunov_relation(const SubspaceBasis& b, const RiccatiData& d,
                                    const ZeroTestPolicy& policy) {
  if (!b.has_full_diagonal() && !b.Lambda)
    throw Error("Lyapunov relation needs Lambda");
  const int n = b.n();
  CMatrix L(n, n);
  if (b.Lambda) L = *b.Lambda;
  else
    for (int i = 0; i < n; ++i) L.at(i, i) = *(*b.diag_lambda)[static_cast<std::size_t>(i)];

  CMatrix G = b.V.conj_transpose() * b.U;
  CMatrix Lstar = L.conj_transpose();
  CMatrix residual = flow_derivative(G, d.f) + G * L + Lstar * G +
                     b.V.conj_transpose() * d.R * b.V +
                     b.U.conj_transpose() * d.Q * b.U;
  ZeroCertificate z = test_zero(residual, policy);
  if (z.inconclusive()) throw Error("inconclusive zero test in Lyapunov relation");
  return CheckResult{z.is_zero(), z, ""};
}

PsdReport check_psd_on_grid(const CMatrix& X, const std::vector<EvalPoint>& grid,
                            const ZeroTestPolicy& policy, bool strict,
                            double strict_threshold) {
  if (X.rows() != X.cols()) throw Error("definiteness check needs a square matrix");
  PsdReport rep;
  ZeroCertificate sym = test_zero(X - X.transpose(), policy);
  if (sym.inconclusive()) throw Error("inconclusive zero test in symmetry check");
  rep.symmetry = CheckResult{sym.is_zero(), sym, ""};
  if (!rep.symmetry.pass) throw Error("definiteness check: X is not symmetric");

  const int n = X.rows();
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& p : grid) {
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        std::complex<double> v = X.at(r, c).eval_at(p);
        if (!std::isfinite(v.real()) || std::abs(v.imag()) > 1e-9)
          throw Error("non-finite or non-real evaluation at a grid point");
        m(r, c) = v.real();
      }
    }
    Eigen::MatrixXd sym_m = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym_m);
    double mn = es.eigenvalues()(0);
    rep.per_point.emplace_back(p, mn);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, mn);
  }
  rep.pass = strict ? rep.min_eigenvalue > strict_threshold
                    : rep.min_eigenvalue >= -1e-9;
  return rep;
}

SubspaceBasis stable_invariant_basis(const CMatrix& H) {
  if (H.rows() != H.cols() || H.rows() % 2 != 0)
    throw Error("stable basis needs a 2n x 2n constant matrix");
  const int n = H.rows() / 2;
  std::vector<EigenPair> pairs = constant_eigendecomposition(H);

  std::vector<const EigenPair*> stable;
  for (const auto& p : pairs) {
    double re = p.lambda.re().constant_value().convert_to<double>();
    if (re < 0) stable.push_back(&p);
  }
  if (static_cast<int>(stable.size()) != n)
    throw Error("expected exactly n eigenvalues with negative real part, found " +
                std::to_string(stable.size()));
  // Deterministic column order: by (Re, Im) of the eigenvalue.
  std::sort(stable.begin(), stable.end(), [](const EigenPair* a, const EigenPair* b) {
    double ra = a->lambda.re().constant_value().convert_to<double>();
    double rb = b->lambda.re().constant_value().convert_to<double>();
    double ia = a->lambda.im().constant_value().convert_to<double>();
    double ib = b->lambda.im().constant_value().convert_to<double>();
    return ra != rb ? ra < rb : ia < ib;
  });

  SubspaceBasis b;
  b.U = CMatrix(n, n);
  b.V = CMatrix(n, n);
  std::vector<std::optional<CExpr>> diag;
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      b.U.at(r, c) = stable[static_cast<std::size_t>(c)]->vector.at(r, 0);
      b.V.at(r, c) = stable[static_cast<std::size_t>(c)]->vector.at(n + r, 0);
    }
    diag.emplace_back(stable[static_cast<std::size_t>(c)]->lambda);
  }
  b.diag_lambda = std::move(diag);
  return b;
}

}  // namespace drekit
