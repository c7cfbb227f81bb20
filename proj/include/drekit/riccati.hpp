#ifndef DREKIT_RICCATI_HPP
#define DREKIT_RICCATI_HPP

#include "drekit/eigenpairs.hpp"

#include <optional>
#include <set>

namespace drekit {

/// Data of the matrix Riccati equation
///   D_f(X) + X A + A^T X - X R X = -Q
/// with R, Q symmetric under the zero test.
struct RiccatiData {
  CMatrix A, R, Q;
  VectorField f;

  int n() const { return A.rows(); }
  void validate(const ZeroTestPolicy& policy) const;
};

/// Basis of a candidate invariant subspace, stacked as [U; V]. Lambda may
/// be supplied in full, as diagonal entries (possibly partial), or left to
/// be recovered from the invariance relation.
struct SubspaceBasis {
  CMatrix U, V;
  std::optional<CMatrix> Lambda;
  std::optional<std::vector<std::optional<CExpr>>> diag_lambda;

  int n() const { return U.cols(); }
  bool has_full_diagonal() const;
  CMatrix stacked() const { return vstack(U, V); }
};

/// The 2n x 2n block matrix [[A, -R], [-Q, -A^T]].
CMatrix build_hamiltonian(const RiccatiData& d, const ZeroTestPolicy& policy);

/// D_f(X) + X A + A^T X - X R X + Q; identically zero iff X solves the
/// equation.
CMatrix dre_residual(const CMatrix& X, const RiccatiData& d);

/// Result of the invariance check, carrying the multiplier it verified.
struct InvarianceResult {
  CheckResult check;
  CMatrix Lambda;
};

/// Verify H [U;V] - D_f([U;V]) = [U;V] Lambda, recovering Lambda from an
/// n-row regular subblock when it is not supplied. Columns listed in
/// skip_columns (0-based) are excluded from the residual test.
InvarianceResult check_invariance(const SubspaceBasis& b, const CMatrix& H,
                                  const VectorField& f, const ZeroTestPolicy& policy,
                                  const std::set<int>& skip_columns = {});

/// X = V U^{-1} after the invariance check; the residual of the result is
/// re-verified before returning.
CMatrix solve_from_subspace(const SubspaceBasis& b, const RiccatiData& d,
                            const ZeroTestPolicy& policy,
                            const std::set<int>& skip_columns = {});

/// Columns of U are eigenvectors of the closed-loop matrix A - R X for the
/// supplied eigenvalues: (A - RX) u_i - D_f(u_i) = lambda_i u_i.
CheckResult check_closedloop_spectrum(const SubspaceBasis& b, const CMatrix& X,
                                      const RiccatiData& d,
                                      const std::vector<std::pair<CExpr, int>>& pairs,
                                      const ZeroTestPolicy& policy);

/// J^{-1} H = -H^T J^{-1} with J = [[0, I], [-I, 0]].
CheckResult check_J_skew(const CMatrix& H, const ZeroTestPolicy& policy);

CMatrix symplectic_J(int n);

struct GramSymmetry {
  CheckResult hermitian;  // U* V equals its conjugate transpose
  CheckResult symmetric;  // U^T V equals its transpose
};

GramSymmetry check_gram_symmetry(const SubspaceBasis& b, const ZeroTestPolicy& policy);

/// Witness that U is singular: A^T v + D_f(v) = -lambda v and R v = 0 for
/// nonzero v. The accessibility-style test.
CheckResult check_regularity_witness_U(const CMatrix& v, const CExpr& lambda,
                                       const RiccatiData& d, const ZeroTestPolicy& policy);

/// Witness that V is singular: A u - D_f(u) = lambda u and Q u = 0 for
/// nonzero u. The observability-style test.
CheckResult check_regularity_witness_V(const CMatrix& u, const CExpr& lambda,
                                       const RiccatiData& d, const ZeroTestPolicy& policy);

/// D_f(V* U) + V* U Lambda + Lambda* V* U + V* R V + U* Q U = 0 for a
/// fully diagonal Lambda.
CheckResult check_lyapunov_relation(const SubspaceBasis& b, const RiccatiData& d,
                                    const ZeroTestPolicy& policy);

struct PsdReport {
  bool pass = false;
  CheckResult symmetry;
  double min_eigenvalue = 0.0;
  std::vector<std::pair<EvalPoint, double>> per_point;  // point, min eigenvalue
};

/// Numeric positive-(semi)definiteness over a grid of points; symmetry is
/// checked symbolically first. strict requires min eigenvalue > threshold,
/// otherwise min eigenvalue >= -1e-9.
PsdReport check_psd_on_grid(const CMatrix& X, const std::vector<EvalPoint>& grid,
                            const ZeroTestPolicy& policy, bool strict = false,
                            double strict_threshold = 0.0);

/// Build [U;V] from the eigenvectors of a constant Hamiltonian whose
/// eigenvalues have negative real part. Requires exactly n stable pairs.
SubspaceBasis stable_invariant_basis(const CMatrix& H);

}  // namespace drekit

#endif
