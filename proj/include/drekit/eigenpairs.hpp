#ifndef DREKIT_EIGENPAIRS_HPP
#define DREKIT_EIGENPAIRS_HPP

#include "drekit/lieop.hpp"

#include <string>

namespace drekit {

enum class EigenSide : std::uint8_t { Left, Right };

/// Candidate eigenpair for the flow-twisted eigenvalue relation
///   right: M w - D_f(w) = lambda w
///   left:  v^T M + D_f(v)^T = lambda v^T
struct EigenPair {
  EigenSide side = EigenSide::Right;
  CExpr lambda;
  CMatrix vector;  // column
  std::string label;
};

/// Result of a verification check: verdict plus the evidence behind it.
struct CheckResult {
  bool pass = false;
  ZeroCertificate cert;
  std::string note;
};

CheckResult check_right_eigenpair(const CMatrix& m, const EigenPair& p,
                                  const VectorField& f, const ZeroTestPolicy& policy);
CheckResult check_left_eigenpair(const CMatrix& m, const EigenPair& p,
                                 const VectorField& f, const ZeroTestPolicy& policy);

/// Gauge transformation of a right pair: (lambda - D_f(a)/a, a*w).
/// Requires a nonzero under the policy.
EigenPair scale_eigenpair(const EigenPair& p, const CExpr& a, const VectorField& f,
                          const ZeroTestPolicy& policy);

/// Scalars a, b conjugate with witness c: b = a + D_f(c)/c, c != 0.
CheckResult check_scalar_conjugate(const CExpr& a, const CExpr& b, const CExpr& witness,
                                   const VectorField& f, const ZeroTestPolicy& policy);

/// Matrices M, N conjugate with witness T: M T = T N + D_f(T), T regular.
CheckResult check_matrix_conjugate(const CMatrix& m, const CMatrix& n, const CMatrix& t,
                                   const VectorField& f, const ZeroTestPolicy& policy);

/// A list of same-side verified eigenpairs spans the space: the stacked
/// eigenvector matrix has full generic rank. Throws if any pair fails its
/// own verification first.
CheckResult check_simple(const CMatrix& m, const std::vector<EigenPair>& pairs,
                         const VectorField& f, const ZeroTestPolicy& policy);

/// Numeric eigendecomposition of a constant matrix, lifted to constant
/// pairs (each passes check_right_eigenpair). Throws on defective input.
std::vector<EigenPair> constant_eigendecomposition(const CMatrix& m);

}  // namespace drekit

#endif
