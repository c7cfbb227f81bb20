#ifndef DREKIT_CONTRACTION_HPP
#define DREKIT_CONTRACTION_HPP

#include "drekit/riccati.hpp"

namespace drekit {

/// Input-affine control system xdot = f(x) + B u with a verified metric
/// candidate X and weight Q. B is constant real.
struct ControlModel {
  VectorField f;
  CMatrix B;  // n x m, constant
  CMatrix X;  // n x n, symmetric under the zero test
  CMatrix Q;  // n x n

  int n() const { return B.rows(); }
  int m() const { return B.cols(); }
  void validate(const ZeroTestPolicy& policy) const;
};

/// (dX_ij/dx) B = 0 for every entry of X: the gradient field B^T X is
/// curl-free along the input directions, so a potential k exists.
CheckResult check_integrability(const ControlModel& m, const ZeroTestPolicy& policy);

struct SynthesisResult {
  bool symbolic = false;
  std::vector<Expr> k;        // m components; empty when numeric-only
  CheckResult gradient_check; // dk/dx = B^T X, zero-test certified
  std::string note;
};

/// Potential of B^T X anchored at the origin, k(0) = 0, by iterated
/// single-variable antidifferentiation. Falls back to quadrature-only
/// evaluation when a slice has no polynomial antiderivative.
SynthesisResult synthesize_controller(const ControlModel& m, const ZeroTestPolicy& policy);

/// Numeric controller value k(x) as the line integral of B^T X along the
/// straight path from the origin (32-node Gauss-Legendre per segment).
std::vector<double> controller_value_quadrature(const ControlModel& m,
                                                const std::vector<double>& x);

/// Line integral of the row field g (1 x n, real) along a polyline.
double line_integral(const std::vector<Expr>& g,
                     const std::vector<std::vector<double>>& path);

/// f - B k, the closed-loop vector field.
VectorField closed_loop_field(const ControlModel& m, const std::vector<Expr>& k);

struct ContractionReport {
  CheckResult identity;      // D_{f-Bk}(X) + X J + J^T X = -Q - X B B^T X
  double max_rhs_eigenvalue = 0.0;  // grid-sampled max eigenvalue of the RHS
  bool rhs_negative = false;        // max eigenvalue <= -1e-9 on the grid
};

ContractionReport check_contraction_identity(const ControlModel& m,
                                             const std::vector<Expr>& k,
                                             const std::vector<EvalPoint>& grid,
                                             const ZeroTestPolicy& policy);

}  // namespace drekit

#endif
