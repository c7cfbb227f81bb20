#ifndef DREKIT_LIEOP_HPP
#define DREKIT_LIEOP_HPP

#include "drekit/field.hpp"

namespace drekit {

/// Real vector field f(x, t) on n states, built from the expression grammar.
struct VectorField {
  int n = 0;
  std::vector<Expr> components;

  void validate() const {
    if (n < 1) throw Error("vector field needs at least one state");
    if (static_cast<int>(components.size()) != n)
      throw Error("vector field component count does not match dimension");
    for (const auto& c : components)
      if (c.max_var_index() > n)
        throw Error("vector field component uses a variable beyond the dimension");
  }
};

/// Derivative of a along the flow of xdot = f: da/dt + (da/dx) f,
/// applied componentwise to the real and imaginary parts.
CExpr flow_derivative(const CExpr& a, const VectorField& f);
Expr flow_derivative(const Expr& a, const VectorField& f);

/// Entrywise flow derivative of a matrix.
CMatrix flow_derivative(const CMatrix& m, const VectorField& f);

/// Jacobian df/dx as an n x n real matrix of expressions.
CMatrix jacobian(const VectorField& f);

}  // namespace drekit

#endif
