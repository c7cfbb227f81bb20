#include "drekit/lieop.hpp"

namespace drekit {

Expr flow_derivative(const Expr& a, const VectorField& f) {
  f.validate();
  if (a.max_var_index() > f.n)
    throw Error("expression uses a variable beyond the field dimension");
  std::vector<Expr> terms;
  terms.reserve(static_cast<std::size_t>(f.n) + 1);
  if (a.depends_on_time()) terms.push_back(diff(a, VarRef{0}));
  for (int i = 1; i <= f.n; ++i) {
    VarRef v{i};
    if (!a.depends_on(v)) continue;
    terms.push_back(diff(a, v) * f.components[static_cast<std::size_t>(i - 1)]);
  }
  return Expr::sum(std::move(terms));
}

CExpr flow_derivative(const CExpr& a, const VectorField& f) {
  return CExpr(flow_derivative(a.re(), f), flow_derivative(a.im(), f));
}

CMatrix flow_derivative(const CMatrix& m, const VectorField& f) {
  CMatrix out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      out.at(r, c) = flow_derivative(m.at(r, c), f);
  return out;
}

CMatrix jacobian(const VectorField& f) {
  f.validate();
  CMatrix j(f.n, f.n);
  for (int r = 0; r < f.n; ++r)
    for (int c = 0; c < f.n; ++c)
      j.at(r, c) = CExpr(diff(f.components[static_cast<std::size_t>(r)], VarRef{c + 1}));
  return j;
}

}  // namespace drekit
