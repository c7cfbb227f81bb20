#include "drekit/contraction.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace drekit {

void ControlModel::validate(const ZeroTestPolicy& policy) const {
  f.validate();
  if (B.rows() != f.n) throw Error("B row count differs from the state dimension");
  if (!B.all_entries_constant()) throw Error("B must be a constant matrix");
  if (X.rows() != f.n || X.cols() != f.n || Q.rows() != f.n || Q.cols() != f.n)
    throw Error("X and Q must be n x n");
  if (!test_zero(X - X.transpose(), policy).is_zero())
    throw Error("X is not symmetric under the zero test");
  for (int r = 0; r < X.rows(); ++r)
    for (int c = 0; c < X.cols(); ++c)
      if (!X.at(r, c).im_is_literal_zero() &&
          !test_zero(X.at(r, c).im(), policy).is_zero())
        throw Error("X must be real");
}

CheckResult check_integrability(const ControlModel& m, const ZeroTestPolicy& policy) {
  CheckResult out;
  out.pass = true;
  bool first = true;
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) {
      const Expr& entry = m.X.at(i, j).re();
      for (int l = 0; l < m.m(); ++l) {
        std::vector<Expr> terms;
        for (int k = 0; k < m.n(); ++k)
          terms.push_back(diff(entry, VarRef{k + 1}) * m.B.at(k, l).re());
        ZeroCertificate z = test_zero(Expr::sum(std::move(terms)), policy);
        if (z.inconclusive())
          throw Error("inconclusive zero test in integrability check");
        out.cert = first ? z : merge_certificates(out.cert, z);
        first = false;
        if (!z.is_zero()) out.pass = false;
      }
    }
  }
  return out;
}

namespace {

// Row l of B^T X as real expressions.
std::vector<Expr> bt_x_row(const ControlModel& m, int l) {
  std::vector<Expr> row;
  row.reserve(static_cast<std::size_t>(m.n()));
  for (int i = 0; i < m.n(); ++i) {
    std::vector<Expr> terms;
    for (int k = 0; k < m.n(); ++k)
      terms.push_back(m.B.at(k, l).re() * m.X.at(k, i).re());
    row.push_back(Expr::sum(std::move(terms)));
  }
  return row;
}

CheckResult gradient_matches(const ControlModel& m, const std::vector<Expr>& k,
                             const ZeroTestPolicy& policy) {
  CheckResult out;
  out.pass = true;
  bool first = true;
  for (int l = 0; l < m.m(); ++l) {
    std::vector<Expr> row = bt_x_row(m, l);
    for (int i = 0; i < m.n(); ++i) {
      Expr residual = diff(k[static_cast<std::size_t>(l)], VarRef{i + 1}) -
                      row[static_cast<std::size_t>(i)];
      ZeroCertificate z = test_zero(residual, policy);
      if (z.inconclusive()) throw Error("inconclusive zero test in gradient check");
      out.cert = first ? z : merge_certificates(out.cert, z);
      first = false;
      if (!z.is_zero()) out.pass = false;
    }
  }
  return out;
}

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton on the
// Legendre recurrence.
struct GaussLegendre {
  std::vector<double> nodes, weights;

  explicit GaussLegendre(int n) {
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      nodes[static_cast<std::size_t>(i)] = x;
      weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre& gl32() {
  static const GaussLegendre g(32);
  return g;
}

}  // namespace

double line_integral(const std::vector<Expr>& g,
                     const std::vector<std::vector<double>>& path) {
  if (path.size() < 2) return 0.0;
  const auto& quad = gl32();
  double total = 0.0;
  for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
    const auto& p = path[seg];
    const auto& q = path[seg + 1];
    double acc = 0.0;
    for (std::size_t node = 0; node < quad.nodes.size(); ++node) {
      double s = 0.5 * (quad.nodes[node] + 1.0);  // [0, 1]
      EvalPoint pt;
      pt.x.resize(p.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        pt.x[i] = p[i] + s * (q[i] - p[i]);
      double dot = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i)
        dot += eval(g[i], pt) * (q[i] - p[i]);
      acc += quad.weights[node] * dot;
    }
    total += 0.5 * acc;
  }
  return total;
}

std::vector<double> controller_value_quadrature(const ControlModel& m,
                                                const std::vector<double>& x) {
  std::vector<double> k(static_cast<std::size_t>(m.m()));
  std::vector<std::vector<double>> path{std::vector<double>(x.size(), 0.0), x};
  for (int l = 0; l < m.m(); ++l)
    k[static_cast<std::size_t>(l)] = line_integral(bt_x_row(m, l), path);
  return k;
}

SynthesisResult synthesize_controller(const ControlModel& m, const ZeroTestPolicy& policy) {
  m.validate(policy);
  CheckResult integ = check_integrability(m, policy);
  if (!integ.pass)
    throw Error("integrability failure: (dX_ij/dx) B does not vanish");

  SynthesisResult out;
  out.symbolic = true;
  for (int l = 0; l < m.m() && out.symbolic; ++l) {
    std::vector<Expr> row = bt_x_row(m, l);
    // k_l(x) = sum_i  int_0^{x_i} g_i(x_1, .., x_{i-1}, s, 0, .., 0) ds
    std::vector<Expr> pieces;
    for (int i = 0; i < m.n(); ++i) {
      Expr slice = row[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < m.n(); ++j)
        slice = substitute(slice, VarRef{j + 1}, Expr());
      auto anti = polynomial_antiderivative(slice, VarRef{i + 1});
      if (!anti) {
        out.symbolic = false;
        out.note = "component " + std::to_string(l + 1) +
                   " has no polynomial antiderivative in x" + std::to_string(i + 1) +
                   "; controller available through quadrature only";
        break;
      }
      // Anchor each piece at zero so k(0) = 0.
      Expr at_zero = *anti;
      for (int j = 0; j <= i; ++j)
        at_zero = substitute(at_zero, VarRef{j + 1}, Expr());
      pieces.push_back(*anti - at_zero);
    }
    if (out.symbolic)
      out.k.push_back(simplify(Expr::sum(std::move(pieces))));
  }

  if (out.symbolic) {
    out.gradient_check = gradient_matches(m, out.k, policy);
    if (!out.gradient_check.pass)
      throw Error("controller synthesis postcondition dk/dx = B^T X failed");
  } else {
    out.k.clear();
  }
  return out;
}

VectorField closed_loop_field(const ControlModel& m, const std::vector<Expr>& k) {
  if (static_cast<int>(k.size()) != m.m())
    throw Error("controller component count differs from the input dimension");
  VectorField cl;
  cl.n = m.n();
  for (int i = 0; i < m.n(); ++i) {
    std::vector<Expr> terms{m.f.components[static_cast<std::size_t>(i)]};
    for (int l = 0; l < m.m(); ++l)
      terms.push_back(Expr::negate(m.B.at(i, l).re() * k[static_cast<std::size_t>(l)]));
    cl.components.push_back(simplify(Expr::sum(std::move(terms))));
  }
  return cl;
}

ContractionReport check_contraction_identity(const ControlModel& m,
                                             const std::vector<Expr>& k,
                                             const std::vector<EvalPoint>& grid,
                                             const ZeroTestPolicy& policy) {
  VectorField cl = closed_loop_field(m, k);
  CMatrix Jcl = jacobian(cl);
  CMatrix lhs = flow_derivative(m.X, cl) + m.X * Jcl + Jcl.transpose() * m.X;
  CMatrix rhs = -m.Q - m.X * m.B * m.B.transpose() * m.X;

  ContractionReport rep;
  ZeroCertificate z = test_zero(lhs - rhs, policy);
  if (z.inconclusive()) throw Error("inconclusive zero test in contraction identity");
  rep.identity = CheckResult{z.is_zero(), z, ""};

  rep.max_rhs_eigenvalue = -std::numeric_limits<double>::infinity();
  for (const auto& p : grid) {
    Eigen::MatrixXd r(m.n(), m.n());
    for (int i = 0; i < m.n(); ++i)
      for (int j = 0; j < m.n(); ++j) {
        std::complex<double> v = rhs.at(i, j).eval_at(p);
        if (!std::isfinite(v.real()) || std::abs(v.imag()) > 1e-9)
          throw Error("non-finite or non-real right side at a grid point");
        r(i, j) = v.real();
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (r + r.transpose()));
    rep.max_rhs_eigenvalue =
        std::max(rep.max_rhs_eigenvalue, es.eigenvalues()(m.n() - 1));
  }
  rep.rhs_negative = !grid.empty() && rep.max_rhs_eigenvalue <= -1e-9;
  return rep;
}

}  // namespace drekit
