#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "drekit/contraction.hpp"
#include "circuit_fixture.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace drekit;
using drekit::testing::CircuitFixture;

namespace {

const ZeroTestPolicy kPolicy;

std::vector<EvalPoint> square_grid(double lo, double hi, int steps) {
  std::vector<EvalPoint> g;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j)
      g.push_back(EvalPoint{{lo + (hi - lo) * i / (steps - 1.0),
                             lo + (hi - lo) * j / (steps - 1.0)},
                            0.0});
  return g;
}

ControlModel simple_model() {
  // X = I, B = e1, Q = I on a two-state system.
  VectorField f;
  f.n = 2;
  f.components = {parse("-x1", 2), parse("-x2", 2)};
  return ControlModel{f, CircuitFixture::real_matrix({{"1"}, {"0"}}),
                      CMatrix::identity(2), CMatrix::identity(2)};
}

}  // namespace

TEST_CASE("integrability") {
  CircuitFixture fx;
  CHECK(check_integrability(fx.control(), kPolicy).pass);
  CHECK(check_integrability(simple_model(), kPolicy).pass);

  // X depending on x2 with B = e2 is not integrable.
  ControlModel bad{fx.f, fx.B, CircuitFixture::real_matrix({{"x2", "0"}, {"0", "1"}}),
                   fx.Q};
  CHECK(!check_integrability(bad, kPolicy).pass);
}

TEST_CASE("controller synthesis on the simple model") {
  SynthesisResult s = synthesize_controller(simple_model(), kPolicy);
  REQUIRE(s.symbolic);
  REQUIRE(s.k.size() == 1);
  CHECK(to_string(s.k[0]) == "x1");
  CHECK(s.gradient_check.pass);
}

TEST_CASE("controller synthesis on the circuit model") {
  CircuitFixture fx;
  SynthesisResult s = synthesize_controller(fx.control(), kPolicy);
  REQUIRE(s.symbolic);
  REQUIRE(s.k.size() == 1);
  // Canonical string equality with x1 + x1^3/3 + x2.
  CHECK(to_string(s.k[0]) == to_string(simplify(parse("x1 + x1^3/3 + x2", 2))));
  CHECK(s.gradient_check.pass);
  CHECK(s.gradient_check.cert.exact);
}

TEST_CASE("synthesized gradient matches finite differences") {
  CircuitFixture fx;
  SynthesisResult s = synthesize_controller(fx.control(), kPolicy);
  REQUIRE(s.symbolic);
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const double h = 1e-6;
  // B^T X row evaluated against central differences of k.
  for (int trial = 0; trial < 50; ++trial) {
    EvalPoint p{{dist(rng), dist(rng)}, 0.0};
    for (int i = 0; i < 2; ++i) {
      EvalPoint pp = p, pm = p;
      pp.x[static_cast<std::size_t>(i)] += h;
      pm.x[static_cast<std::size_t>(i)] -= h;
      double fd = (eval(s.k[0], pp) - eval(s.k[0], pm)) / (2 * h);
      double gi = 0.0;
      for (int r = 0; r < 2; ++r)
        gi += eval(fx.B.at(r, 0).re(), p) * eval(fx.X.at(r, i).re(), p);
      CHECK(std::abs(fd - gi) <= 1e-6 * (1.0 + std::abs(gi)));
    }
  }
}

TEST_CASE("non-integrable metric is rejected") {
  CircuitFixture fx;
  ControlModel bad{fx.f, fx.B, CircuitFixture::real_matrix({{"x2", "0"}, {"0", "1"}}),
                   fx.Q};
  CHECK_THROWS_WITH_AS(synthesize_controller(bad, kPolicy),
                       doctest::Contains("integrability"), Error);
}

TEST_CASE("quadrature fallback for a non-polynomial antiderivative") {
  // X independent of x1 keeps (dX/dx)B = 0 for B = e1, while the x2 slice
  // 1/(1+s^2) has no polynomial antiderivative: the symbolic route declines.
  VectorField f;
  f.n = 2;
  f.components = {parse("-x1", 2), parse("-x2", 2)};
  ControlModel m{f, CircuitFixture::real_matrix({{"1"}, {"0"}}),
                 CircuitFixture::real_matrix(
                     {{"1", "1/(1+x2^2)"}, {"1/(1+x2^2)", "1"}}),
                 CMatrix::identity(2)};
  SynthesisResult s = synthesize_controller(m, kPolicy);
  CHECK(!s.symbolic);
  CHECK(s.k.empty());
  CHECK(!s.note.empty());
  // The quadrature controller still evaluates: x1 + arctan(x2).
  std::vector<double> k = controller_value_quadrature(m, {1.0, 0.5});
  CHECK(k[0] == doctest::Approx(1.0 + std::atan(0.5)).epsilon(1e-10));
}

TEST_CASE("closed-loop field") {
  CircuitFixture fx;
  SynthesisResult s = synthesize_controller(fx.control(), kPolicy);
  VectorField cl = closed_loop_field(fx.control(), s.k);
  CHECK(test_zero(cl.components[0] - parse("(-x1+x2)/(1+x1^2)", 2), kPolicy).is_zero());
  CHECK(test_zero(cl.components[1] - parse("-x1^3/3 - 2*x2", 2), kPolicy).is_zero());

  // Zero feedback returns f unchanged.
  VectorField same = closed_loop_field(fx.control(), {Expr()});
  CHECK(test_zero(same.components[0] - fx.f.components[0], kPolicy).is_zero());
  CHECK(test_zero(same.components[1] - fx.f.components[1], kPolicy).is_zero());
}

TEST_CASE("contraction identity") {
  CircuitFixture fx;
  SynthesisResult s = synthesize_controller(fx.control(), kPolicy);

  SUBCASE("circuit closed loop satisfies the identity with a negative right side") {
    ContractionReport rep =
        check_contraction_identity(fx.control(), s.k, square_grid(-2, 2, 21), kPolicy);
    CHECK(rep.identity.pass);
    CHECK(rep.identity.cert.exact);
    CHECK(rep.rhs_negative);
    CHECK(rep.max_rhs_eigenvalue <= -1e-9);
  }
  SUBCASE("agrees with the equation residual route") {
    ZeroCertificate res = test_zero(dre_residual(fx.X, fx.riccati()), kPolicy);
    ContractionReport rep =
        check_contraction_identity(fx.control(), s.k, square_grid(-1, 1, 3), kPolicy);
    CHECK(res.is_zero() == rep.identity.pass);
  }
  SUBCASE("perturbed metric fails both routes") {
    CircuitFixture alt;
    alt.X = fx.X + CircuitFixture::real_matrix({{"x1", "0"}, {"0", "0"}});
    // Perturbation keeps (dX/dx)B = 0 so synthesis still runs.
    SynthesisResult s2 = synthesize_controller(alt.control(), kPolicy);
    ContractionReport rep =
        check_contraction_identity(alt.control(), s2.k, square_grid(-1, 1, 3), kPolicy);
    CHECK(!rep.identity.pass);
    CHECK(!test_zero(dre_residual(alt.X, alt.riccati()), kPolicy).is_zero());
  }
  SUBCASE("trivial zero system") {
    VectorField f0;
    f0.n = 2;
    f0.components = {Expr(), Expr()};
    ControlModel zero{f0, CMatrix(2, 1), CMatrix::identity(2), CMatrix(2, 2)};
    ContractionReport rep =
        check_contraction_identity(zero, {Expr()}, square_grid(-1, 1, 3), kPolicy);
    CHECK(rep.identity.pass);
  }
}

TEST_CASE("path independence of the line integral") {
  CircuitFixture fx;
  SynthesisResult s = synthesize_controller(fx.control(), kPolicy);
  REQUIRE(s.symbolic);

  std::vector<Expr> g;
  for (int i = 0; i < 2; ++i) {
    std::vector<Expr> terms;
    for (int r = 0; r < 2; ++r)
      terms.push_back(fx.B.at(r, 0).re() * fx.X.at(r, i).re());
    g.push_back(Expr::sum(std::move(terms)));
  }

  std::mt19937_64 rng(92);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> end{dist(rng), dist(rng)};
    // Random polygonal path from the origin to the endpoint.
    std::vector<std::vector<double>> path{{0.0, 0.0}};
    int corners = static_cast<int>(rng() % 3) + 1;
    for (int c = 0; c < corners; ++c) path.push_back({dist(rng), dist(rng)});
    path.push_back(end);

    double quad = line_integral(g, path);
    double exact = eval(s.k[0], EvalPoint{end, 0.0});
    CHECK(std::abs(quad - exact) <= 1e-6 * (1.0 + std::abs(exact)));
  }
}
