#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "drekit/riccati.hpp"
#include "circuit_fixture.hpp"
#include "support.hpp"

#include <cmath>

using namespace drekit;
using drekit::testing::CircuitFixture;
using drekit::testing::ExprGen;

namespace {

const ZeroTestPolicy kPolicy;

VectorField zero_field(int n) {
  VectorField f;
  f.n = n;
  f.components.assign(static_cast<std::size_t>(n), Expr());
  return f;
}

RiccatiData double_integrator() {
  return RiccatiData{CircuitFixture::real_matrix({{"0", "1"}, {"0", "0"}}),
                     CircuitFixture::real_matrix({{"0", "0"}, {"0", "1"}}),
                     CMatrix::identity(2), zero_field(2)};
}

std::vector<EvalPoint> square_grid(double lo, double hi, int steps) {
  std::vector<EvalPoint> g;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j)
      g.push_back(EvalPoint{{lo + (hi - lo) * i / (steps - 1.0),
                             lo + (hi - lo) * j / (steps - 1.0)},
                            0.0});
  return g;
}

}  // namespace

TEST_CASE("hamiltonian assembly") {
  VectorField f0 = zero_field(2);
  RiccatiData zero{CMatrix(2, 2), CMatrix(2, 2), CMatrix(2, 2), f0};
  CHECK(test_zero(build_hamiltonian(zero, kPolicy), kPolicy).is_zero());

  CircuitFixture fx;
  CMatrix H = build_hamiltonian(fx.riccati(), kPolicy);
  CHECK(H.rows() == 4);
  // The (3,1) entry of the printed Hamiltonian is -(3 + 4 x1^2 + x1^4).
  CHECK(test_zero(H.at(2, 0) - CExpr(parse("-(3 + 4*x1^2 + x1^4)", 2)), kPolicy)
            .is_zero());
  CHECK(test_zero(H.at(0, 1) - CExpr(parse("1/(1+x1^2)", 2)), kPolicy).is_zero());
  CHECK(test_zero(H.at(1, 3) - CExpr(Expr::integer(-1)), kPolicy).is_zero());

  RiccatiData bad{fx.A, CircuitFixture::real_matrix({{"0", "1"}, {"0", "0"}}), fx.Q,
                  fx.f};
  CHECK_THROWS_WITH_AS(build_hamiltonian(bad, kPolicy), doctest::Contains("symmetry"),
                       Error);

  // Constant benchmark assembly, checked through the J-skew identity.
  CMatrix Hdi = build_hamiltonian(double_integrator(), kPolicy);
  CHECK(Hdi.all_entries_constant());
  CHECK(check_J_skew(Hdi, kPolicy).pass);
}

TEST_CASE("equation residual") {
  CircuitFixture fx;
  RiccatiData d = fx.riccati();

  // X = 0 leaves exactly Q.
  CMatrix zero(2, 2);
  CHECK(test_zero(dre_residual(zero, d) - fx.Q, kPolicy).is_zero());

  // The printed solution is exact: every entry cancels to the literal zero.
  CMatrix res = dre_residual(fx.X, d);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      CHECK(simplify(res.at(r, c).re()).is_zero_literal());
      CHECK(simplify(res.at(r, c).im()).is_zero_literal());
    }
}

TEST_CASE("constant equation residual with a square-root solution") {
  RiccatiData d = double_integrator();
  CMatrix X(2, 2);
  X.at(0, 0) = CExpr(parse("sqrt(3)", 2));
  X.at(0, 1) = CExpr(Expr::integer(1));
  X.at(1, 0) = CExpr(Expr::integer(1));
  X.at(1, 1) = CExpr(parse("sqrt(3)", 2));
  CHECK(test_zero(dre_residual(X, d), kPolicy).is_zero());
}

TEST_CASE("invariance of the canonical graph basis") {
  CircuitFixture fx;
  RiccatiData d = fx.riccati();
  CMatrix H = build_hamiltonian(d, kPolicy);

  SubspaceBasis b;
  b.U = CMatrix::identity(2);
  b.V = fx.X;
  InvarianceResult inv = check_invariance(b, H, fx.f, kPolicy);
  CHECK(inv.check.pass);
  // The recovered multiplier is A - R X.
  CHECK(test_zero(inv.Lambda - (fx.A - fx.R * fx.X), kPolicy).is_zero());
}

TEST_CASE("invariance of the shipped circuit basis") {
  CircuitFixture fx;
  RiccatiData d = fx.riccati();
  CMatrix H = build_hamiltonian(d, kPolicy);

  SubspaceBasis b;
  b.U = fx.U;
  b.V = fx.V;

  SUBCASE("full symbolic check with recovered Lambda") {
    InvarianceResult inv = check_invariance(b, H, fx.f, kPolicy);
    CHECK(inv.check.pass);
  }
  SUBCASE("diagonal Lambda restricted to the eigenvector column") {
    b.diag_lambda = std::vector<std::optional<CExpr>>{fx.beta1, std::nullopt};
    InvarianceResult inv = check_invariance(b, H, fx.f, kPolicy);
    CHECK(inv.check.pass);
    CHECK(inv.check.note.find("1 of 2") != std::string::npos);
  }
  SUBCASE("random basis is not invariant") {
    ExprGen gen(81, 2);
    SubspaceBasis r;
    r.U = CMatrix(2, 2);
    r.V = CMatrix(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        r.U.at(i, j) = CExpr(gen(2) + Expr::integer(1));
        r.V.at(i, j) = CExpr(gen(2) + Expr::integer(2));
      }
    InvarianceResult inv = check_invariance(r, H, fx.f, kPolicy);
    CHECK(!inv.check.pass);
  }
}

TEST_CASE("solution map from the subspace basis") {
  CircuitFixture fx;
  RiccatiData d = fx.riccati();

  SUBCASE("canonical basis returns X itself") {
    SubspaceBasis b;
    b.U = CMatrix::identity(2);
    b.V = fx.X;
    CMatrix X = solve_from_subspace(b, d, kPolicy);
    CHECK(test_zero(X - fx.X, kPolicy).is_zero());
  }
  SUBCASE("shipped basis returns the printed X, skipping the substituted column") {
    SubspaceBasis b;
    b.U = fx.U;
    b.V = fx.V;
    b.diag_lambda = std::vector<std::optional<CExpr>>{fx.beta1, std::nullopt};
    CMatrix X = solve_from_subspace(b, d, kPolicy, {1});
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        CHECK(simplify((X - fx.X).at(r, c).re()).is_zero_literal());
  }
  SUBCASE("double integrator from stable eigenvectors") {
    RiccatiData di = double_integrator();
    CMatrix H = build_hamiltonian(di, kPolicy);
    SubspaceBasis b = stable_invariant_basis(H);
    CMatrix X = solve_from_subspace(b, di, kPolicy);
    const double s3 = std::sqrt(3.0);
    double expect[2][2] = {{s3, 1.0}, {1.0, s3}};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        std::complex<double> v = X.at(r, c).eval_at({{0.0, 0.0}, 0.0});
        CHECK(std::abs(v.real() - expect[r][c]) < 1e-9);
        CHECK(std::abs(v.imag()) < 1e-9);
      }
  }
}

TEST_CASE("basis invariance of the solution") {
  CircuitFixture fx;
  RiccatiData d = fx.riccati();
  ExprGen gen(82, 2);

  SubspaceBasis b;
  b.U = CMatrix::identity(2);
  b.V = fx.X;
  CMatrix X0 = solve_from_subspace(b, d, kPolicy);

  int done = 0;
  for (int trial = 0; trial < 20 && done < 4; ++trial) {
    CMatrix t(2, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) t.at(r, c) = CExpr(gen(2));
    if (rank_numeric(t, kPolicy) != 2) continue;
    SubspaceBasis bt;
    bt.U = (b.U * t).simplified();
    bt.V = (b.V * t).simplified();
    CMatrix Xt = solve_from_subspace(bt, d, kPolicy);
    CHECK(test_zero(Xt - X0, kPolicy).is_zero());
    ++done;
  }
  CHECK(done == 4);
}

TEST_CASE("closed-loop spectrum on the eigenvector column") {
  CircuitFixture fx;
  RiccatiData d = fx.riccati();
  SubspaceBasis b;
  b.U = fx.U;
  b.V = fx.V;

  std::vector<std::pair<CExpr, int>> ok{{fx.beta1, 0}};
  CHECK(check_closedloop_spectrum(b, fx.X, d, ok, kPolicy).pass);

  std::vector<std::pair<CExpr, int>> wrong{{fx.beta1 + CExpr(Expr::integer(1)), 0}};
  CHECK(!check_closedloop_spectrum(b, fx.X, d, wrong, kPolicy).pass);
}

TEST_CASE("closed-loop spectrum of the diagonalized constant basis") {
  RiccatiData di = double_integrator();
  SubspaceBasis b = stable_invariant_basis(build_hamiltonian(di, kPolicy));
  CMatrix X = solve_from_subspace(b, di, kPolicy);
  std::vector<std::pair<CExpr, int>> pairs;
  for (int i = 0; i < 2; ++i)
    pairs.emplace_back(*(*b.diag_lambda)[static_cast<std::size_t>(i)], i);
  CHECK(check_closedloop_spectrum(b, X, di, pairs, kPolicy).pass);
}

TEST_CASE("J-skew identity") {
  CircuitFixture fx;
  CMatrix H = build_hamiltonian(fx.riccati(), kPolicy);
  CHECK(check_J_skew(H, kPolicy).pass);

  CMatrix zero4(4, 4);
  CHECK(check_J_skew(zero4, kPolicy).pass);

  // Breaking the R block's symmetry breaks the identity.
  CMatrix Hbad = H;
  Hbad.at(0, 3) = Hbad.at(0, 3) + CExpr(Expr::integer(1));
  CHECK(!check_J_skew(Hbad, kPolicy).pass);
}

TEST_CASE("Gram symmetry checks") {
  SubspaceBasis b;
  b.U = CMatrix::identity(2);
  b.V = CircuitFixture::real_matrix({{"1", "2"}, {"2", "5"}});
  GramSymmetry g = check_gram_symmetry(b, kPolicy);
  CHECK(g.hermitian.pass);
  CHECK(g.symmetric.pass);

  SubspaceBasis bad;
  bad.U = CMatrix::identity(2);
  bad.V = CircuitFixture::real_matrix({{"0", "1"}, {"0", "0"}});
  GramSymmetry gb = check_gram_symmetry(bad, kPolicy);
  CHECK(!gb.hermitian.pass);
  CHECK(!gb.symmetric.pass);

  // Stable basis of the double integrator Hamiltonian.
  RiccatiData di = double_integrator();
  SubspaceBasis sb = stable_invariant_basis(build_hamiltonian(di, kPolicy));
  GramSymmetry gs = check_gram_symmetry(sb, kPolicy);
  CHECK(gs.hermitian.pass);
  CHECK(gs.symmetric.pass);
}

TEST_CASE("regularity witnesses") {
  VectorField f0 = zero_field(2);

  SUBCASE("uncontrollable mode certifies singular U") {
    RiccatiData d{CircuitFixture::real_matrix({{"1", "0"}, {"0", "-1"}}),
                  CircuitFixture::real_matrix({{"1", "0"}, {"0", "0"}}),
                  CMatrix::identity(2), f0};
    CMatrix v(2, 1);
    v.at(1, 0) = CExpr(Expr::integer(1));
    CHECK(check_regularity_witness_U(v, CExpr(Expr::integer(1)), d, kPolicy).pass);
  }
  SUBCASE("unobservable mode certifies singular V") {
    RiccatiData d{CircuitFixture::real_matrix({{"1", "0"}, {"0", "2"}}),
                  CMatrix(2, 2),
                  CircuitFixture::real_matrix({{"1", "0"}, {"0", "0"}}), f0};
    CMatrix u(2, 1);
    u.at(1, 0) = CExpr(Expr::integer(1));
    CHECK(check_regularity_witness_V(u, CExpr(Expr::integer(2)), d, kPolicy).pass);
  }
  SUBCASE("circuit data admits no constant witness") {
    CircuitFixture fx;
    RiccatiData d = fx.riccati();
    for (int i = 0; i < 2; ++i) {
      CMatrix e(2, 1);
      e.at(i, 0) = CExpr(Expr::integer(1));
      CHECK(!check_regularity_witness_U(e, fx.beta1, d, kPolicy).pass);
      CHECK(!check_regularity_witness_U(e, CExpr(Expr::integer(1)), d, kPolicy).pass);
      CHECK(!check_regularity_witness_V(e, fx.beta1, d, kPolicy).pass);
      CHECK(!check_regularity_witness_V(e, CExpr(Expr::integer(2)), d, kPolicy).pass);
    }
  }
  SUBCASE("zero witness is rejected") {
    CircuitFixture fx;
    CMatrix z(2, 1);
    CHECK_THROWS_AS(
        check_regularity_witness_U(z, CExpr(Expr::integer(1)), fx.riccati(), kPolicy),
        Error);
  }
}

TEST_CASE("Lyapunov-type relation for a diagonal multiplier") {
  SUBCASE("zero data") {
    VectorField f0 = zero_field(2);
    RiccatiData d{CMatrix(2, 2), CMatrix(2, 2), CMatrix(2, 2), f0};
    SubspaceBasis b;
    b.U = CMatrix::identity(2);
    b.V = CMatrix(2, 2);
    b.diag_lambda = std::vector<std::optional<CExpr>>{CExpr(), CExpr()};
    CHECK(check_lyapunov_relation(b, d, kPolicy).pass);
  }
  SUBCASE("double integrator stable basis") {
    RiccatiData di = double_integrator();
    SubspaceBasis b = stable_invariant_basis(build_hamiltonian(di, kPolicy));
    CHECK(check_lyapunov_relation(b, di, kPolicy).pass);
  }
  SUBCASE("perturbed weight fails") {
    RiccatiData di = double_integrator();
    SubspaceBasis b = stable_invariant_basis(build_hamiltonian(di, kPolicy));
    di.Q = di.Q + CMatrix::identity(2);
    CHECK(!check_lyapunov_relation(b, di, kPolicy).pass);
  }
}

TEST_CASE("grid positive definiteness") {
  CircuitFixture fx;

  SUBCASE("identity") {
    PsdReport rep = check_psd_on_grid(CMatrix::identity(2), square_grid(-2, 2, 5),
                                      kPolicy, true, 0.0);
    CHECK(rep.pass);
    CHECK(rep.min_eigenvalue == doctest::Approx(1.0));
  }
  SUBCASE("circuit solution is positive definite on the printed grid") {
    PsdReport rep =
        check_psd_on_grid(fx.X, square_grid(-2, 2, 21), kPolicy, true, 0.0);
    CHECK(rep.pass);
    CHECK(rep.per_point.size() == 21 * 21);
    CHECK(rep.min_eigenvalue > 0.0);
  }
  SUBCASE("indefinite diagonal fails with a witness") {
    CMatrix bad = CircuitFixture::real_matrix({{"1", "0"}, {"0", "-x1^2"}});
    PsdReport rep = check_psd_on_grid(bad, square_grid(-2, 2, 5), kPolicy);
    CHECK(!rep.pass);
    CHECK(rep.min_eigenvalue < -1e-9);
  }
  SUBCASE("asymmetric input is rejected") {
    CMatrix asym = CircuitFixture::real_matrix({{"1", "1"}, {"0", "1"}});
    CHECK_THROWS_WITH_AS(check_psd_on_grid(asym, square_grid(-1, 1, 3), kPolicy),
                         doctest::Contains("symmetric"), Error);
  }
}
