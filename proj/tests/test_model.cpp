#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "drekit/model.hpp"

using namespace drekit;

namespace {

const ZeroTestPolicy kPolicy;

const char* kMinimal = R"json({
  "name": "m", "n": 2,
  "f": ["(-x1+x2)/(1+x1^2)", "x1 - x2"],
  "B": [["0"], ["1"]],
  "Q": [["3 + 4*x1^2 + x1^4", "0"], ["0", "1"]]
})json";

}  // namespace

TEST_CASE("model defaults: A from the Jacobian, R from B") {
  ModelFile mf = parse_model_json(kMinimal);
  CHECK(mf.name == "m");
  CHECK(mf.m == 1);

  CMatrix A = mf.effective_A();
  CHECK(test_zero(A.at(0, 0) - CExpr(parse("-(1+2*x1*x2-x1^2)/(1+x1^2)^2", 2)), kPolicy)
            .is_zero());

  CMatrix R = mf.effective_R();
  CHECK(test_zero(R.at(0, 0), kPolicy).is_zero());
  CHECK(test_zero(R.at(1, 1) - CExpr(Expr::integer(1)), kPolicy).is_zero());
  CHECK(test_zero(R - R.transpose(), kPolicy).is_zero());

  RiccatiData d = mf.riccati_data();
  d.validate(kPolicy);
}

TEST_CASE("schema violations are reported") {
  CHECK_THROWS_AS(parse_model_json("not json"), SchemaError);
  CHECK_THROWS_AS(parse_model_json(R"({"n": 2})"), SchemaError);
  CHECK_THROWS_AS(parse_model_json(R"({"n": 2, "f": ["x1"]})"), SchemaError);
  // Ragged matrix.
  CHECK_THROWS_AS(parse_model_json(R"({
    "n": 2, "f": ["x1", "x2"], "Q": [["1", "0"], ["0"]]
  })"),
                  SchemaError);
  // Wrong dimensions.
  CHECK_THROWS_AS(parse_model_json(R"({
    "n": 2, "f": ["x1", "x2"], "X": [["1"]]
  })"),
                  SchemaError);
  // Variable out of range inside an expression.
  CHECK_THROWS_AS(parse_model_json(R"({
    "n": 2, "f": ["x1", "x3"]
  })"),
                  SchemaError);
}

TEST_CASE("complex entries use the re @ im form") {
  CExpr z = parse_complex_entry("0 @ 1", 2);
  CHECK(z.re().is_zero_literal());
  CHECK(z.im().is_one_literal());
  CExpr w = parse_complex_entry("x1 @ -x2", 2);
  CHECK(test_zero(w - CExpr(parse("x1", 2), parse("-x2", 2)), kPolicy).is_zero());
  CHECK(test_zero(parse_complex_entry("1/(1+x1^2)", 2) -
                      CExpr(parse("1/(1+x1^2)", 2)),
                  kPolicy)
            .is_zero());
}

TEST_CASE("grid spec parsing") {
  auto g = parse_grid_spec("-1,1,3;0,2,2");
  REQUIRE(g.size() == 6);
  CHECK(g[0].x == std::vector<double>{-1.0, 0.0});
  CHECK(g[1].x == std::vector<double>{-1.0, 2.0});
  CHECK(g[5].x == std::vector<double>{1.0, 2.0});
  for (const auto& p : g) CHECK(p.t == 0.0);

  CHECK_THROWS_AS(parse_grid_spec(""), SchemaError);
  CHECK_THROWS_AS(parse_grid_spec("1,2"), SchemaError);
  CHECK_THROWS_AS(parse_grid_spec("1,2,0"), SchemaError);
}

TEST_CASE("policy overrides and Lambda entries load") {
  ModelFile mf = parse_model_json(R"({
    "n": 2, "f": ["x2", "-x1"],
    "Lambda": ["-1", null],
    "policy": {"seed": 42, "samples": 7, "tol_abs": 1e-8}
  })");
  CHECK(mf.policy.seed == 42);
  CHECK(mf.policy.samples == 7);
  CHECK(mf.policy.tol_abs == 1e-8);
  REQUIRE(mf.lambda_diag.has_value());
  CHECK(mf.lambda_diag->size() == 2);
  CHECK((*mf.lambda_diag)[0].has_value());
  CHECK(!(*mf.lambda_diag)[1].has_value());
}

TEST_CASE("certificates are deterministic and schema-stable") {
  Certificate a("verify-dre", "m", 7);
  ZeroCertificate z;
  z.verdict = Verdict::Zero;
  z.exact = true;
  a.add("check one", CheckResult{true, z, ""});
  a.add_pass("check two", false, "witness at x");
  a.add_assumption("grid limited to the box");

  Certificate b("verify-dre", "m", 7);
  b.add("check one", CheckResult{true, z, ""});
  b.add_pass("check two", false, "witness at x");
  b.add_assumption("grid limited to the box");

  CHECK(a.dump() == b.dump());
  CHECK(!a.all_pass());
  CHECK(a.dump().find("\"tool\": \"drekit\"") != std::string::npos);
  CHECK(a.dump().find("\"pass\": false") != std::string::npos);
}

TEST_CASE("bundled models load and validate") {
  ModelFile circuit = load_model(std::string(DREKIT_MODELS_DIR) + "/rl_circuit.json");
  CHECK(circuit.n == 2);
  CHECK(circuit.X.has_value());
  CHECK(circuit.U.has_value());
  CHECK(circuit.eigenpairs.size() == 1);
  circuit.riccati_data().validate(circuit.policy);

  ModelFile di = load_model(std::string(DREKIT_MODELS_DIR) + "/double_integrator.json");
  CHECK(di.A.has_value());
  di.riccati_data().validate(di.policy);
}
