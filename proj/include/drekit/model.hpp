#ifndef DREKIT_MODEL_HPP
#define DREKIT_MODEL_HPP

#include "drekit/contraction.hpp"
#include "drekit/riccati.hpp"

#include <optional>
#include <string>

namespace drekit {

/// Raised on malformed model files; maps to CLI exit code 2.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A named system loaded from a JSON model file. Matrices are optional;
/// A defaults to df/dx and R to B B^T when B is present.
struct ModelFile {
  std::string name;
  int n = 0;
  int m = 0;
  VectorField f;
  std::optional<CMatrix> A, R, Q, B, X, U, V;
  std::optional<std::vector<std::optional<CExpr>>> lambda_diag;
  std::vector<EigenPair> eigenpairs;
  std::vector<Expr> controller;  // supplied feedback components, may be empty
  ZeroTestPolicy policy;
  std::optional<std::string> grid_spec;

  CMatrix effective_A() const;
  CMatrix effective_R() const;
  RiccatiData riccati_data() const;
  ControlModel control_model() const;
  SubspaceBasis subspace_basis() const;
  std::vector<EvalPoint> grid(int steps_default = 21, double lo = -2.0,
                              double hi = 2.0) const;
};

ModelFile load_model(const std::string& path);
ModelFile parse_model_json(const std::string& text);

/// Scalar entry "re" or "re @ im" over n state variables.
CExpr parse_complex_entry(const std::string& text, int n);

/// Grid spec "lo,hi,steps;lo,hi,steps;..." -> cartesian grid of points,
/// one group per state variable, t = 0, row-major order.
std::vector<EvalPoint> parse_grid_spec(const std::string& spec);

/// Accumulates named check verdicts and renders the JSON certificate.
class Certificate {
 public:
  Certificate(std::string command, std::string model, std::uint64_t seed);

  void add(const std::string& name, const CheckResult& r);
  void add_pass(const std::string& name, bool pass, const std::string& note = "");
  void add_value(const std::string& name, const std::string& value);
  void add_assumption(const std::string& text);

  bool all_pass() const { return all_pass_; }
  std::string dump() const;

 private:
  std::string command_, model_;
  std::uint64_t seed_;
  bool all_pass_ = true;
  struct Row {
    std::string name, verdict, note, value;
    bool has_cert = false;
    bool exact = false;
    int points = 0;
    double max_abs = 0.0;
  };
  std::vector<Row> rows_;
  std::vector<std::string> assumptions_;
};

}  // namespace drekit

#endif
