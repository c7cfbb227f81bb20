#include "drekit/model.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace drekit {

using nlohmann::json;
using nlohmann::ordered_json;

CExpr parse_complex_entry(const std::string& text, int n) {
  auto at = text.find('@');
  if (at == std::string::npos) return CExpr(parse(text, n));
  return CExpr(parse(text.substr(0, at), n), parse(text.substr(at + 1), n));
}

namespace {

CMatrix parse_matrix(const json& j, int n, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw SchemaError(what + ": expected a non-empty array of rows");
  std::size_t cols = 0;
  std::vector<std::vector<CExpr>> rows;
  for (const auto& jr : j) {
    if (!jr.is_array() || jr.empty())
      throw SchemaError(what + ": each row must be a non-empty array");
    if (cols == 0) cols = jr.size();
    if (jr.size() != cols) throw SchemaError(what + ": ragged rows");
    std::vector<CExpr> row;
    for (const auto& je : jr) {
      if (!je.is_string()) throw SchemaError(what + ": entries must be strings");
      try {
        row.push_back(parse_complex_entry(je.get<std::string>(), n));
      } catch (const ParseError& e) {
        throw SchemaError(what + ": " + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  CMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      m.at(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

CMatrix parse_column(const json& j, int n, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw SchemaError(what + ": expected a non-empty array of entries");
  CMatrix m(static_cast<int>(j.size()), 1);
  for (int r = 0; r < m.rows(); ++r) {
    const auto& je = j[static_cast<std::size_t>(r)];
    if (!je.is_string()) throw SchemaError(what + ": entries must be strings");
    try {
      m.at(r, 0) = parse_complex_entry(je.get<std::string>(), n);
    } catch (const ParseError& e) {
      throw SchemaError(what + ": " + e.what());
    }
  }
  return m;
}

void require_dims(const CMatrix& m, int rows, int cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols)
    throw SchemaError(what + ": expected " + std::to_string(rows) + "x" +
                      std::to_string(cols) + ", got " + std::to_string(m.rows()) +
                      "x" + std::to_string(m.cols()));
}

}  // namespace

namespace {

ModelFile parse_model_object(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("model file must be a JSON object");

  ModelFile mf;
  mf.name = j.value("name", "unnamed");
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw SchemaError("missing integer field n");
  mf.n = j["n"].get<int>();
  if (mf.n < 1) throw SchemaError("n must be >= 1");
  mf.m = j.value("m", 0);

  if (!j.contains("f") || !j["f"].is_array() ||
      static_cast<int>(j["f"].size()) != mf.n)
    throw SchemaError("f must be an array of n expression strings");
  mf.f.n = mf.n;
  for (const auto& jc : j["f"]) {
    if (!jc.is_string()) throw SchemaError("f components must be strings");
    try {
      mf.f.components.push_back(parse(jc.get<std::string>(), mf.n));
    } catch (const ParseError& e) {
      throw SchemaError(std::string("f: ") + e.what());
    }
  }

  auto grab = [&](const char* key, std::optional<CMatrix>& slot, int rows, int cols) {
    if (!j.contains(key)) return;
    CMatrix m = parse_matrix(j[key], mf.n, key);
    require_dims(m, rows, cols, key);
    slot = std::move(m);
  };
  grab("A", mf.A, mf.n, mf.n);
  grab("R", mf.R, mf.n, mf.n);
  grab("Q", mf.Q, mf.n, mf.n);
  grab("X", mf.X, mf.n, mf.n);
  grab("U", mf.U, mf.n, mf.n);
  grab("V", mf.V, mf.n, mf.n);
  if (j.contains("B")) {
    CMatrix b = parse_matrix(j["B"], mf.n, "B");
    if (b.rows() != mf.n) throw SchemaError("B must have n rows");
    if (mf.m == 0) mf.m = b.cols();
    require_dims(b, mf.n, mf.m, "B");
    mf.B = std::move(b);
  }

  if (j.contains("Lambda")) {
    const auto& jl = j["Lambda"];
    if (!jl.is_array() || static_cast<int>(jl.size()) != mf.n)
      throw SchemaError("Lambda must list n diagonal entries (null allowed)");
    std::vector<std::optional<CExpr>> diag;
    for (const auto& je : jl) {
      if (je.is_null()) {
        diag.emplace_back(std::nullopt);
      } else if (je.is_string()) {
        diag.emplace_back(parse_complex_entry(je.get<std::string>(), mf.n));
      } else {
        throw SchemaError("Lambda entries must be strings or null");
      }
    }
    mf.lambda_diag = std::move(diag);
  }

  if (j.contains("eigenpairs")) {
    if (!j["eigenpairs"].is_array()) throw SchemaError("eigenpairs must be an array");
    for (const auto& jp : j["eigenpairs"]) {
      EigenPair p;
      std::string side = jp.value("side", "right");
      if (side == "right") p.side = EigenSide::Right;
      else if (side == "left") p.side = EigenSide::Left;
      else throw SchemaError("eigenpair side must be left or right");
      if (!jp.contains("lambda") || !jp["lambda"].is_string())
        throw SchemaError("eigenpair needs a lambda string");
      p.lambda = parse_complex_entry(jp["lambda"].get<std::string>(), mf.n);
      if (!jp.contains("vector"))
        throw SchemaError("eigenpair needs a vector");
      p.vector = parse_column(jp["vector"], mf.n, "eigenpair vector");
      p.label = jp.value("label", "");
      mf.eigenpairs.push_back(std::move(p));
    }
  }

  if (j.contains("controller")) {
    if (!j["controller"].is_array())
      throw SchemaError("controller must be an array of expression strings");
    for (const auto& jc : j["controller"]) {
      if (!jc.is_string()) throw SchemaError("controller components must be strings");
      mf.controller.push_back(parse(jc.get<std::string>(), mf.n));
    }
  }

  if (j.contains("policy")) {
    const auto& jp = j["policy"];
    mf.policy.seed = jp.value("seed", mf.policy.seed);
    mf.policy.samples = jp.value("samples", mf.policy.samples);
    mf.policy.tol_abs = jp.value("tol_abs", mf.policy.tol_abs);
    mf.policy.tol_rel = jp.value("tol_rel", mf.policy.tol_rel);
    mf.policy.half_width = jp.value("half_width", mf.policy.half_width);
    mf.policy.center = jp.value("center", mf.policy.center);
    mf.policy.retry_cap = jp.value("retry_cap", mf.policy.retry_cap);
  }
  if (j.contains("grid")) {
    if (!j["grid"].is_string()) throw SchemaError("grid must be a spec string");
    mf.grid_spec = j["grid"].get<std::string>();
  }
  return mf;
}

}  // namespace

ModelFile parse_model_json(const std::string& text) {
  // Anything wrong with the file contents, expression syntax included,
  // is an input error for the caller (CLI exit code 2).
  try {
    return parse_model_object(text);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_json(buf.str());
}

CMatrix ModelFile::effective_A() const {
  if (A) return *A;
  return jacobian(f);
}

CMatrix ModelFile::effective_R() const {
  if (R) return *R;
  if (B) return *B * B->transpose();
  throw SchemaError("model needs R or B");
}

RiccatiData ModelFile::riccati_data() const {
  if (!Q) throw SchemaError("model needs Q");
  return RiccatiData{effective_A(), effective_R(), *Q, f};
}

ControlModel ModelFile::control_model() const {
  if (!B) throw SchemaError("model needs B for controller work");
  if (!X) throw SchemaError("model needs X for controller work");
  if (!Q) throw SchemaError("model needs Q for controller work");
  return ControlModel{f, *B, *X, *Q};
}

SubspaceBasis ModelFile::subspace_basis() const {
  if (!U || !V) throw SchemaError("model needs U and V");
  SubspaceBasis b;
  b.U = *U;
  b.V = *V;
  b.diag_lambda = lambda_diag;
  return b;
}

std::vector<EvalPoint> parse_grid_spec(const std::string& spec) {
  std::vector<std::tuple<double, double, int>> groups;
  std::stringstream ss(spec);
  std::string group;
  while (std::getline(ss, group, ';')) {
    double lo = 0, hi = 0;
    int steps = 0;
    char c1 = 0, c2 = 0;
    std::stringstream gs(group);
    if (!(gs >> lo >> c1 >> hi >> c2 >> steps) || c1 != ',' || c2 != ',' || steps < 1)
      throw SchemaError("bad grid group '" + group + "', expected lo,hi,steps");
    groups.emplace_back(lo, hi, steps);
  }
  if (groups.empty()) throw SchemaError("empty grid spec");

  std::vector<EvalPoint> out;
  std::vector<int> idx(groups.size(), 0);
  for (;;) {
    EvalPoint p;
    p.x.resize(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
      auto [lo, hi, steps] = groups[i];
      p.x[i] = steps == 1 ? lo
                          : lo + (hi - lo) * idx[i] / static_cast<double>(steps - 1);
    }
    out.push_back(std::move(p));
    std::size_t i = groups.size();
    while (i-- > 0) {
      if (++idx[i] < std::get<2>(groups[i])) break;
      idx[i] = 0;
      if (i == 0) return out;
    }
  }
}

std::vector<EvalPoint> ModelFile::grid(int steps_default, double lo, double hi) const {
  if (grid_spec) return parse_grid_spec(*grid_spec);
  std::string spec;
  for (int i = 0; i < n; ++i) {
    if (i) spec += ';';
    spec += std::to_string(lo) + "," + std::to_string(hi) + "," +
            std::to_string(steps_default);
  }
  return parse_grid_spec(spec);
}

// ---------------------------------------------------------------------------

Certificate::Certificate(std::string command, std::string model, std::uint64_t seed)
    : command_(std::move(command)), model_(std::move(model)), seed_(seed) {}

void Certificate::add(const std::string& name, const CheckResult& r) {
  Row row;
  row.name = name;
  row.verdict = r.pass ? "pass" : "fail";
  row.note = r.note;
  row.has_cert = true;
  row.exact = r.cert.exact;
  row.points = r.cert.points_sampled;
  row.max_abs = r.cert.max_abs;
  rows_.push_back(std::move(row));
  all_pass_ = all_pass_ && r.pass;
}

void Certificate::add_pass(const std::string& name, bool pass, const std::string& note) {
  Row row;
  row.name = name;
  row.verdict = pass ? "pass" : "fail";
  row.note = note;
  rows_.push_back(std::move(row));
  all_pass_ = all_pass_ && pass;
}

void Certificate::add_value(const std::string& name, const std::string& value) {
  Row row;
  row.name = name;
  row.verdict = "info";
  row.value = value;
  rows_.push_back(std::move(row));
}

void Certificate::add_assumption(const std::string& text) {
  assumptions_.push_back(text);
}

std::string Certificate::dump() const {
  ordered_json j;
  j["tool"] = "drekit";
  j["command"] = command_;
  j["model"] = model_;
  j["seed"] = seed_;
  j["pass"] = all_pass_;
  j["checks"] = ordered_json::array();
  for (const auto& r : rows_) {
    ordered_json c;
    c["name"] = r.name;
    c["verdict"] = r.verdict;
    if (r.has_cert) {
      c["exact"] = r.exact;
      c["points_sampled"] = r.points;
      c["max_abs_residual"] = r.max_abs;
    }
    if (!r.value.empty()) c["value"] = r.value;
    if (!r.note.empty()) c["note"] = r.note;
    j["checks"].push_back(std::move(c));
  }
  if (!assumptions_.empty()) j["assumptions"] = assumptions_;
  return j.dump(2) + "\n";
}

}  // namespace drekit
