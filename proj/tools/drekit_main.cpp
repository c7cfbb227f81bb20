// drekit: verify Riccati-equation solutions over function fields, check
// eigenpair and invariant-subspace certificates, synthesize contraction
// controllers, and simulate the resulting closed loops.

#include "drekit/model.hpp"
#include "drekit/sim.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

namespace {

using namespace drekit;

struct CliOptions {
  std::string model_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol_abs, tol_rel;
  std::optional<std::string> grid;
  double t1 = 20.0;
  double h = 1e-3;
  std::string x0;
  std::string out;
  std::string svg;
  std::string pair = "all";
  std::string skip_columns;
};

void apply_policy_overrides(ModelFile& mf, const CliOptions& opt) {
  if (const char* env = std::getenv("DREKIT_SEED")) {
    mf.policy.seed = std::strtoull(env, nullptr, 10);
  }
  if (opt.seed) mf.policy.seed = *opt.seed;
  if (opt.samples) mf.policy.samples = *opt.samples;
  if (opt.tol_abs) mf.policy.tol_abs = *opt.tol_abs;
  if (opt.tol_rel) mf.policy.tol_rel = *opt.tol_rel;
  if (opt.grid) mf.grid_spec = *opt.grid;
}

std::set<int> parse_skip_columns(const std::string& s) {
  std::set<int> skip;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int idx = std::stoi(item);
    if (idx < 1) throw SchemaError("--skip-columns entries are 1-based");
    skip.insert(idx - 1);
  }
  return skip;
}

std::vector<double> parse_vector_list(const std::string& s, int n) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (static_cast<int>(v.size()) != n)
    throw SchemaError("--x0 needs " + std::to_string(n) + " comma-separated values");
  return v;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

int finish(const Certificate& cert, const std::string& out_path) {
  write_output(out_path, cert.dump());
  return cert.all_pass() ? 0 : 1;
}

// --- verify-dre -------------------------------------------------------------

int cmd_verify_dre(ModelFile& mf, const CliOptions& opt) {
  Certificate cert("verify-dre", mf.name, mf.policy.seed);
  if (!mf.X) throw SchemaError("verify-dre needs X in the model");
  RiccatiData d = mf.riccati_data();
  d.validate(mf.policy);

  ZeroCertificate sym = test_zero(*mf.X - mf.X->transpose(), mf.policy);
  cert.add("X symmetric", CheckResult{sym.is_zero(), sym, ""});

  ZeroCertificate res = test_zero(dre_residual(*mf.X, d), mf.policy);
  cert.add("equation residual", CheckResult{res.is_zero(), res, ""});

  if (sym.is_zero()) {
    PsdReport psd = check_psd_on_grid(*mf.X, mf.grid(), mf.policy, true, 0.0);
    cert.add_pass("positive definite on grid", psd.pass,
                  "min eigenvalue " + std::to_string(psd.min_eigenvalue) + " over " +
                      std::to_string(psd.per_point.size()) + " points");
  } else {
    cert.add_pass("positive definite on grid", false, "skipped: X not symmetric");
  }
  return finish(cert, opt.out);
}

// --- eig ---------------------------------------------------------------------

int cmd_eig(ModelFile& mf, const CliOptions& opt) {
  Certificate cert("eig", mf.name, mf.policy.seed);
  RiccatiData d = mf.riccati_data();
  CMatrix H = build_hamiltonian(d, mf.policy);

  cert.add("J-skew identity", check_J_skew(H, mf.policy));

  std::vector<std::size_t> indices;
  if (opt.pair == "all") {
    for (std::size_t i = 0; i < mf.eigenpairs.size(); ++i) indices.push_back(i);
  } else {
    int idx = std::stoi(opt.pair);
    if (idx < 0 || idx >= static_cast<int>(mf.eigenpairs.size()))
      throw SchemaError("--pair index out of range");
    indices.push_back(static_cast<std::size_t>(idx));
  }
  if (indices.empty()) cert.add_assumption("no eigenpairs listed; nothing to verify");

  CMatrix Jinv = -symplectic_J(d.n());
  for (std::size_t i : indices) {
    const EigenPair& p = mf.eigenpairs[i];
    std::string tag = p.label.empty() ? "pair " + std::to_string(i) : p.label;
    if (p.side == EigenSide::Right) {
      cert.add(tag + " right eigenpair", check_right_eigenpair(H, p, d.f, mf.policy));
      EigenPair refl{EigenSide::Left, -p.lambda, Jinv * p.vector, tag + " reflected"};
      cert.add(tag + " left reflection", check_left_eigenpair(H, refl, d.f, mf.policy));
    } else {
      cert.add(tag + " left eigenpair", check_left_eigenpair(H, p, d.f, mf.policy));
      EigenPair refl{EigenSide::Right, -p.lambda, symplectic_J(d.n()) * p.vector,
                     tag + " reflected"};
      cert.add(tag + " right reflection", check_right_eigenpair(H, refl, d.f, mf.policy));
    }
  }
  return finish(cert, opt.out);
}

// --- solve -------------------------------------------------------------------

int cmd_solve(ModelFile& mf, const CliOptions& opt) {
  Certificate cert("solve", mf.name, mf.policy.seed);
  RiccatiData d = mf.riccati_data();
  SubspaceBasis b = mf.subspace_basis();
  std::set<int> skip = parse_skip_columns(opt.skip_columns);

  CMatrix X;
  try {
    X = solve_from_subspace(b, d, mf.policy, skip);
  } catch (const Error& e) {
    cert.add_pass("solution from subspace", false, e.what());
    return finish(cert, opt.out);
  }
  cert.add_pass("solution from subspace", true,
                skip.empty() ? "" : "invariance residual skipped on listed columns");
  for (int r = 0; r < X.rows(); ++r)
    for (int c = 0; c < X.cols(); ++c)
      cert.add_value("X[" + std::to_string(r + 1) + "][" + std::to_string(c + 1) + "]",
                     X.at(r, c).simplified().str());

  GramSymmetry g = check_gram_symmetry(b, mf.policy);
  cert.add("U*V Hermitian", g.hermitian);
  cert.add("U^T V symmetric", g.symmetric);

  if (b.diag_lambda) {
    std::vector<std::pair<CExpr, int>> pairs;
    for (int i = 0; i < b.n(); ++i)
      if ((*b.diag_lambda)[static_cast<std::size_t>(i)] && !skip.count(i))
        pairs.emplace_back(*(*b.diag_lambda)[static_cast<std::size_t>(i)], i);
    if (!pairs.empty())
      cert.add("closed-loop spectrum", check_closedloop_spectrum(b, X, d, pairs, mf.policy));
    if (b.has_full_diagonal())
      cert.add("Lyapunov relation", check_lyapunov_relation(b, d, mf.policy));
  }

  if (mf.X) {
    ZeroCertificate match = test_zero(X - *mf.X, mf.policy);
    cert.add("matches bundled X", CheckResult{match.is_zero(), match, ""});
  }

  ZeroCertificate sym = test_zero(X - X.transpose(), mf.policy);
  cert.add("X symmetric", CheckResult{sym.is_zero(), sym, ""});
  if (sym.is_zero()) {
    PsdReport psd = check_psd_on_grid(X, mf.grid(), mf.policy, true, 0.0);
    cert.add_pass("positive definite on grid", psd.pass,
                  "min eigenvalue " + std::to_string(psd.min_eigenvalue));
  }
  CMatrix H = build_hamiltonian(d, mf.policy);
  if (H.all_entries_constant()) {
    double min_re = std::numeric_limits<double>::infinity();
    for (const auto& p : constant_eigendecomposition(H))
      min_re = std::min(min_re,
                        std::abs(p.lambda.re().constant_value().convert_to<double>()));
    cert.add_pass("spectrum away from the imaginary axis", min_re > 1e-9,
                  "min |Re| = " + std::to_string(min_re));
  } else {
    cert.add_assumption(
        "imaginary-axis spectrum hypothesis not machine-checked for a "
        "non-constant Hamiltonian");
  }
  return finish(cert, opt.out);
}

// --- synthesize ----------------------------------------------------------------

int cmd_synthesize(ModelFile& mf, const CliOptions& opt) {
  Certificate cert("synthesize", mf.name, mf.policy.seed);
  ControlModel cm = mf.control_model();

  CheckResult integ = check_integrability(cm, mf.policy);
  cert.add("integrability", integ);
  if (!integ.pass) return finish(cert, opt.out);

  SynthesisResult s = synthesize_controller(cm, mf.policy);
  if (!s.symbolic) {
    cert.add_pass("symbolic controller", false, s.note);
    cert.add_assumption("controller available through quadrature evaluation only");
    return finish(cert, opt.out);
  }
  for (std::size_t l = 0; l < s.k.size(); ++l)
    cert.add_value("k[" + std::to_string(l + 1) + "]", to_string(s.k[l]));
  cert.add("gradient dk/dx = B^T X", s.gradient_check);

  ContractionReport rep = check_contraction_identity(cm, s.k, mf.grid(), mf.policy);
  cert.add("contraction identity", rep.identity);
  cert.add_pass("right side negative on grid", rep.rhs_negative,
                "max eigenvalue " + std::to_string(rep.max_rhs_eigenvalue));
  return finish(cert, opt.out);
}

// --- simulate / portrait --------------------------------------------------------

VectorField effective_field(ModelFile& mf, Certificate* cert) {
  if (!mf.controller.empty()) {
    ControlModel cm = mf.control_model();
    return closed_loop_field(cm, mf.controller);
  }
  if (mf.B && mf.X && mf.Q) {
    ControlModel cm = mf.control_model();
    SynthesisResult s = synthesize_controller(cm, mf.policy);
    if (s.symbolic) {
      if (cert) cert->add_assumption("closed loop uses the synthesized controller");
      return closed_loop_field(cm, s.k);
    }
  }
  return mf.f;
}

int cmd_simulate(ModelFile& mf, const CliOptions& opt) {
  VectorField field = effective_field(mf, nullptr);
  std::vector<double> x0(static_cast<std::size_t>(mf.n), 1.0);
  if (!opt.x0.empty()) x0 = parse_vector_list(opt.x0, mf.n);
  Trajectory t = integrate(field, x0, 0.0, opt.t1, opt.h);
  std::string csv = csv_header(mf.n) + "\n" + trajectory_csv(t, 0);
  write_output(opt.out, csv);
  if (t.truncated)
    std::cerr << "warning: trajectory truncated by the divergence guard\n";
  return 0;
}

int cmd_portrait(ModelFile& mf, const CliOptions& opt) {
  if (mf.n != 2) throw SchemaError("portraits need a planar model (n = 2)");
  VectorField field = effective_field(mf, nullptr);

  std::string spec = opt.grid.value_or("-2,2,5;-2,2,5");
  std::vector<EvalPoint> starts = parse_grid_spec(spec);
  std::vector<std::vector<double>> x0s;
  x0s.reserve(starts.size());
  for (const auto& p : starts) x0s.push_back(p.x);

  write_output(opt.out, phase_portrait_csv(field, x0s, opt.t1, opt.h));

  if (!opt.svg.empty()) {
    std::vector<Trajectory> ts;
    ts.reserve(x0s.size());
    for (const auto& x0 : x0s) ts.push_back(integrate(field, x0, 0.0, opt.t1, opt.h));
    write_output(opt.svg, portrait_svg(ts));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "drekit: Riccati-equation certificates over function fields, contraction "
      "controller synthesis, and closed-loop simulation"};
  app.require_subcommand(1);

  app.set_help_flag("--help", "print help and exit");

  CliOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print help and exit");
    sub->add_option("model", opt.model_path, "model JSON file")->required();
    sub->add_option("--seed", opt.seed, "zero-test RNG seed (overrides DREKIT_SEED)");
    sub->add_option("--samples", opt.samples, "zero-test sample count");
    sub->add_option("--tol-abs", opt.tol_abs, "zero-test absolute tolerance");
    sub->add_option("--tol-rel", opt.tol_rel, "zero-test relative tolerance");
    sub->add_option("--grid", opt.grid,
                    "grid spec lo,hi,steps;lo,hi,steps (definiteness checks and "
                    "portrait starts)");
    sub->add_option("--out", opt.out, "write output to this path instead of stdout");
    return sub;
  };

  auto* verify = add_common(app.add_subcommand("verify-dre",
                                               "check a bundled solution candidate"));
  auto* eig = add_common(app.add_subcommand("eig", "verify listed eigenpairs"));
  eig->add_option("--pair", opt.pair, "eigenpair index to verify, or 'all'");
  auto* solve = add_common(app.add_subcommand("solve", "build X from the U,V basis"));
  solve->add_option("--skip-columns", opt.skip_columns,
                    "1-based basis columns to exclude from the symbolic "
                    "invariance residual");
  auto* synth = add_common(app.add_subcommand("synthesize",
                                              "integrate the feedback potential"));
  auto* sim = add_common(app.add_subcommand("simulate", "integrate one trajectory"));
  sim->add_option("--t1", opt.t1, "final time");
  sim->add_option("--h", opt.h, "step size");
  sim->add_option("--x0", opt.x0, "initial state v1,v2,...");
  auto* por = add_common(app.add_subcommand(
      "portrait", "trajectories from a grid of starts (CSV, optional SVG)"));
  por->add_option("--t1", opt.t1, "final time");
  por->add_option("--h", opt.h, "step size");
  por->add_option("--svg", opt.svg,
                  "also draw the planar portrait as polylines into this SVG file");

  CLI11_PARSE(app, argc, argv);

  try {
    ModelFile mf = load_model(opt.model_path);
    apply_policy_overrides(mf, opt);
    if (verify->parsed()) return cmd_verify_dre(mf, opt);
    if (eig->parsed()) return cmd_eig(mf, opt);
    if (solve->parsed()) return cmd_solve(mf, opt);
    if (synth->parsed()) return cmd_synthesize(mf, opt);
    if (sim->parsed()) return cmd_simulate(mf, opt);
    if (por->parsed()) return cmd_portrait(mf, opt);
  } catch (const SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
