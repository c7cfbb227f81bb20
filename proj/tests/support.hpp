#ifndef DREKIT_TESTS_SUPPORT_HPP
#define DREKIT_TESTS_SUPPORT_HPP

#include "drekit/expr.hpp"
#include "drekit/zerotest.hpp"

#include <random>

namespace drekit::testing {

/// Random expression generator for property tests. Rational subclass by
/// default; enable_funcs mixes in sin/cos/exp applications.
class ExprGen {
 public:
  ExprGen(std::uint64_t seed, int n_vars, bool enable_funcs = false)
      : rng_(seed), n_vars_(n_vars), enable_funcs_(enable_funcs) {}

  Expr operator()(int max_depth = 5) { return gen(max_depth); }

  /// Random expression that does not test zero under the given policy.
  Expr nonzero(const ZeroTestPolicy& policy, int max_depth = 4) {
    for (int i = 0; i < 64; ++i) {
      Expr e = gen(max_depth);
      if (test_zero(e, policy).is_nonzero()) return e;
    }
    // Fall back to something trivially nonzero.
    return Expr::integer(1) + Expr::power(Expr::variable(1), 2);
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  int n_vars_;
  bool enable_funcs_;

  int pick(int n) {
    return static_cast<int>(rng_() % static_cast<std::uint64_t>(n));
  }

  Expr leaf() {
    switch (pick(4)) {
      case 0: return Expr::integer(pick(9) - 4);
      case 1: return Expr::constant(Rational(pick(7) + 1, pick(4) + 1));
      default: return Expr::variable(pick(n_vars_) + 1);
    }
  }

  Expr gen(int depth) {
    if (depth <= 0) return leaf();
    int kinds = enable_funcs_ ? 7 : 6;
    switch (pick(kinds)) {
      case 0: return leaf();
      case 1: return gen(depth - 1) + gen(depth - 1);
      case 2: return gen(depth - 1) - gen(depth - 1);
      case 3: return gen(depth - 1) * gen(depth - 1);
      case 4: {
        // Denominator kept away from the zero function.
        Expr d = Expr::integer(1) + Expr::power(gen(0), 2);
        return Expr::quotient(gen(depth - 1), d);
      }
      case 5:
        // Leaf bases only: nested powers of compound subtrees push the
        // expanded degree beyond what exact canonicalization should chew
        // on in a unit test.
        return Expr::power(leaf(), pick(3) + 1);
      default: {
        FuncKind f = pick(2) == 0 ? FuncKind::Sin : FuncKind::Cos;
        return Expr::apply(f, gen(depth - 1));
      }
    }
  }
};

inline EvalPoint random_point(std::mt19937_64& rng, int n, double half_width = 1.0) {
  std::uniform_real_distribution<double> dist(-half_width, half_width);
  EvalPoint p;
  p.x.resize(static_cast<std::size_t>(n));
  for (auto& xi : p.x) xi = dist(rng);
  p.t = dist(rng);
  return p;
}

}  // namespace drekit::testing

#endif
