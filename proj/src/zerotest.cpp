#include "drekit/zerotest.hpp"

#include <cmath>
#include <random>

namespace drekit {

void ZeroTestPolicy::validate() const {
  if (samples < 1) throw Error("zero-test policy: sample count must be >= 1");
  if (tol_abs <= 0 || tol_rel <= 0) throw Error("zero-test policy: tolerances must be > 0");
  if (half_width <= 0) throw Error("zero-test policy: sampling half-width must be > 0");
  if (retry_cap < 1) throw Error("zero-test policy: retry cap must be >= 1");
}

ZeroCertificate test_zero(const Expr& e, const ZeroTestPolicy& policy) {
  policy.validate();

  // Exact route: cancellation to the literal zero settles it. A nonzero
  // canonical form falls through to sampling, since atoms may hide
  // functional relations and tiny numeric constants are below tolerance.
  try {
    if (simplify(e).is_zero_literal()) {
      ZeroCertificate cert;
      cert.verdict = Verdict::Zero;
      cert.exact = true;
      return cert;
    }
  } catch (const Error&) {
    // Canonicalization revealed a vanishing denominator; sampling decides.
  }

  std::mt19937_64 rng(policy.seed);
  std::uniform_real_distribution<double> dist(policy.center - policy.half_width,
                                              policy.center + policy.half_width);
  int n = e.max_var_index();

  ZeroCertificate cert;
  bool all_within = true;
  for (int i = 0; i < policy.samples; ++i) {
    bool found = false;
    for (int attempt = 0; attempt < policy.retry_cap && !found; ++attempt) {
      EvalPoint p;
      p.x.resize(static_cast<std::size_t>(n));
      for (auto& xi : p.x) xi = dist(rng);
      p.t = dist(rng);
      double v = eval(e, p);
      if (!std::isfinite(v)) continue;
      found = true;
      ++cert.points_sampled;
      double mag = eval_magnitude(e, p);
      if (!std::isfinite(mag)) mag = std::abs(v);
      double tol = policy.tol_abs + policy.tol_rel * mag;
      double av = std::abs(v);
      cert.max_abs = std::max(cert.max_abs, av);
      if (av > tol) {
        all_within = false;
        if (!cert.witness) cert.witness = p;
      }
    }
    if (!found) {
      cert.verdict = Verdict::Inconclusive;
      return cert;
    }
  }
  cert.verdict = all_within ? Verdict::Zero : Verdict::NonZero;
  return cert;
}

ZeroCertificate merge_certificates(const ZeroCertificate& a, const ZeroCertificate& b) {
  ZeroCertificate m;
  if (a.is_nonzero() || b.is_nonzero()) m.verdict = Verdict::NonZero;
  else if (a.inconclusive() || b.inconclusive()) m.verdict = Verdict::Inconclusive;
  else m.verdict = Verdict::Zero;
  m.exact = a.exact && b.exact;
  m.points_sampled = a.points_sampled + b.points_sampled;
  m.max_abs = std::max(a.max_abs, b.max_abs);
  m.witness = a.witness ? a.witness : b.witness;
  return m;
}

}  // namespace drekit
