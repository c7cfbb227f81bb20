#ifndef DREKIT_ZEROTEST_HPP
#define DREKIT_ZEROTEST_HPP

#include "drekit/expr.hpp"

#include <cstdint>
#include <optional>

namespace drekit {

/// Sampling policy behind every probabilistic symbolic-zero decision.
/// Deterministic for a fixed seed.
struct ZeroTestPolicy {
  int samples = 20;
  double half_width = 1.0;
  double center = 0.0;
  double tol_abs = 1e-9;
  double tol_rel = 1e-9;
  int retry_cap = 8;
  std::uint64_t seed = 0x5eedUL;

  void validate() const;
};

enum class Verdict : std::uint8_t { Zero, NonZero, Inconclusive };

/// Outcome of a zero test, with the evidence that produced it.
struct ZeroCertificate {
  Verdict verdict = Verdict::Inconclusive;
  bool exact = false;        // decided by canonicalization, no sampling
  int points_sampled = 0;
  double max_abs = 0.0;      // largest |value| seen over the samples
  std::optional<EvalPoint> witness;  // a point where the value was nonzero

  bool is_zero() const { return verdict == Verdict::Zero; }
  bool is_nonzero() const { return verdict == Verdict::NonZero; }
  bool inconclusive() const { return verdict == Verdict::Inconclusive; }
};

/// Decide whether e vanishes identically: exact cancellation first, then
/// sampling at `samples` finite points, resampling per point up to the
/// retry cap. Inconclusive when finite evaluations cannot be found.
ZeroCertificate test_zero(const Expr& e, const ZeroTestPolicy& policy);

/// Merge entrywise certificates: NonZero dominates, then Inconclusive.
ZeroCertificate merge_certificates(const ZeroCertificate& a, const ZeroCertificate& b);

}  // namespace drekit

#endif
