#ifndef DREKIT_POLY_HPP
#define DREKIT_POLY_HPP

#include "drekit/expr.hpp"

#include <map>
#include <vector>

namespace drekit {

/// Exponent vector; trailing zeros are trimmed so slot count is implicit.
using Monomial = std::vector<std::uint32_t>;

std::uint64_t total_degree(const Monomial& m);

/// Graded-lexicographic, descending: higher total degree first, ties broken
/// by the earlier slot having the larger exponent. map.begin() is the
/// leading term and iteration order is the printing order.
struct GrlexDesc {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial with exact rational coefficients.
/// Slots are assigned by the canonicalizer: x1..xn, then t, then atoms.
class Poly {
 public:
  using TermMap = std::map<Monomial, Rational, GrlexDesc>;

  Poly() = default;
  static Poly constant(const Rational& r);
  static Poly var(std::size_t slot);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  const Rational& leading_coeff() const;
  const Monomial& leading_monomial() const;
  Rational constant_value() const;  // requires is_constant()

  std::uint32_t degree_in(std::size_t slot) const;
  bool depends_on(std::size_t slot) const;
  std::size_t max_slot_plus_one() const;

  const TermMap& terms() const { return terms_; }

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

  Poly scaled(const Rational& c) const;
  Poly pow(std::uint32_t k) const;

  void add_term(Monomial m, Rational c);

 private:
  TermMap terms_;
};

/// Divide a by b exactly; throws if b does not divide a.
Poly div_exact(const Poly& a, const Poly& b);

/// GCD over the rationals, returned primitive over the integers with a
/// positive leading coefficient (1 for coprime inputs).
Poly poly_gcd(const Poly& a, const Poly& b);

/// Reduced fraction of polynomials. Canonical form: gcd removed and the
/// denominator scaled monic (leading coefficient 1 in grlex order).
struct RationalFunction {
  Poly num;
  Poly den;  // never the zero polynomial

  void reduce();
};

RationalFunction rf_add(const RationalFunction& a, const RationalFunction& b);
RationalFunction rf_mul(const RationalFunction& a, const RationalFunction& b);
RationalFunction rf_div(const RationalFunction& a, const RationalFunction& b);
RationalFunction rf_neg(const RationalFunction& a);
RationalFunction rf_pow(const RationalFunction& a, int k);

}  // namespace drekit

#endif
