#include "drekit/poly.hpp"

#include <algorithm>

namespace drekit {

std::uint64_t total_degree(const Monomial& m) {
  std::uint64_t d = 0;
  for (auto e : m) d += e;
  return d;
}

bool GrlexDesc::operator()(const Monomial& a, const Monomial& b) const {
  std::uint64_t da = total_degree(a), db = total_degree(b);
  if (da != db) return da > db;
  std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t ea = i < a.size() ? a[i] : 0;
    std::uint32_t eb = i < b.size() ? b[i] : 0;
    if (ea != eb) return ea > eb;
  }
  return false;
}

namespace {

void trim(Monomial& m) {
  while (!m.empty() && m.back() == 0) m.pop_back();
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  trim(r);
  return r;
}

bool mono_divides(const Monomial& d, const Monomial& m) {
  if (d.size() > m.size()) {
    for (std::size_t i = m.size(); i < d.size(); ++i)
      if (d[i] != 0) return false;
  }
  for (std::size_t i = 0; i < std::min(d.size(), m.size()); ++i)
    if (d[i] > m[i]) return false;
  return true;
}

Monomial mono_div(const Monomial& m, const Monomial& d) {
  Monomial r = m;
  for (std::size_t i = 0; i < d.size(); ++i) r[i] -= d[i];
  trim(r);
  return r;
}

}  // namespace

Poly Poly::constant(const Rational& r) {
  Poly p;
  if (r != 0) p.terms_.emplace(Monomial{}, r);
  return p;
}

Poly Poly::var(std::size_t slot) {
  Poly p;
  Monomial m(slot + 1, 0);
  m[slot] = 1;
  p.terms_.emplace(std::move(m), Rational(1));
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

const Rational& Poly::leading_coeff() const {
  if (terms_.empty()) throw Error("leading coefficient of zero polynomial");
  return terms_.begin()->second;
}

const Monomial& Poly::leading_monomial() const {
  if (terms_.empty()) throw Error("leading monomial of zero polynomial");
  return terms_.begin()->first;
}

Rational Poly::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (!is_constant()) throw Error("polynomial is not constant");
  return terms_.begin()->second;
}

std::uint32_t Poly::degree_in(std::size_t slot) const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_)
    if (slot < m.size()) d = std::max(d, m[slot]);
  return d;
}

bool Poly::depends_on(std::size_t slot) const {
  for (const auto& [m, c] : terms_)
    if (slot < m.size() && m[slot] > 0) return true;
  return false;
}

std::size_t Poly::max_slot_plus_one() const {
  std::size_t n = 0;
  for (const auto& [m, c] : terms_) n = std::max(n, m.size());
  return n;
}

void Poly::add_term(Monomial m, Rational c) {
  if (c == 0) return;
  trim(m);
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(std::move(m), std::move(c));
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b.terms_) r.add_term(m, c);
  return r;
}

Poly operator-(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_)
      r.add_term(mono_mul(ma, mb), ca * cb);
  return r;
}

Poly Poly::scaled(const Rational& c) const {
  Poly r;
  if (c == 0) return r;
  for (const auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
  return r;
}

Poly Poly::pow(std::uint32_t k) const {
  Poly r = Poly::constant(1);
  Poly base = *this;
  while (k) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Exact division (multivariate long division; remainder must vanish).

Poly div_exact(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw Error("polynomial division by zero");
  Poly rem = a, quot;
  const Monomial& lmb = b.leading_monomial();
  const Rational& lcb = b.leading_coeff();
  while (!rem.is_zero()) {
    const Monomial& lm = rem.leading_monomial();
    if (!mono_divides(lmb, lm)) throw Error("inexact polynomial division");
    Monomial q = mono_div(lm, lmb);
    Rational qc = rem.leading_coeff() / lcb;
    quot.add_term(q, qc);
    Poly t;
    t.add_term(std::move(q), std::move(qc));
    rem = rem - t * b;
  }
  return quot;
}

// ---------------------------------------------------------------------------
// GCD via primitive pseudo-remainder sequences.

namespace {

// Integer-primitive normalization: scale so coefficients are coprime
// integers with positive leading coefficient.
Poly normalize_primitive(const Poly& p) {
  if (p.is_zero()) return p;
  BigInt g = 0, l = 1;
  for (const auto& [m, c] : p.terms()) {
    g = boost::multiprecision::gcd(g, numerator(c));
    l = boost::multiprecision::lcm(l, denominator(c));
  }
  Rational scale(l, g);
  if (p.leading_coeff() < 0) scale = -scale;
  return p.scaled(scale);
}

// View of p as a univariate polynomial in `slot` with Poly coefficients.
std::vector<Poly> to_univar(const Poly& p, std::size_t slot) {
  std::vector<Poly> coeffs(p.degree_in(slot) + 1);
  for (const auto& [m, c] : p.terms()) {
    std::uint32_t d = slot < m.size() ? m[slot] : 0;
    Monomial rest = m;
    if (slot < rest.size()) rest[slot] = 0;
    coeffs[d].add_term(std::move(rest), c);
  }
  return coeffs;
}

Poly from_univar(const std::vector<Poly>& coeffs, std::size_t slot) {
  Poly r;
  Poly x = Poly::var(slot);
  for (std::size_t d = 0; d < coeffs.size(); ++d) {
    if (coeffs[d].is_zero()) continue;
    r = r + coeffs[d] * x.pow(static_cast<std::uint32_t>(d));
  }
  return r;
}

int univar_degree(const std::vector<Poly>& u) {
  for (int d = static_cast<int>(u.size()) - 1; d >= 0; --d)
    if (!u[static_cast<std::size_t>(d)].is_zero()) return d;
  return -1;
}

// Content of p with respect to `slot`: gcd of the univariate coefficients.
Poly content_in(const Poly& p, std::size_t slot) {
  auto coeffs = to_univar(p, slot);
  Poly g;
  for (const auto& c : coeffs) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? normalize_primitive(c) : poly_gcd(g, c);
    if (g.is_constant()) return Poly::constant(1);
  }
  return g;
}

// Pseudo-remainder prem(a, b) in `slot`: lc(b)^(da-db+1) * a mod b.
Poly pseudo_rem(const Poly& a, const Poly& b, std::size_t slot) {
  auto ua = to_univar(a, slot);
  auto ub = to_univar(b, slot);
  int db = univar_degree(ub);
  const Poly& lcb = ub[static_cast<std::size_t>(db)];
  std::vector<Poly> r = ua;
  int dr = univar_degree(r);
  int scale = dr - db + 1;
  while (dr >= db) {
    const Poly lr = r[static_cast<std::size_t>(dr)];
    // r <- lcb*r - lr * x^(dr-db) * b
    for (auto& c : r) c = lcb * c;
    --scale;
    for (int i = 0; i <= db; ++i) {
      std::size_t k = static_cast<std::size_t>(dr - db + i);
      r[k] = r[k] - lr * ub[static_cast<std::size_t>(i)];
    }
    int nd = -1;
    for (int d = dr; d >= 0; --d) {
      if (!r[static_cast<std::size_t>(d)].is_zero()) { nd = d; break; }
    }
    if (nd >= dr) throw Error("pseudo-remainder failed to reduce degree");
    dr = nd;
  }
  // Match the textbook prem normalization so subresultant division is exact.
  if (scale > 0) {
    Poly f = lcb.pow(static_cast<std::uint32_t>(scale));
    for (auto& c : r) c = c * f;
  }
  return from_univar(r, slot);
}

// --- Modular degree probe -------------------------------------------------
//
// Primitive PRS is exact but expensive when the inputs are coprime, which is
// the overwhelmingly common case in fraction reduction. A univariate image
// modulo a large prime bounds the gcd degree per slot cheaply: a probed
// degree of zero in every slot certifies (Monte Carlo) that the gcd is
// constant. Overestimates only cost time, never correctness.

constexpr std::uint64_t kPrimes[2] = {2305843009213693951ULL,  // 2^61 - 1
                                      4611686018427387847ULL};

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t p) { return powmod(a, p - 2, p); }

// Rational coefficient reduced mod p; false when the denominator vanishes.
bool rational_mod(const Rational& r, std::uint64_t p, std::uint64_t& out) {
  BigInt num = numerator(r) % p;
  BigInt den = denominator(r) % p;
  if (den == 0) return false;
  std::uint64_t n = num < 0 ? p - (-num).convert_to<std::uint64_t>()
                            : num.convert_to<std::uint64_t>();
  std::uint64_t d = den.convert_to<std::uint64_t>();
  out = mulmod(n % p, invmod(d, p), p);
  return true;
}

// Image of `poly` as a univariate polynomial in `slot`, all other slots
// evaluated at the supplied residues. Coefficients indexed by degree.
bool univar_image(const Poly& poly, std::size_t slot, std::uint64_t p,
                  const std::vector<std::uint64_t>& values,
                  std::vector<std::uint64_t>& image) {
  image.assign(poly.degree_in(slot) + 1, 0);
  for (const auto& [m, c] : poly.terms()) {
    std::uint64_t coeff;
    if (!rational_mod(c, p, coeff)) return false;
    std::uint32_t d = 0;
    for (std::size_t s = 0; s < m.size(); ++s) {
      if (m[s] == 0) continue;
      if (s == slot) {
        d = m[s];
        continue;
      }
      coeff = mulmod(coeff, powmod(values[s], m[s], p), p);
    }
    image[d] = (image[d] + coeff) % p;
  }
  while (image.size() > 1 && image.back() == 0) image.pop_back();
  return true;
}

int euclid_degree(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b,
                  std::uint64_t p) {
  auto deg = [](const std::vector<std::uint64_t>& v) {
    for (std::size_t i = v.size(); i-- > 0;)
      if (v[i]) return static_cast<int>(i);
    return -1;
  };
  int da = deg(a), db = deg(b);
  if (da < 0) return db;
  if (db < 0) return da;
  while (db >= 0) {
    // a <- a mod b
    std::uint64_t lb = invmod(b[static_cast<std::size_t>(db)], p);
    while (da >= db) {
      std::uint64_t f = mulmod(a[static_cast<std::size_t>(da)], lb, p);
      for (int i = 0; i <= db; ++i) {
        std::size_t k = static_cast<std::size_t>(da - db + i);
        std::uint64_t sub = mulmod(f, b[static_cast<std::size_t>(i)], p);
        a[k] = (a[k] + p - sub) % p;
      }
      while (da >= 0 && a[static_cast<std::size_t>(da)] == 0) --da;
    }
    std::swap(a, b);
    std::swap(da, db);
  }
  return da;
}

// Probed upper bound on deg_slot(gcd); -1 when the probe is unusable.
int probe_gcd_degree(const Poly& a, const Poly& b, std::size_t slot,
                     std::uint64_t p, std::uint64_t salt) {
  std::size_t nslots = std::max(a.max_slot_plus_one(), b.max_slot_plus_one());
  std::vector<std::uint64_t> values(nslots);
  std::uint64_t state = salt * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
  for (auto& v : values) {
    state ^= state << 13; state ^= state >> 7; state ^= state << 17;
    v = state % (p - 3) + 2;
  }
  std::vector<std::uint64_t> ia, ib;
  if (!univar_image(a, slot, p, values, ia)) return -1;
  if (!univar_image(b, slot, p, values, ib)) return -1;
  // A dropped leading coefficient makes the image untrustworthy.
  if (static_cast<std::uint32_t>(ia.size() - 1) != a.degree_in(slot)) return -1;
  if (static_cast<std::uint32_t>(ib.size() - 1) != b.degree_in(slot)) return -1;
  return euclid_degree(std::move(ia), std::move(ib), p);
}

// True when two independent probes both report a constant gcd in `slot`.
bool probably_coprime_in(const Poly& a, const Poly& b, std::size_t slot) {
  for (std::uint64_t round = 0; round < 2; ++round) {
    int d = probe_gcd_degree(a, b, slot, kPrimes[round], slot * 17 + round + 1);
    if (d != 0) return false;
  }
  return true;
}

}  // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.is_zero() ? b : normalize_primitive(b);
  if (b.is_zero()) return normalize_primitive(a);
  if (a.is_constant() || b.is_constant()) return Poly::constant(1);

  std::size_t nslots = std::max(a.max_slot_plus_one(), b.max_slot_plus_one());
  std::size_t slot = nslots;  // first slot where a nontrivial factor may live
  for (std::size_t s = 0; s < nslots; ++s) {
    bool ina = a.depends_on(s), inb = b.depends_on(s);
    if (!ina && !inb) continue;
    if (ina && inb && !probably_coprime_in(a, b, s)) {
      slot = s;
      break;
    }
  }
  if (slot == nslots) return Poly::constant(1);
  if (!a.depends_on(slot)) return poly_gcd(a, content_in(b, slot));
  if (!b.depends_on(slot)) return poly_gcd(content_in(a, slot), b);

  Poly ca = content_in(a, slot);
  Poly cb = content_in(b, slot);
  Poly cont = poly_gcd(ca, cb);

  // Brown's subresultant PRS: each remainder is divided by the predicted
  // factor g*h^d, which keeps coefficient growth polynomial where the
  // primitive PRS would re-derive it with exponentially large contents.
  Poly pa = normalize_primitive(div_exact(a, ca));
  Poly pb = normalize_primitive(div_exact(b, cb));
  if (pa.degree_in(slot) < pb.degree_in(slot)) std::swap(pa, pb);

  Poly g = Poly::constant(1);
  Poly h = Poly::constant(1);
  while (true) {
    std::uint32_t d = pa.degree_in(slot) - pb.degree_in(slot);
    Poly r = pseudo_rem(pa, pb, slot);
    if (r.is_zero()) break;
    if (!r.depends_on(slot)) {
      // Degree dropped to zero: the primitive part of the PRS is trivial.
      return normalize_primitive(cont);
    }
    Poly denom = g * h.pow(d);
    pa = std::move(pb);
    pb = div_exact(r, denom);
    g = to_univar(pa, slot).back();
    if (d == 0) continue;
    Poly gd = g.pow(d);
    h = d == 1 ? gd : div_exact(gd, h.pow(d - 1));
  }
  Poly prim = div_exact(pb, content_in(pb, slot));
  return normalize_primitive(cont * prim);
}

// ---------------------------------------------------------------------------
// Reduced fractions.

void RationalFunction::reduce() {
  if (den.is_zero()) throw Error("zero denominator in rational function");
  if (num.is_zero()) {
    den = Poly::constant(1);
    return;
  }
  Poly g = poly_gcd(num, den);
  if (!g.is_constant()) {
    num = div_exact(num, g);
    den = div_exact(den, g);
  }
  // Monic denominator pins the representative.
  Rational lc = den.leading_coeff();
  if (lc != 1) {
    Rational inv = Rational(1) / lc;
    num = num.scaled(inv);
    den = den.scaled(inv);
  }
}

// The arithmetic below keeps fractions reduced without ever running a gcd
// on the full cross products: with reduced inputs, cancellation can only
// happen across numerator/denominator pairs, so the gcds run on the
// (smaller, structured) originals. This is the same scheme mpq uses.

namespace {

Poly cancel(Poly& x, Poly& y) {
  Poly g = poly_gcd(x, y);
  if (!g.is_constant()) {
    x = div_exact(x, g);
    y = div_exact(y, g);
  }
  return g;
}

}  // namespace

RationalFunction rf_add(const RationalFunction& a, const RationalFunction& b) {
  if (a.num.is_zero()) return b;
  if (b.num.is_zero()) return a;
  Poly d1 = poly_gcd(a.den, b.den);
  if (d1.is_constant()) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
  }
  Poly qa = div_exact(a.den, d1);
  Poly qb = div_exact(b.den, d1);
  Poly t = a.num * qb + b.num * qa;
  if (t.is_zero()) return {Poly(), Poly::constant(1)};
  Poly d2 = poly_gcd(t, d1);
  if (!d2.is_constant()) {
    t = div_exact(t, d2);
    d1 = div_exact(d1, d2);
  }
  return {std::move(t), qa * d1 * qb};
}

RationalFunction rf_mul(const RationalFunction& a, const RationalFunction& b) {
  if (a.num.is_zero() || b.num.is_zero()) return {Poly(), Poly::constant(1)};
  Poly an = a.num, bd = b.den, bn = b.num, ad = a.den;
  cancel(an, bd);
  cancel(bn, ad);
  return {an * bn, ad * bd};
}

RationalFunction rf_div(const RationalFunction& a, const RationalFunction& b) {
  if (b.num.is_zero()) throw Error("division by zero rational function");
  return rf_mul(a, RationalFunction{b.den, b.num});
}

RationalFunction rf_neg(const RationalFunction& a) {
  return RationalFunction{-a.num, a.den};
}

RationalFunction rf_pow(const RationalFunction& a, int k) {
  if (k == 0) return RationalFunction{Poly::constant(1), Poly::constant(1)};
  std::uint32_t mag = static_cast<std::uint32_t>(k < 0 ? -static_cast<long long>(k)
                                                       : k);
  // Powers of a reduced fraction stay reduced.
  if (k > 0) return {a.num.pow(mag), a.den.pow(mag)};
  if (a.num.is_zero()) throw Error("zero raised to a negative power");
  return {a.den.pow(mag), a.num.pow(mag)};
}

}  // namespace drekit
