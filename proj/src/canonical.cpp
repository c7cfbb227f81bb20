#include "drekit/expr.hpp"
#include "drekit/poly.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace drekit {

namespace {

// Canonicalization maps an expression into a reduced fraction of
// polynomials over slots [x1..xn, t, atoms...], where an atom is an
// elementary function applied to an already-canonical argument. Distinct
// atoms are treated as algebraically independent, so a zero result from
// this route is a genuine identity, while "nonzero" may still be zero
// through a functional relation and is settled by sampling instead.
struct SlotContext {
  int n_vars = 0;                      // x-slots 0..n_vars-1, t-slot n_vars
  std::vector<Expr> atoms;             // slot n_vars+1+i
  std::vector<std::string> atom_keys;  // sorted, parallel to atoms

  std::size_t t_slot() const { return static_cast<std::size_t>(n_vars); }

  std::size_t atom_slot(const std::string& key) const {
    auto it = std::lower_bound(atom_keys.begin(), atom_keys.end(), key);
    if (it == atom_keys.end() || *it != key)
      throw Error("internal: unregistered atom " + key);
    return t_slot() + 1 +
           static_cast<std::size_t>(it - atom_keys.begin());
  }
};

using AtomMemo = std::map<const Expr::Node*, Expr>;  // node -> canonical atom

void collect_atoms(const Expr& e, SlotContext& ctx, AtomMemo& memo) {
  const auto& n = e.node();
  for (const auto& c : n.children) collect_atoms(c, ctx, memo);
  if (n.kind != NodeKind::Function) return;
  Expr canon_arg = simplify(n.children[0]);
  Expr atom = Expr::apply(n.func, std::move(canon_arg));
  std::string key = to_string(atom);
  memo.emplace(&n, atom);
  auto it = std::lower_bound(ctx.atom_keys.begin(), ctx.atom_keys.end(), key);
  if (it == ctx.atom_keys.end() || *it != key) {
    std::size_t pos = static_cast<std::size_t>(it - ctx.atom_keys.begin());
    ctx.atom_keys.insert(it, key);
    ctx.atoms.insert(ctx.atoms.begin() + static_cast<std::ptrdiff_t>(pos), atom);
  }
}

RationalFunction to_rf(const Expr& e, const SlotContext& ctx, const AtomMemo& memo) {
  const auto& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant:
      return {Poly::constant(n.value), Poly::constant(1)};
    case NodeKind::Variable: {
      std::size_t slot = n.var.is_time()
                             ? ctx.t_slot()
                             : static_cast<std::size_t>(n.var.index - 1);
      return {Poly::var(slot), Poly::constant(1)};
    }
    case NodeKind::Sum: {
      RationalFunction r{Poly(), Poly::constant(1)};
      for (const auto& c : n.children) r = rf_add(r, to_rf(c, ctx, memo));
      return r;
    }
    case NodeKind::Product: {
      RationalFunction r{Poly::constant(1), Poly::constant(1)};
      for (const auto& c : n.children) {
        r = rf_mul(r, to_rf(c, ctx, memo));
        if (r.num.is_zero()) break;
      }
      return r;
    }
    case NodeKind::Quotient:
      return rf_div(to_rf(n.children[0], ctx, memo), to_rf(n.children[1], ctx, memo));
    case NodeKind::Power:
      return rf_pow(to_rf(n.children[0], ctx, memo), n.exponent);
    case NodeKind::Negation:
      return rf_neg(to_rf(n.children[0], ctx, memo));
    case NodeKind::Function: {
      auto it = memo.find(&n);
      if (it == memo.end()) throw Error("internal: atom memo miss");
      std::size_t slot = ctx.atom_slot(to_string(it->second));
      return {Poly::var(slot), Poly::constant(1)};
    }
  }
  throw Error("internal: unhandled node kind");
}

Expr slot_expr(std::size_t slot, const SlotContext& ctx) {
  if (slot < ctx.t_slot()) return Expr::variable(static_cast<int>(slot) + 1);
  if (slot == ctx.t_slot()) return Expr::time_var();
  return ctx.atoms[slot - ctx.t_slot() - 1];
}

// One term: sign applied outermost, rational denominator as a quotient, so
// the printed form reparses to the identical tree.
Expr term_expr(const Monomial& m, const Rational& coeff, const SlotContext& ctx) {
  std::vector<Expr> factors;
  for (std::size_t s = 0; s < m.size(); ++s) {
    if (m[s] == 0) continue;
    Expr base = slot_expr(s, ctx);
    factors.push_back(m[s] == 1 ? base
                                : Expr::power(std::move(base),
                                              static_cast<int>(m[s])));
  }
  if (factors.empty()) return Expr::constant(coeff);
  Rational c = coeff < 0 ? Rational(-coeff) : coeff;
  BigInt p = numerator(c), q = denominator(c);
  Expr core;
  if (p == 1) {
    core = Expr::product(std::move(factors));
  } else {
    std::vector<Expr> all;
    all.push_back(Expr::constant(Rational(p)));
    for (auto& f : factors) all.push_back(std::move(f));
    core = Expr::product(std::move(all));
  }
  if (q != 1) core = Expr::quotient(std::move(core), Expr::constant(Rational(q)));
  if (coeff < 0) core = Expr::negate(std::move(core));
  return core;
}

Expr poly_expr(const Poly& p, const SlotContext& ctx) {
  if (p.is_zero()) return Expr();
  std::vector<Expr> terms;
  terms.reserve(p.terms().size());
  for (const auto& [m, c] : p.terms()) terms.push_back(term_expr(m, c, ctx));
  return Expr::sum(std::move(terms));
}

}  // namespace

Expr simplify(const Expr& e) {
  SlotContext ctx;
  ctx.n_vars = e.max_var_index();
  AtomMemo memo;
  collect_atoms(e, ctx, memo);
  RationalFunction rf = to_rf(e, ctx, memo);
  rf.reduce();
  Expr num = poly_expr(rf.num, ctx);
  if (rf.den.is_constant() && rf.den.constant_value() == 1) return num;
  return Expr::quotient(std::move(num), poly_expr(rf.den, ctx));
}

std::optional<Expr> polynomial_antiderivative(const Expr& e, const VarRef& v) {
  SlotContext ctx;
  ctx.n_vars = std::max(e.max_var_index(), v.is_time() ? 0 : v.index);
  AtomMemo memo;
  collect_atoms(e, ctx, memo);
  std::size_t vslot = v.is_time() ? ctx.t_slot()
                                  : static_cast<std::size_t>(v.index - 1);
  for (const auto& atom : ctx.atoms)
    if (atom.depends_on(v)) return std::nullopt;

  RationalFunction rf = to_rf(e, ctx, memo);
  rf.reduce();
  if (rf.den.depends_on(vslot)) return std::nullopt;

  Poly integrated;
  for (const auto& [m, c] : rf.num.terms()) {
    Monomial mono = m;
    if (mono.size() <= vslot) mono.resize(vslot + 1, 0);
    mono[vslot] += 1;
    integrated.add_term(std::move(mono), c / Rational(m.size() > vslot ? m[vslot] + 1 : 1));
  }
  Expr num = poly_expr(integrated, ctx);
  if (rf.den.is_constant() && rf.den.constant_value() == 1) return num;
  return Expr::quotient(std::move(num), poly_expr(rf.den, ctx));
}

}  // namespace drekit
