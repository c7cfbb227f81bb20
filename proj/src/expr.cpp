#include "drekit/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace drekit {

const char* func_name(FuncKind f) {
  switch (f) {
    case FuncKind::Sin: return "sin";
    case FuncKind::Cos: return "cos";
    case FuncKind::Exp: return "exp";
    case FuncKind::Sqrt: return "sqrt";
  }
  return "?";
}

Expr::Expr() {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = 0;
  node_ = std::move(n);
}

Expr Expr::constant(Rational r) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = std::move(r);
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 1) throw Error("variable index must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->var = VarRef{index};
  return Expr(std::move(n));
}

Expr Expr::time_var() {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->var = VarRef{0};
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.empty()) return Expr();
  if (terms.size() == 1) return terms.front();
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Sum;
  n->children = std::move(terms);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  if (factors.empty()) return integer(1);
  if (factors.size() == 1) return factors.front();
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Product;
  n->children = std::move(factors);
  return Expr(std::move(n));
}

Expr Expr::quotient(Expr num, Expr den) {
  if (den.is_zero_literal()) throw Error("quotient denominator is the literal zero");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Quotient;
  n->children = {std::move(num), std::move(den)};
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Power;
  n->exponent = exponent;
  n->children = {std::move(base)};
  return Expr(std::move(n));
}

Expr Expr::negate(Expr e) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Negation;
  n->children = {std::move(e)};
  return Expr(std::move(n));
}

Expr Expr::apply(FuncKind f, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Function;
  n->func = f;
  n->children = {std::move(arg)};
  return Expr(std::move(n));
}

bool Expr::is_zero_literal() const {
  return node_->kind == NodeKind::Constant && node_->value == 0;
}

bool Expr::is_one_literal() const {
  return node_->kind == NodeKind::Constant && node_->value == 1;
}

const Rational& Expr::constant_value() const {
  if (!is_constant()) throw Error("expression is not a constant");
  return node_->value;
}

int Expr::max_var_index() const {
  int m = 0;
  if (node_->kind == NodeKind::Variable) m = node_->var.index;
  for (const auto& c : node_->children) m = std::max(m, c.max_var_index());
  return m;
}

bool Expr::depends_on_time() const {
  if (node_->kind == NodeKind::Variable) return node_->var.is_time();
  for (const auto& c : node_->children)
    if (c.depends_on_time()) return true;
  return false;
}

bool Expr::depends_on(const VarRef& v) const {
  if (node_->kind == NodeKind::Variable) return node_->var == v;
  for (const auto& c : node_->children)
    if (c.depends_on(v)) return true;
  return false;
}

bool Expr::is_rational_tree() const {
  if (node_->kind == NodeKind::Function) return false;
  for (const auto& c : node_->children)
    if (!c.is_rational_tree()) return false;
  return true;
}

bool Expr::same_tree(const Expr& other) const {
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Constant:
      return a.value == b.value;
    case NodeKind::Variable:
      return a.var == b.var;
    case NodeKind::Power:
      if (a.exponent != b.exponent) return false;
      break;
    case NodeKind::Function:
      if (a.func != b.func) return false;
      break;
    default:
      break;
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!a.children[i].same_tree(b.children[i])) return false;
  return true;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, Expr::negate(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::quotient(a, b); }
Expr Expr::operator-() const { return Expr::negate(*this); }

// ---------------------------------------------------------------------------
// Evaluation

double eval(const Expr& e, const EvalPoint& p) {
  const auto& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value.convert_to<double>();
    case NodeKind::Variable:
      if (n.var.is_time()) return p.t;
      if (n.var.index > static_cast<int>(p.x.size()))
        return std::numeric_limits<double>::quiet_NaN();
      return p.x[static_cast<std::size_t>(n.var.index) - 1];
    case NodeKind::Sum: {
      double s = 0.0;
      for (const auto& c : n.children) s += eval(c, p);
      return s;
    }
    case NodeKind::Product: {
      double s = 1.0;
      for (const auto& c : n.children) s *= eval(c, p);
      return s;
    }
    case NodeKind::Quotient:
      return eval(n.children[0], p) / eval(n.children[1], p);
    case NodeKind::Power:
      return std::pow(eval(n.children[0], p), n.exponent);
    case NodeKind::Negation:
      return -eval(n.children[0], p);
    case NodeKind::Function: {
      double a = eval(n.children[0], p);
      switch (n.func) {
        case FuncKind::Sin: return std::sin(a);
        case FuncKind::Cos: return std::cos(a);
        case FuncKind::Exp: return std::exp(a);
        case FuncKind::Sqrt: return std::sqrt(a);
      }
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double eval_magnitude(const Expr& e, const EvalPoint& p) {
  const auto& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant:
      return std::abs(n.value.convert_to<double>());
    case NodeKind::Variable:
    case NodeKind::Function:
      return std::abs(eval(e, p));
    case NodeKind::Sum: {
      double s = 0.0;
      for (const auto& c : n.children) s += eval_magnitude(c, p);
      return s;
    }
    case NodeKind::Product: {
      double s = 1.0;
      for (const auto& c : n.children) s *= eval_magnitude(c, p);
      return s;
    }
    case NodeKind::Quotient:
      // Magnitude growth comes from the numerator; the denominator is taken
      // at its true value since a near-pole point blows up the value itself.
      return eval_magnitude(n.children[0], p) / std::abs(eval(n.children[1], p));
    case NodeKind::Power: {
      if (n.exponent >= 0)
        return std::pow(eval_magnitude(n.children[0], p), n.exponent);
      return std::abs(std::pow(eval(n.children[0], p), n.exponent));
    }
    case NodeKind::Negation:
      return eval_magnitude(n.children[0], p);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Differentiation

Expr diff(const Expr& e, const VarRef& v) {
  const auto& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant:
      return Expr();
    case NodeKind::Variable:
      return n.var == v ? Expr::integer(1) : Expr();
    case NodeKind::Sum: {
      std::vector<Expr> terms;
      terms.reserve(n.children.size());
      for (const auto& c : n.children) terms.push_back(diff(c, v));
      return Expr::sum(std::move(terms));
    }
    case NodeKind::Product: {
      std::vector<Expr> terms;
      terms.reserve(n.children.size());
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        std::vector<Expr> factors = n.children;
        factors[i] = diff(n.children[i], v);
        terms.push_back(Expr::product(std::move(factors)));
      }
      return Expr::sum(std::move(terms));
    }
    case NodeKind::Quotient: {
      const Expr& u = n.children[0];
      const Expr& w = n.children[1];
      return Expr::quotient(diff(u, v) * w - u * diff(w, v), Expr::power(w, 2));
    }
    case NodeKind::Power: {
      const Expr& base = n.children[0];
      if (n.exponent == 0) return Expr();
      return Expr::integer(n.exponent) * Expr::power(base, n.exponent - 1) *
             diff(base, v);
    }
    case NodeKind::Negation:
      return Expr::negate(diff(n.children[0], v));
    case NodeKind::Function: {
      const Expr& arg = n.children[0];
      Expr darg = diff(arg, v);
      switch (n.func) {
        case FuncKind::Sin:
          return Expr::apply(FuncKind::Cos, arg) * darg;
        case FuncKind::Cos:
          return Expr::negate(Expr::apply(FuncKind::Sin, arg)) * darg;
        case FuncKind::Exp:
          return Expr::apply(FuncKind::Exp, arg) * darg;
        case FuncKind::Sqrt:
          return Expr::quotient(darg,
                                Expr::integer(2) * Expr::apply(FuncKind::Sqrt, arg));
      }
      return Expr();
    }
  }
  return Expr();
}

Expr substitute(const Expr& e, const VarRef& v, const Expr& replacement) {
  const auto& n = e.node();
  if (n.kind == NodeKind::Variable) return n.var == v ? replacement : e;
  if (n.children.empty()) return e;
  std::vector<Expr> kids;
  kids.reserve(n.children.size());
  bool changed = false;
  for (const auto& c : n.children) {
    Expr s = substitute(c, v, replacement);
    changed = changed || !s.same_tree(c);
    kids.push_back(std::move(s));
  }
  if (!changed) return e;
  switch (n.kind) {
    case NodeKind::Sum: return Expr::sum(std::move(kids));
    case NodeKind::Product: return Expr::product(std::move(kids));
    case NodeKind::Quotient: return Expr::quotient(kids[0], kids[1]);
    case NodeKind::Power: return Expr::power(kids[0], n.exponent);
    case NodeKind::Negation: return Expr::negate(kids[0]);
    case NodeKind::Function: return Expr::apply(n.func, kids[0]);
    default: return e;
  }
}

// ---------------------------------------------------------------------------
// Printing. Precedence: sum 1, product/quotient 2, unary minus 2, power 3.

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Sum: return 1;
    case NodeKind::Negation: return 2;
    case NodeKind::Product:
    case NodeKind::Quotient: return 2;
    case NodeKind::Power: return 3;
    default: return 4;
  }
}

void print_node(const Expr& e, std::ostream& os);

void print_child(const Expr& c, int parent_prec, std::ostream& os,
                 bool right_of_div_or_sub = false) {
  int prec = precedence(c);
  bool need = prec < parent_prec || (right_of_div_or_sub && prec == parent_prec);
  // A negative constant behaves like a unary minus when embedded.
  if (c.is_constant() && c.constant_value() < 0 && parent_prec >= 2) need = true;
  // Rational constants contain a '/' and must be guarded inside products.
  if (c.is_constant() && denominator(c.constant_value()) != 1 && parent_prec >= 2)
    need = true;
  if (need) os << "(";
  print_node(c, os);
  if (need) os << ")";
}

void print_node(const Expr& e, std::ostream& os) {
  const auto& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant: {
      const Rational& r = n.value;
      os << numerator(r).str();
      if (denominator(r) != 1) os << "/" << denominator(r).str();
      return;
    }
    case NodeKind::Variable:
      if (n.var.is_time()) os << "t";
      else os << "x" << n.var.index;
      return;
    case NodeKind::Sum: {
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        const Expr& c = n.children[i];
        if (i == 0) {
          print_child(c, 1, os);
          continue;
        }
        // Fold a leading negation / negative coefficient into " - ".
        if (c.kind() == NodeKind::Negation) {
          os << " - ";
          print_child(c.node().children[0], 2, os, true);
        } else if (c.is_constant() && c.constant_value() < 0) {
          os << " - ";
          print_node(Expr::constant(-c.constant_value()), os);
        } else {
          os << " + ";
          print_child(c, 1, os);
        }
      }
      return;
    }
    case NodeKind::Product: {
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) os << "*";
        print_child(n.children[i], 2, os, i > 0);
      }
      return;
    }
    case NodeKind::Quotient:
      print_child(n.children[0], 2, os);
      os << "/";
      print_child(n.children[1], 2, os, true);
      return;
    case NodeKind::Power:
      print_child(n.children[0], 3, os, true);
      os << "^";
      if (n.exponent < 0) os << "(" << n.exponent << ")";
      else os << n.exponent;
      return;
    case NodeKind::Negation:
      os << "-";
      print_child(n.children[0], 2, os, true);
      return;
    case NodeKind::Function:
      os << func_name(n.func) << "(";
      print_node(n.children[0], os);
      os << ")";
      return;
  }
}

}  // namespace

std::string Expr::str() const { return to_string(*this); }

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print_node(e, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over the fixed grammar.

namespace {

class Parser {
 public:
  Parser(const std::string& text, int n) : text_(text), n_(n) {}

  Expr run() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  const std::string& text_;
  int n_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) { ++pos_; return true; }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  Expr parse_sum() {
    skip_ws();
    Expr e = parse_term();
    for (;;) {
      if (accept('+')) e = e + parse_term();
      else if (accept('-')) e = e - parse_term();
      else return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (accept('*')) e = e * parse_factor();
      else if (accept('/')) e = Expr::quotient(e, parse_factor());
      else return e;
    }
  }

  Expr parse_factor() {
    if (accept('-')) return Expr::negate(parse_factor());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) {
      int exp = parse_int_exponent();
      return Expr::power(std::move(base), exp);
    }
    return base;
  }

  int parse_int_exponent() {
    skip_ws();
    bool paren = accept('(');
    skip_ws();
    bool neg = accept('-');
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start)
      throw ParseError("expected integer exponent", pos_);
    long long v = std::stoll(text_.substr(start, pos_ - start));
    if (paren) expect(')');
    return static_cast<int>(neg ? -v : v);
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)))
      return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    std::string intpart = text_.substr(start, pos_ - start);
    std::string fracpart;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      std::size_t fstart = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      fracpart = text_.substr(fstart, pos_ - fstart);
      if (intpart.empty() && fracpart.empty())
        throw ParseError("malformed number", start);
    }
    if (intpart.empty() && fracpart.empty())
      throw ParseError("malformed number", start);
    // Decimal literals become exact rationals: 0.5 -> 1/2.
    BigInt num = intpart.empty() ? BigInt(0) : BigInt(intpart);
    BigInt den = 1;
    for (char d : fracpart) {
      num = num * 10 + (d - '0');
      den *= 10;
    }
    return Expr::constant(Rational(num, den));
  }

  Expr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_]))))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name == "t") return Expr::time_var();
    if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt") {
      FuncKind f = name == "sin" ? FuncKind::Sin
                 : name == "cos" ? FuncKind::Cos
                 : name == "exp" ? FuncKind::Exp
                                 : FuncKind::Sqrt;
      expect('(');
      Expr arg = parse_sum();
      expect(')');
      return Expr::apply(f, std::move(arg));
    }
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      if (digits) {
        long long idx = std::stoll(name.substr(1));
        if (idx < 1 || idx > n_)
          throw ParseError("variable index out of range: " + name, start);
        return Expr::variable(static_cast<int>(idx));
      }
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }
};

}  // namespace

Expr parse(const std::string& text, int n) { return Parser(text, n).run(); }

}  // namespace drekit
