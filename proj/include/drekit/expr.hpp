#ifndef DREKIT_EXPR_HPP
#define DREKIT_EXPR_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace drekit {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Base error for everything the library reports.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised by the expression parser; carries the offending position.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " (at position " + std::to_string(pos) + ")"), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

enum class NodeKind : std::uint8_t {
  Constant,   // exact rational
  Variable,   // x1..xn, or the time symbol t
  Sum,        // n-ary
  Product,    // n-ary
  Quotient,   // binary
  Power,      // base ^ integer exponent
  Negation,   // unary
  Function,   // sin, cos, exp, sqrt
};

enum class FuncKind : std::uint8_t { Sin, Cos, Exp, Sqrt };

const char* func_name(FuncKind f);

/// Index 0 denotes the time symbol t; 1..n denote x1..xn.
struct VarRef {
  int index = 0;
  bool is_time() const { return index == 0; }
  friend bool operator==(const VarRef&, const VarRef&) = default;
};

/// Immutable scalar expression tree over the real function field.
///
/// Trees are plain shared structure; all operations build new trees.
/// Constants are exact rationals, so canonicalization is drift-free.
class Expr {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    NodeKind kind;
    Rational value;               // Constant
    VarRef var;                   // Variable
    FuncKind func = FuncKind::Sin;  // Function
    int exponent = 0;             // Power
    std::vector<Expr> children;
  };

  Expr();  // the constant 0
  explicit Expr(NodePtr node) : node_(std::move(node)) {}

  static Expr constant(Rational r);
  static Expr integer(long long v) { return constant(Rational(v)); }
  static Expr variable(int index);  // 1-based state variable
  static Expr time_var();
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr quotient(Expr num, Expr den);
  static Expr power(Expr base, int exponent);
  static Expr negate(Expr e);
  static Expr apply(FuncKind f, Expr arg);

  const Node& node() const { return *node_; }
  NodeKind kind() const { return node_->kind; }
  bool is_constant() const { return node_->kind == NodeKind::Constant; }
  bool is_zero_literal() const;
  bool is_one_literal() const;
  const Rational& constant_value() const;

  /// Largest state-variable index appearing in the tree (0 if none).
  int max_var_index() const;
  bool depends_on_time() const;
  bool depends_on(const VarRef& v) const;
  /// True when the tree uses no elementary functions.
  bool is_rational_tree() const;

  /// Deep structural equality (kinds, values, children).
  bool same_tree(const Expr& other) const;

  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;

 private:
  NodePtr node_;
};

/// Evaluation point: values for x1..xn plus the time coordinate.
struct EvalPoint {
  std::vector<double> x;
  double t = 0.0;
};

/// IEEE evaluation; poles and domain violations come back non-finite.
double eval(const Expr& e, const EvalPoint& p);

/// Triangle-inequality magnitude of e at p: replaces every subtraction by
/// an addition of magnitudes. Used as the local scale for zero testing.
double eval_magnitude(const Expr& e, const EvalPoint& p);

/// Exact partial derivative. v.index == 0 differentiates in t.
Expr diff(const Expr& e, const VarRef& v);

/// Substitute every occurrence of v by the given expression.
Expr substitute(const Expr& e, const VarRef& v, const Expr& replacement);

/// Parse the expression grammar: x1..x<n>, t, + - * / ^ (integer
/// exponents), sin/cos/exp/sqrt, decimal and rational literals.
Expr parse(const std::string& text, int n);

/// Canonical form. Rational subclass canonicalizes to a reduced ratio of
/// expanded polynomials (graded-lex term order, monic denominator);
/// elementary function applications are treated as opaque atoms over the
/// same machinery. Idempotent.
Expr simplify(const Expr& e);

/// Antiderivative in v when e is polynomial in v (denominator and any
/// function applications free of v); nullopt otherwise.
std::optional<Expr> polynomial_antiderivative(const Expr& e, const VarRef& v);

std::string to_string(const Expr& e);

}  // namespace drekit

#endif
