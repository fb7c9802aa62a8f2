#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kappanu/rational.hpp"

namespace kappanu {

enum class ExprKind : std::uint8_t {
  kConstant,
  kVariable,
  kAdd,
  kMul,
  kDiv,
  kPow,
  kNeg,
  kExp,
  kLn,
  kSin,
  kCos,
  kSinh,
  kCosh,
  kSqrt,
  kAbs,
  kSign,
};

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

// Immutable handle to a shared expression node. Copies are cheap; the tree
// behind a handle never changes after construction.
class Expr {
 public:
  Expr() = default;

  ExprKind kind() const;
  const Number& value() const;
  const std::string& name() const;
  const Expr& child(std::size_t i) const;
  std::size_t arity() const;
  std::size_t hash() const;

  bool valid() const { return node_ != nullptr; }
  bool is_constant() const;
  bool is_zero() const;
  bool is_one() const;

  const ExprNode* raw() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  explicit Expr(NodePtr n) : node_(std::move(n)) {}
  NodePtr node_;

  friend Expr make_expr(ExprKind, Number, std::string, std::vector<Expr>);
};

struct ExprNode {
  ExprKind kind;
  Number value;            // kConstant
  std::string name;        // kVariable
  std::vector<Expr> children;
  std::size_t hash;
};

inline ExprKind Expr::kind() const { return node_->kind; }
inline const Number& Expr::value() const { return node_->value; }
inline const std::string& Expr::name() const { return node_->name; }
inline const Expr& Expr::child(std::size_t i) const {
  return node_->children[i];
}
inline std::size_t Expr::arity() const { return node_->children.size(); }
inline std::size_t Expr::hash() const { return node_->hash; }
inline bool Expr::is_constant() const {
  return node_ && node_->kind == ExprKind::kConstant;
}
inline bool Expr::is_zero() const { return is_constant() && value().is_zero(); }
inline bool Expr::is_one() const { return is_constant() && value().is_one(); }

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const ExprNode& x = *a.node_;
  const ExprNode& y = *b.node_;
  if (x.kind != y.kind || x.hash != y.hash) return false;
  if (x.kind == ExprKind::kConstant) return x.value == y.value;
  if (x.kind == ExprKind::kVariable) return x.name == y.name;
  if (x.children.size() != y.children.size()) return false;
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (!(x.children[i] == y.children[i])) return false;
  }
  return true;
}

namespace detail {

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
}

inline std::atomic<bool>& consing_flag() {
  static std::atomic<bool> enabled{true};
  return enabled;
}

// Process-lifetime intern table. Structurally equal nodes built while the
// table is enabled share one allocation; sharing is never observable through
// evaluation or differentiation.
struct InternTable {
  std::mutex mu;
  std::unordered_multimap<std::size_t, NodePtr> map;

  static InternTable& instance() {
    static InternTable t;
    return t;
  }
};

inline bool intern_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == ExprKind::kConstant) return a.value == b.value;
  if (a.kind == ExprKind::kVariable) return a.name == b.name;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (a.children[i].raw() != b.children[i].raw()) return false;
  }
  return true;
}

}  // namespace detail

// Test hook: turning sharing off makes every construction allocate.
inline void set_hash_consing(bool enabled) {
  detail::consing_flag().store(enabled);
}

inline Expr make_expr(ExprKind kind, Number value, std::string name,
                      std::vector<Expr> children) {
  std::size_t h = detail::hash_combine(0, static_cast<std::size_t>(kind));
  if (kind == ExprKind::kConstant) {
    h = detail::hash_combine(h, value.hash());
  } else if (kind == ExprKind::kVariable) {
    h = detail::hash_combine(h, std::hash<std::string>{}(name));
  } else {
    for (const Expr& c : children) h = detail::hash_combine(h, c.hash());
  }
  auto node = std::make_shared<ExprNode>(
      ExprNode{kind, std::move(value), std::move(name), std::move(children), h});
  if (detail::consing_flag().load()) {
    auto& table = detail::InternTable::instance();
    std::lock_guard<std::mutex> lock(table.mu);
    auto [lo, hi] = table.map.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      if (detail::intern_equal(*it->second, *node)) return Expr(it->second);
    }
    table.map.emplace(h, node);
  }
  return Expr(std::move(node));
}

// ---- constructors ----------------------------------------------------------

inline Expr constant(Number n) {
  return make_expr(ExprKind::kConstant, std::move(n), {}, {});
}
inline Expr integer(std::int64_t n) { return constant(Number::from_int(n)); }
inline Expr rational(std::int64_t p, std::int64_t q) {
  return constant(Number(Rational(p, q)));
}
inline Expr real(double d) { return constant(Number(d)); }
inline Expr variable(std::string name) {
  return make_expr(ExprKind::kVariable, {}, std::move(name), {});
}

inline Expr neg(const Expr& a);

// Smart constructors fold constants, drop additive zeros and unit factors,
// cancel double negations, and nothing else; domains are preserved.
inline Expr add(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    Number r = Number::add(a.value(), b.value());
    if (std::isfinite(r.to_double())) return constant(r);
  }
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return make_expr(ExprKind::kAdd, {}, {}, {a, b});
}

inline Expr neg(const Expr& a) {
  if (a.is_constant()) return constant(Number::neg(a.value()));
  if (a.kind() == ExprKind::kNeg) return a.child(0);
  return make_expr(ExprKind::kNeg, {}, {}, {a});
}

inline Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }

inline Expr mul(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    Number r = Number::mul(a.value(), b.value());
    if (std::isfinite(r.to_double())) return constant(r);
  }
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return make_expr(ExprKind::kMul, {}, {}, {a, b});
}

inline Expr div(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && !b.value().is_zero()) {
    Number r = Number::div(a.value(), b.value());
    if (std::isfinite(r.to_double())) return constant(r);
  }
  if (b.is_one()) return a;
  return make_expr(ExprKind::kDiv, {}, {}, {a, b});
}

inline Expr pow(const Expr& b, const Expr& e) {
  if (e.is_zero()) return integer(1);
  if (e.is_constant() && e.value().exact() && e.value().is_one()) return b;
  if (b.is_constant() && e.is_constant()) {
    const Number& bv = b.value();
    const Number& ev = e.value();
    if (ev.is_integer()) {
      if (bv.exact()) {
        if (auto r = Rational::pow(bv.rat(), ev.as_integer())) {
          return constant(Number(*r));
        }
      }
      double r = std::pow(bv.to_double(), ev.to_double());
      if (std::isfinite(r)) return constant(Number(r));
    } else if (bv.to_double() > 0.0) {
      double r = std::pow(bv.to_double(), ev.to_double());
      if (std::isfinite(r)) return constant(Number(r));
    }
  }
  return make_expr(ExprKind::kPow, {}, {}, {b, e});
}

inline Expr pow(const Expr& b, std::int64_t e) { return pow(b, integer(e)); }

namespace detail {

inline Expr fold_unary(ExprKind kind, const Expr& a) {
  if (a.is_constant()) {
    double x = a.value().to_double();
    double r = 0;
    bool ok = true;
    switch (kind) {
      case ExprKind::kExp: r = std::exp(x); break;
      case ExprKind::kLn: ok = x > 0; r = ok ? std::log(x) : 0; break;
      case ExprKind::kSin: r = std::sin(x); break;
      case ExprKind::kCos: r = std::cos(x); break;
      case ExprKind::kSinh: r = std::sinh(x); break;
      case ExprKind::kCosh: r = std::cosh(x); break;
      case ExprKind::kSqrt: ok = x >= 0; r = ok ? std::sqrt(x) : 0; break;
      case ExprKind::kAbs: return constant(Number::abs(a.value()));
      case ExprKind::kSign:
        ok = x != 0;
        r = x > 0 ? 1.0 : -1.0;
        break;
      default: ok = false; break;
    }
    if (ok && std::isfinite(r)) return constant(Number(r));
  }
  return make_expr(kind, {}, {}, {a});
}

}  // namespace detail

inline Expr exp(const Expr& a) { return detail::fold_unary(ExprKind::kExp, a); }
inline Expr ln(const Expr& a) { return detail::fold_unary(ExprKind::kLn, a); }
inline Expr sin(const Expr& a) { return detail::fold_unary(ExprKind::kSin, a); }
inline Expr cos(const Expr& a) { return detail::fold_unary(ExprKind::kCos, a); }
inline Expr sinh(const Expr& a) {
  return detail::fold_unary(ExprKind::kSinh, a);
}
inline Expr cosh(const Expr& a) {
  return detail::fold_unary(ExprKind::kCosh, a);
}
inline Expr sqrt(const Expr& a) {
  return detail::fold_unary(ExprKind::kSqrt, a);
}
inline Expr abs(const Expr& a) { return detail::fold_unary(ExprKind::kAbs, a); }
inline Expr sign(const Expr& a) {
  return detail::fold_unary(ExprKind::kSign, a);
}

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }

// ---- evaluation ------------------------------------------------------------

// Variable bindings for one evaluation point.
class Env {
 public:
  void set(std::string name, double value) {
    for (auto& kv : vars_) {
      if (kv.first == name) {
        kv.second = value;
        return;
      }
    }
    vars_.emplace_back(std::move(name), value);
  }
  const double* find(std::string_view name) const {
    for (const auto& kv : vars_) {
      if (kv.first == name) return &kv.second;
    }
    return nullptr;
  }

 private:
  std::vector<std::pair<std::string, double>> vars_;
};

struct EvalResult {
  double value;
  double scale;  // largest |value| over the distinct subterms visited
};

namespace detail {

struct SingularEval {};

inline double eval_rec(const ExprNode* n, const Env& env,
                       std::unordered_map<const ExprNode*, double>& memo,
                       double& scale) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  double r = 0;
  switch (n->kind) {
    case ExprKind::kConstant:
      r = n->value.to_double();
      break;
    case ExprKind::kVariable: {
      const double* v = env.find(n->name);
      if (!v) throw std::invalid_argument("unbound variable: " + n->name);
      r = *v;
      break;
    }
    case ExprKind::kAdd:
      r = eval_rec(n->children[0].raw(), env, memo, scale) +
          eval_rec(n->children[1].raw(), env, memo, scale);
      break;
    case ExprKind::kMul:
      r = eval_rec(n->children[0].raw(), env, memo, scale) *
          eval_rec(n->children[1].raw(), env, memo, scale);
      break;
    case ExprKind::kDiv: {
      double num = eval_rec(n->children[0].raw(), env, memo, scale);
      double den = eval_rec(n->children[1].raw(), env, memo, scale);
      if (den == 0.0) throw SingularEval{};
      r = num / den;
      break;
    }
    case ExprKind::kPow: {
      double b = eval_rec(n->children[0].raw(), env, memo, scale);
      double e = eval_rec(n->children[1].raw(), env, memo, scale);
      if (b > 0.0) {
        r = std::pow(b, e);
      } else if (b == 0.0) {
        if (!(e > 0.0)) throw SingularEval{};
        r = 0.0;
      } else {
        if (e != std::nearbyint(e)) throw SingularEval{};
        r = std::pow(b, e);
      }
      break;
    }
    case ExprKind::kNeg:
      r = -eval_rec(n->children[0].raw(), env, memo, scale);
      break;
    case ExprKind::kExp:
      r = std::exp(eval_rec(n->children[0].raw(), env, memo, scale));
      break;
    case ExprKind::kLn: {
      double x = eval_rec(n->children[0].raw(), env, memo, scale);
      if (!(x > 0.0)) throw SingularEval{};
      r = std::log(x);
      break;
    }
    case ExprKind::kSin:
      r = std::sin(eval_rec(n->children[0].raw(), env, memo, scale));
      break;
    case ExprKind::kCos:
      r = std::cos(eval_rec(n->children[0].raw(), env, memo, scale));
      break;
    case ExprKind::kSinh:
      r = std::sinh(eval_rec(n->children[0].raw(), env, memo, scale));
      break;
    case ExprKind::kCosh:
      r = std::cosh(eval_rec(n->children[0].raw(), env, memo, scale));
      break;
    case ExprKind::kSqrt: {
      double x = eval_rec(n->children[0].raw(), env, memo, scale);
      if (x < 0.0) throw SingularEval{};
      r = std::sqrt(x);
      break;
    }
    case ExprKind::kAbs:
      r = std::fabs(eval_rec(n->children[0].raw(), env, memo, scale));
      break;
    case ExprKind::kSign: {
      double x = eval_rec(n->children[0].raw(), env, memo, scale);
      if (x == 0.0) throw SingularEval{};
      r = x > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  // Division by zero, ln of a non-positive value, sqrt of a negative value,
  // sign(0), and overflow all surface as the singular signal.
  if (!std::isfinite(r)) throw SingularEval{};
  if (std::fabs(r) > scale) scale = std::fabs(r);
  memo.emplace(n, r);
  return r;
}

}  // namespace detail

inline std::optional<EvalResult> evaluate_scaled(const Expr& e,
                                                 const Env& env) {
  std::unordered_map<const ExprNode*, double> memo;
  double scale = 0;
  try {
    double v = detail::eval_rec(e.raw(), env, memo, scale);
    return EvalResult{v, scale};
  } catch (const detail::SingularEval&) {
    return std::nullopt;
  }
}

inline std::optional<double> evaluate(const Expr& e, const Env& env) {
  auto r = evaluate_scaled(e, env);
  if (!r) return std::nullopt;
  return r->value;
}

// ---- differentiation -------------------------------------------------------

namespace detail {

// Product used when assembling derivatives; a structurally zero factor
// annihilates the term instead of materialising 0*e nodes.
inline Expr dterm(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return integer(0);
  return mul(a, b);
}

inline Expr diff_rec(const Expr& e, const std::string& var,
                     std::unordered_map<const ExprNode*, Expr>& memo) {
  auto it = memo.find(e.raw());
  if (it != memo.end()) return it->second;
  Expr r;
  switch (e.kind()) {
    case ExprKind::kConstant:
      r = integer(0);
      break;
    case ExprKind::kVariable:
      r = e.name() == var ? integer(1) : integer(0);
      break;
    case ExprKind::kAdd:
      r = add(diff_rec(e.child(0), var, memo), diff_rec(e.child(1), var, memo));
      break;
    case ExprKind::kMul: {
      Expr da = diff_rec(e.child(0), var, memo);
      Expr db = diff_rec(e.child(1), var, memo);
      r = add(dterm(da, e.child(1)), dterm(e.child(0), db));
      break;
    }
    case ExprKind::kDiv: {
      Expr da = diff_rec(e.child(0), var, memo);
      Expr db = diff_rec(e.child(1), var, memo);
      Expr numer = sub(dterm(da, e.child(1)), dterm(e.child(0), db));
      r = div(numer, mul(e.child(1), e.child(1)));
      break;
    }
    case ExprKind::kPow: {
      const Expr& b = e.child(0);
      const Expr& ex = e.child(1);
      Expr db = diff_rec(b, var, memo);
      if (ex.is_constant()) {
        Expr c = constant(Number::add(ex.value(), Number::from_int(-1)));
        r = dterm(mul(ex, pow(b, c)), db);
      } else {
        Expr de = diff_rec(ex, var, memo);
        Expr t = add(dterm(de, ln(b)), dterm(ex, div(db, b)));
        r = dterm(e, t);
      }
      break;
    }
    case ExprKind::kNeg:
      r = neg(diff_rec(e.child(0), var, memo));
      break;
    case ExprKind::kExp:
      r = dterm(e, diff_rec(e.child(0), var, memo));
      break;
    case ExprKind::kLn:
      r = div(diff_rec(e.child(0), var, memo), e.child(0));
      break;
    case ExprKind::kSin:
      r = dterm(cos(e.child(0)), diff_rec(e.child(0), var, memo));
      break;
    case ExprKind::kCos:
      r = neg(dterm(sin(e.child(0)), diff_rec(e.child(0), var, memo)));
      break;
    case ExprKind::kSinh:
      r = dterm(cosh(e.child(0)), diff_rec(e.child(0), var, memo));
      break;
    case ExprKind::kCosh:
      r = dterm(sinh(e.child(0)), diff_rec(e.child(0), var, memo));
      break;
    case ExprKind::kSqrt:
      r = div(diff_rec(e.child(0), var, memo), mul(integer(2), e));
      break;
    case ExprKind::kAbs:
      // d|u| = sign(u) du, valid away from u = 0.
      r = dterm(sign(e.child(0)), diff_rec(e.child(0), var, memo));
      break;
    case ExprKind::kSign:
      r = integer(0);
      break;
  }
  memo.emplace(e.raw(), r);
  return r;
}

}  // namespace detail

inline Expr differentiate(const Expr& e, const std::string& var) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return detail::diff_rec(e, var, memo);
}

// ---- substitution ----------------------------------------------------------

using Substitution = std::vector<std::pair<std::string, Expr>>;

namespace detail {

inline Expr subst_rec(const Expr& e, const Substitution& s,
                      std::unordered_map<const ExprNode*, Expr>& memo) {
  auto it = memo.find(e.raw());
  if (it != memo.end()) return it->second;
  Expr r;
  switch (e.kind()) {
    case ExprKind::kConstant:
      r = e;
      break;
    case ExprKind::kVariable: {
      r = e;
      for (const auto& kv : s) {
        if (kv.first == e.name()) {
          r = kv.second;
          break;
        }
      }
      break;
    }
    case ExprKind::kAdd:
      r = add(subst_rec(e.child(0), s, memo), subst_rec(e.child(1), s, memo));
      break;
    case ExprKind::kMul:
      r = mul(subst_rec(e.child(0), s, memo), subst_rec(e.child(1), s, memo));
      break;
    case ExprKind::kDiv:
      r = div(subst_rec(e.child(0), s, memo), subst_rec(e.child(1), s, memo));
      break;
    case ExprKind::kPow:
      r = pow(subst_rec(e.child(0), s, memo), subst_rec(e.child(1), s, memo));
      break;
    case ExprKind::kNeg:
      r = neg(subst_rec(e.child(0), s, memo));
      break;
    case ExprKind::kExp:
      r = exp(subst_rec(e.child(0), s, memo));
      break;
    case ExprKind::kLn:
      r = ln(subst_rec(e.child(0), s, memo));
      break;
    case ExprKind::kSin:
      r = sin(subst_rec(e.child(0), s, memo));
      break;
    case ExprKind::kCos:
      r = cos(subst_rec(e.child(0), s, memo));
      break;
    case ExprKind::kSinh:
      r = sinh(subst_rec(e.child(0), s, memo));
      break;
    case ExprKind::kCosh:
      r = cosh(subst_rec(e.child(0), s, memo));
      break;
    case ExprKind::kSqrt:
      r = sqrt(subst_rec(e.child(0), s, memo));
      break;
    case ExprKind::kAbs:
      r = abs(subst_rec(e.child(0), s, memo));
      break;
    case ExprKind::kSign:
      r = sign(subst_rec(e.child(0), s, memo));
      break;
  }
  memo.emplace(e.raw(), r);
  return r;
}

}  // namespace detail

inline Expr substitute(const Expr& e, const Substitution& s) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return detail::subst_rec(e, s, memo);
}

// Rebuild through the smart constructors (idempotent).
inline Expr simplify(const Expr& e) { return substitute(e, {}); }

inline void collect_variables(const Expr& e, std::set<std::string>& out) {
  if (e.kind() == ExprKind::kVariable) {
    out.insert(e.name());
    return;
  }
  for (std::size_t i = 0; i < e.arity(); ++i) collect_variables(e.child(i), out);
}

inline std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

// ---- printing --------------------------------------------------------------

namespace detail {

// Grammar levels: add 1, mul/div 2, unary minus 3, pow 4, atom 5. A node
// printed where at least `level` is required gets parenthesised below it.
inline int print_level(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::kAdd: return 1;
    case ExprKind::kMul:
    case ExprKind::kDiv: return 2;
    case ExprKind::kNeg: return 3;
    case ExprKind::kPow: return 4;
    case ExprKind::kConstant: {
      const Number& v = e.value();
      // Exact non-integers render as p/q and re-parse as a quotient, so they
      // carry quotient precedence.
      if (v.exact() && !v.is_integer()) return 2;
      return v.is_negative() ? 3 : 5;
    }
    default: return 5;
  }
}

inline const char* func_name(ExprKind k) {
  switch (k) {
    case ExprKind::kExp: return "exp";
    case ExprKind::kLn: return "ln";
    case ExprKind::kSin: return "sin";
    case ExprKind::kCos: return "cos";
    case ExprKind::kSinh: return "sinh";
    case ExprKind::kCosh: return "cosh";
    case ExprKind::kSqrt: return "sqrt";
    case ExprKind::kAbs: return "abs";
    case ExprKind::kSign: return "sign";
    default: return "";
  }
}

inline void print_rec(const Expr& e, int min_level, std::string& out) {
  if (print_level(e) < min_level) {
    out += '(';
    print_rec(e, 0, out);
    out += ')';
    return;
  }
  switch (e.kind()) {
    case ExprKind::kConstant:
      out += e.value().str();
      break;
    case ExprKind::kVariable:
      out += e.name();
      break;
    case ExprKind::kAdd: {
      print_rec(e.child(0), 1, out);
      const Expr& rhs = e.child(1);
      if (rhs.kind() == ExprKind::kNeg) {
        out += " - ";
        print_rec(rhs.child(0), 2, out);
      } else if (rhs.is_constant() && rhs.value().is_negative()) {
        out += " - ";
        out += Number::neg(rhs.value()).str();
      } else {
        out += " + ";
        print_rec(rhs, 2, out);
      }
      break;
    }
    case ExprKind::kMul:
      print_rec(e.child(0), 2, out);
      out += '*';
      print_rec(e.child(1), 3, out);
      break;
    case ExprKind::kDiv:
      print_rec(e.child(0), 2, out);
      out += '/';
      print_rec(e.child(1), 3, out);
      break;
    case ExprKind::kNeg:
      out += '-';
      print_rec(e.child(0), 5, out);
      break;
    case ExprKind::kPow: {
      print_rec(e.child(0), 5, out);
      out += '^';
      const Expr& ex = e.child(1);
      bool bare = ex.is_constant() &&
                  (ex.value().is_integer() || !ex.value().exact());
      if (bare) {
        out += ex.value().str();
      } else {
        out += '(';
        print_rec(ex, 0, out);
        out += ')';
      }
      break;
    }
    default:
      out += func_name(e.kind());
      out += '(';
      print_rec(e.child(0), 0, out);
      out += ')';
      break;
  }
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_rec(e, 0, out);
  return out;
}

}  // namespace kappanu
