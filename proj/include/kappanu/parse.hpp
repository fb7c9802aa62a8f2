#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kappanu/expr.hpp"

namespace kappanu {

// position is the 0-based byte offset of the offending token.
struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)),
        position(pos) {}
};

namespace detail {

enum class TokKind : std::uint8_t {
  kNumber,
  kIdent,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kCaret,
  kLParen,
  kRParen,
  kComma,
  kEnd,
};

struct Token {
  TokKind kind;
  std::size_t pos;
  std::string text;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++i;
      while (i < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[i]))) {
        ++i;
      }
      if (i < src.size() && src[i] == '.') {
        ++i;
        if (i >= src.size() ||
            !std::isdigit(static_cast<unsigned char>(src[i]))) {
          throw ParseError("malformed number", start);
        }
        while (i < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[i]))) {
          ++i;
        }
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < src.size() &&
                 std::isdigit(static_cast<unsigned char>(src[i]))) {
            ++i;
          }
        }
      }
      out.push_back(
          {TokKind::kNumber, start, std::string(src.substr(start, i - start))});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      ++i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) ||
              src[i] == '_')) {
        ++i;
      }
      out.push_back(
          {TokKind::kIdent, start, std::string(src.substr(start, i - start))});
      continue;
    }
    TokKind k;
    switch (c) {
      case '+': k = TokKind::kPlus; break;
      case '-': k = TokKind::kMinus; break;
      case '*': k = TokKind::kStar; break;
      case '/': k = TokKind::kSlash; break;
      case '^': k = TokKind::kCaret; break;
      case '(': k = TokKind::kLParen; break;
      case ')': k = TokKind::kRParen; break;
      case ',': k = TokKind::kComma; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({k, i, std::string(1, c)});
    ++i;
  }
  out.push_back({TokKind::kEnd, src.size(), ""});
  return out;
}

inline bool lookup_function(std::string_view name, ExprKind& kind) {
  if (name == "exp") kind = ExprKind::kExp;
  else if (name == "ln") kind = ExprKind::kLn;
  else if (name == "sin") kind = ExprKind::kSin;
  else if (name == "cos") kind = ExprKind::kCos;
  else if (name == "sinh") kind = ExprKind::kSinh;
  else if (name == "cosh") kind = ExprKind::kCosh;
  else if (name == "sqrt") kind = ExprKind::kSqrt;
  else if (name == "abs") kind = ExprKind::kAbs;
  else if (name == "sign") kind = ExprKind::kSign;
  else return false;
  return true;
}

inline Expr apply_function(ExprKind k, const Expr& a) {
  switch (k) {
    case ExprKind::kExp: return exp(a);
    case ExprKind::kLn: return ln(a);
    case ExprKind::kSin: return sin(a);
    case ExprKind::kCos: return cos(a);
    case ExprKind::kSinh: return sinh(a);
    case ExprKind::kCosh: return cosh(a);
    case ExprKind::kSqrt: return sqrt(a);
    case ExprKind::kAbs: return abs(a);
    default: return sign(a);
  }
}

inline Expr number_from_text(const Token& t) {
  bool integral = t.text.find_first_of(".eE") == std::string::npos;
  if (integral) {
    std::int64_t v = 0;
    auto [p, ec] =
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec == std::errc() && p == t.text.data() + t.text.size()) {
      return constant(Number::from_int(v));
    }
  }
  double d = 0;
  auto [p, ec] =
      std::from_chars(t.text.data(), t.text.data() + t.text.size(), d);
  if (ec != std::errc() || p != t.text.data() + t.text.size()) {
    throw ParseError("malformed number '" + t.text + "'", t.pos);
  }
  return constant(Number(d));
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::vector<std::string>& vars)
      : toks_(std::move(toks)), vars_(vars) {}

  Expr run() {
    Expr e = expr();
    if (cur().kind != TokKind::kEnd) {
      throw ParseError("unexpected trailing input", cur().pos);
    }
    return e;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  void advance() { ++i_; }

  bool is_variable(const std::string& name) const {
    for (const auto& v : vars_) {
      if (v == name) return true;
    }
    return false;
  }

  Expr expr() {
    Expr acc = term();
    while (cur().kind == TokKind::kPlus || cur().kind == TokKind::kMinus) {
      bool minus = cur().kind == TokKind::kMinus;
      advance();
      Expr rhs = term();
      acc = minus ? sub(acc, rhs) : add(acc, rhs);
    }
    return acc;
  }

  Expr term() {
    Expr acc = factor();
    while (cur().kind == TokKind::kStar || cur().kind == TokKind::kSlash) {
      bool slash = cur().kind == TokKind::kSlash;
      advance();
      Expr rhs = factor();
      acc = slash ? div(acc, rhs) : mul(acc, rhs);
    }
    return acc;
  }

  // Unary minus binds tighter than '^': -x^2 means (-x)^2.
  Expr factor() {
    Expr b = base();
    if (cur().kind == TokKind::kCaret) {
      advance();
      Expr e = exponent();
      return pow(b, e);
    }
    return b;
  }

  Expr base() {
    const Token& t = cur();
    switch (t.kind) {
      case TokKind::kMinus:
        advance();
        return neg(base());
      case TokKind::kNumber:
        advance();
        return number_from_text(t);
      case TokKind::kLParen: {
        advance();
        Expr e = expr();
        expect(TokKind::kRParen, "expected ')'");
        return e;
      }
      case TokKind::kIdent: {
        advance();
        ExprKind fk;
        if (lookup_function(t.text, fk)) {
          expect(TokKind::kLParen, "expected '(' after '" + t.text + "'");
          Expr a = expr();
          if (cur().kind == TokKind::kComma) {
            throw ParseError(
                "arity mismatch: '" + t.text + "' takes one argument",
                cur().pos);
          }
          expect(TokKind::kRParen, "expected ')'");
          return apply_function(fk, a);
        }
        if (!is_variable(t.text)) {
          throw ParseError("unknown identifier '" + t.text + "'", t.pos);
        }
        return variable(t.text);
      }
      default:
        throw ParseError("expected expression", t.pos);
    }
  }

  Expr exponent() {
    const Token& t = cur();
    if (t.kind == TokKind::kNumber) {
      advance();
      return number_from_text(t);
    }
    if (t.kind == TokKind::kMinus || t.kind == TokKind::kPlus) {
      bool minus = t.kind == TokKind::kMinus;
      advance();
      if (cur().kind != TokKind::kNumber) {
        throw ParseError("expected number after exponent sign", cur().pos);
      }
      Expr n = number_from_text(cur());
      advance();
      return minus ? neg(n) : n;
    }
    if (t.kind == TokKind::kLParen) {
      advance();
      Expr e = expr();
      expect(TokKind::kRParen, "expected ')'");
      return e;
    }
    throw ParseError("expected exponent", t.pos);
  }

  void expect(TokKind k, const std::string& msg) {
    if (cur().kind != k) throw ParseError(msg, cur().pos);
    advance();
  }

  std::vector<Token> toks_;
  const std::vector<std::string>& vars_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline Expr parse_expression(std::string_view src,
                             const std::vector<std::string>& variables) {
  detail::Parser p(detail::lex(src), variables);
  return p.run();
}

}  // namespace kappanu
