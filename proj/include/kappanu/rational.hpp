#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>

namespace kappanu {

namespace detail {

inline __int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline bool fits_i64(__int128 v) {
  return v >= INT64_MIN && v <= INT64_MAX;
}

}  // namespace detail

// Exact rational. Invariant: den > 0 and gcd(|num|, den) == 1.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) {
    auto r = make(n, d);
    *this = r ? *r : Rational(0);
  }

  // Normalizing constructor that reports overflow / zero denominator.
  static std::optional<Rational> make(__int128 n, __int128 d) {
    if (d == 0) return std::nullopt;
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = detail::gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (!detail::fits_i64(n) || !detail::fits_i64(d)) return std::nullopt;
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  bool is_negative() const { return num_ < 0; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  static std::optional<Rational> add(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.den_ +
                 static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return make(n, d);
  }
  static std::optional<Rational> mul(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.num_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return make(n, d);
  }
  static std::optional<Rational> div(const Rational& a, const Rational& b) {
    if (b.num_ == 0) return std::nullopt;
    __int128 n = static_cast<__int128>(a.num_) * b.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.num_;
    return make(n, d);
  }
  static std::optional<Rational> neg(const Rational& a) {
    return make(-static_cast<__int128>(a.num_), a.den_);
  }
  static std::optional<Rational> abs(const Rational& a) {
    __int128 n = a.num_;
    return make(n < 0 ? -n : n, a.den_);
  }
  // Integer exponent; negative exponents invert (nullopt on 0 base).
  static std::optional<Rational> pow(const Rational& a, std::int64_t e) {
    if (e < 0) {
      if (a.num_ == 0) return std::nullopt;
      auto inv = make(a.den_, a.num_);
      if (!inv) return std::nullopt;
      return pow(*inv, -e);
    }
    Rational acc(1);
    Rational base = a;
    while (e > 0) {
      if (e & 1) {
        auto r = mul(acc, base);
        if (!r) return std::nullopt;
        acc = *r;
      }
      e >>= 1;
      if (e == 0) break;
      auto s = mul(base, base);
      if (!s) return std::nullopt;
      base = *s;
    }
    return acc;
  }

  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) {
      s += '/';
      s += std::to_string(den_);
    }
    return s;
  }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

// Scalar constant: exact rational when possible, IEEE double otherwise.
// Finite integral doubles normalize to exact integers so folding and
// print/parse round-trips are stable.
class Number {
 public:
  Number() : exact_(true), rat_(0), dbl_(0) {}
  Number(const Rational& r) : exact_(true), rat_(r), dbl_(r.to_double()) {}
  Number(double d) {
    if (std::isfinite(d) && d == std::nearbyint(d) && std::fabs(d) <= 9.0e15) {
      exact_ = true;
      rat_ = Rational(static_cast<std::int64_t>(d));
      dbl_ = rat_.to_double();
    } else {
      exact_ = false;
      rat_ = Rational(0);
      dbl_ = d;
    }
  }
  static Number from_int(std::int64_t n) { return Number(Rational(n)); }

  bool exact() const { return exact_; }
  const Rational& rat() const { return rat_; }
  double to_double() const { return exact_ ? rat_.to_double() : dbl_; }
  bool is_zero() const { return exact_ ? rat_.is_zero() : dbl_ == 0.0; }
  bool is_one() const { return exact_ ? rat_.is_one() : dbl_ == 1.0; }
  bool is_negative() const {
    return exact_ ? rat_.is_negative() : dbl_ < 0.0;
  }
  bool is_integer() const { return exact_ && rat_.is_integer(); }
  std::int64_t as_integer() const { return rat_.num(); }

  friend bool operator==(const Number& a, const Number& b) {
    if (a.exact_ != b.exact_) return false;
    if (a.exact_) return a.rat_ == b.rat_;
    return a.dbl_ == b.dbl_;
  }

  std::size_t hash() const {
    if (exact_) {
      std::size_t h = std::hash<std::int64_t>{}(rat_.num());
      return h ^ (std::hash<std::int64_t>{}(rat_.den()) + 0x9e3779b97f4a7c15ull +
                  (h << 6) + (h >> 2));
    }
    return std::hash<double>{}(dbl_);
  }

  static Number add(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
      if (auto r = Rational::add(a.rat_, b.rat_)) return Number(*r);
    }
    return Number(a.to_double() + b.to_double());
  }
  static Number mul(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
      if (auto r = Rational::mul(a.rat_, b.rat_)) return Number(*r);
    }
    return Number(a.to_double() * b.to_double());
  }
  // Caller guards against zero divisors.
  static Number div(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
      if (auto r = Rational::div(a.rat_, b.rat_)) return Number(*r);
    }
    return Number(a.to_double() / b.to_double());
  }
  static Number neg(const Number& a) {
    if (a.exact_) {
      if (auto r = Rational::neg(a.rat_)) return Number(*r);
    }
    return Number(-a.to_double());
  }
  static Number abs(const Number& a) {
    if (a.exact_) {
      if (auto r = Rational::abs(a.rat_)) return Number(*r);
    }
    return Number(std::fabs(a.to_double()));
  }

  std::string str() const {
    if (exact_) return rat_.str();
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), dbl_);
    return std::string(buf, res.ptr);
  }

 private:
  bool exact_;
  Rational rat_;
  double dbl_;
};

}  // namespace kappanu
