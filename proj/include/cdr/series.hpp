#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdr/rational.hpp"

namespace cdr {

/// Truncated power series in one variable over Q: coefficients of t^0..t^D
/// with every term of degree > D discarded. All binary operations require
/// both operands to carry the same truncation order and throw otherwise.
class TruncatedSeries1 {
public:
  explicit TruncatedSeries1(long order) : c_(check_order(order) + 1) {}

  static TruncatedSeries1 constant(const Rational& a, long order) {
    TruncatedSeries1 s(order);
    s.set(0, a);
    return s;
  }

  static TruncatedSeries1 variable(long order) {
    TruncatedSeries1 s(order);
    if (order >= 1) s.set(1, Rational(1));
    return s;
  }

  long order() const { return static_cast<long>(c_.size()) - 1; }

  const Rational& coeff(long k) const {
    range_check(k);
    return c_[static_cast<size_t>(k)];
  }

  void set(long k, const Rational& a) {
    range_check(k);
    c_[static_cast<size_t>(k)] = a;
  }

  bool is_zero() const {
    for (const auto& a : c_)
      if (!a.is_zero()) return false;
    return true;
  }

  /// Re-truncates to a new order; extending pads with exact zeros, so this is
  /// only meaningful when the series is known to be polynomial.
  TruncatedSeries1 retruncate(long new_order) const {
    TruncatedSeries1 r(new_order);
    for (long k = 0; k <= std::min(order(), new_order); ++k) r.set(k, coeff(k));
    return r;
  }

  TruncatedSeries1 operator-() const {
    TruncatedSeries1 r(order());
    for (long k = 0; k <= order(); ++k) r.set(k, -coeff(k));
    return r;
  }

  friend TruncatedSeries1 operator+(const TruncatedSeries1& a, const TruncatedSeries1& b) {
    a.match(b);
    TruncatedSeries1 r(a.order());
    for (long k = 0; k <= a.order(); ++k) r.set(k, a.coeff(k) + b.coeff(k));
    return r;
  }

  friend TruncatedSeries1 operator-(const TruncatedSeries1& a, const TruncatedSeries1& b) {
    return a + (-b);
  }

  friend TruncatedSeries1 operator*(const TruncatedSeries1& a, const TruncatedSeries1& b) {
    a.match(b);
    TruncatedSeries1 r(a.order());
    for (long i = 0; i <= a.order(); ++i) {
      if (a.coeff(i).is_zero()) continue;
      for (long j = 0; i + j <= a.order(); ++j) {
        if (b.coeff(j).is_zero()) continue;
        r.set(i + j, r.coeff(i + j) + a.coeff(i) * b.coeff(j));
      }
    }
    return r;
  }

  friend TruncatedSeries1 operator*(const Rational& a, const TruncatedSeries1& s) {
    TruncatedSeries1 r(s.order());
    for (long k = 0; k <= s.order(); ++k) r.set(k, a * s.coeff(k));
    return r;
  }

  friend bool operator==(const TruncatedSeries1& a, const TruncatedSeries1& b) {
    a.match(b);
    return a.c_ == b.c_;
  }

  std::string str(const std::string& var = "g") const {
    std::string out;
    for (long k = 0; k <= order(); ++k) {
      const Rational& a = coeff(k);
      if (a.is_zero()) continue;
      Rational mag = a.abs();
      if (out.empty())
        out += a.sign() < 0 ? "-" : "";
      else
        out += a.sign() < 0 ? " - " : " + ";
      bool unit = mag.is_one();
      if (k == 0)
        out += mag.str();
      else {
        if (!unit) out += mag.str() + "*";
        out += var;
        if (k > 1) out += "^" + std::to_string(k);
      }
    }
    return out.empty() ? "0" : out;
  }

private:
  static long check_order(long order) {
    if (order < 0) throw std::invalid_argument("TruncatedSeries1: order must be >= 0");
    return order;
  }
  void range_check(long k) const {
    if (k < 0 || k > order())
      throw std::invalid_argument("TruncatedSeries1: coefficient index " + std::to_string(k) +
                                  " out of range for order " + std::to_string(order()));
  }
  void match(const TruncatedSeries1& o) const {
    if (order() != o.order())
      throw std::invalid_argument("TruncatedSeries1: truncation order mismatch (" +
                                  std::to_string(order()) + " vs " + std::to_string(o.order()) + ")");
  }

  std::vector<Rational> c_;
};

/// Multiplicative inverse of a series with nonzero constant term.
inline TruncatedSeries1 unit_invert(const TruncatedSeries1& a) {
  if (a.coeff(0).is_zero())
    throw std::invalid_argument("unit_invert: constant term is zero");
  TruncatedSeries1 b(a.order());
  Rational c0inv = a.coeff(0).inverse();
  b.set(0, c0inv);
  for (long k = 1; k <= a.order(); ++k) {
    Rational acc(0);
    for (long j = 1; j <= k; ++j) acc += a.coeff(j) * b.coeff(k - j);
    b.set(k, -c0inv * acc);
  }
  return b;
}

/// f(h(t)) truncated at the common order. Requires h(0) = 0.
inline TruncatedSeries1 compose1(const TruncatedSeries1& f, const TruncatedSeries1& h) {
  if (f.order() != h.order())
    throw std::invalid_argument("compose1: truncation order mismatch");
  if (!h.coeff(0).is_zero())
    throw std::invalid_argument("compose1: inner series must have zero constant term");
  // Horner: result = f_D; result = result*h + f_k going down.
  TruncatedSeries1 r = TruncatedSeries1::constant(f.coeff(f.order()), f.order());
  for (long k = f.order() - 1; k >= 0; --k)
    r = r * h + TruncatedSeries1::constant(f.coeff(k), f.order());
  return r;
}

/// Compositional inverse g with g(f(t)) = t, by triangular coefficient
/// recursion on g_k. Requires f(0) = 0 and f'(0) != 0.
inline TruncatedSeries1 comp_invert1(const TruncatedSeries1& f) {
  if (f.order() < 1) throw std::invalid_argument("comp_invert1: order must be >= 1");
  if (!f.coeff(0).is_zero())
    throw std::invalid_argument("comp_invert1: series must have zero constant term");
  if (f.coeff(1).is_zero())
    throw std::invalid_argument("comp_invert1: linear coefficient is zero");
  long d = f.order();
  TruncatedSeries1 g(d);
  // fpow holds f^j; g_k solves [t^k] sum_j g_j f^j = delta_{k,1}.
  TruncatedSeries1 fpow = f;
  std::vector<TruncatedSeries1> powers;
  powers.reserve(static_cast<size_t>(d));
  powers.push_back(fpow);
  for (long j = 2; j <= d; ++j) {
    fpow = fpow * f;
    powers.push_back(fpow);
  }
  Rational f1inv = f.coeff(1).inverse();
  g.set(1, f1inv);
  for (long k = 2; k <= d; ++k) {
    Rational acc(0);
    for (long j = 1; j < k; ++j) acc += g.coeff(j) * powers[static_cast<size_t>(j - 1)].coeff(k);
    g.set(k, -acc * f1inv.pow(k));
  }
  return g;
}

/// d/dt; truncation order drops to D-1.
inline TruncatedSeries1 derive(const TruncatedSeries1& a) {
  if (a.order() < 1) throw std::invalid_argument("derive: order must be >= 1");
  TruncatedSeries1 r(a.order() - 1);
  for (long k = 1; k <= a.order(); ++k) r.set(k - 1, Rational(k) * a.coeff(k));
  return r;
}

/// Truncated power series in two variables over Q: coefficients of x^i y^j
/// for i + j <= D. Same loud order-mismatch policy as the 1-variable type.
class TruncatedSeries2 {
public:
  explicit TruncatedSeries2(long order) {
    if (order < 0) throw std::invalid_argument("TruncatedSeries2: order must be >= 0");
    order_ = order;
    c_.resize(static_cast<size_t>((order + 1) * (order + 2) / 2));
  }

  static TruncatedSeries2 constant(const Rational& a, long order) {
    TruncatedSeries2 s(order);
    s.set(0, 0, a);
    return s;
  }

  static TruncatedSeries2 variable_x(long order) {
    TruncatedSeries2 s(order);
    if (order >= 1) s.set(1, 0, Rational(1));
    return s;
  }

  static TruncatedSeries2 variable_y(long order) {
    TruncatedSeries2 s(order);
    if (order >= 1) s.set(0, 1, Rational(1));
    return s;
  }

  long order() const { return order_; }

  const Rational& coeff(long i, long j) const { return c_[idx(i, j)]; }
  void set(long i, long j, const Rational& a) { c_[idx(i, j)] = a; }

  bool is_zero() const {
    for (const auto& a : c_)
      if (!a.is_zero()) return false;
    return true;
  }

  TruncatedSeries2 operator-() const {
    TruncatedSeries2 r(order_);
    for_each([&](long i, long j, const Rational& a) { r.set(i, j, -a); });
    return r;
  }

  friend TruncatedSeries2 operator+(const TruncatedSeries2& a, const TruncatedSeries2& b) {
    a.match(b);
    TruncatedSeries2 r(a.order_);
    a.for_each([&](long i, long j, const Rational& v) { r.set(i, j, v + b.coeff(i, j)); });
    return r;
  }

  friend TruncatedSeries2 operator-(const TruncatedSeries2& a, const TruncatedSeries2& b) {
    return a + (-b);
  }

  friend TruncatedSeries2 operator*(const TruncatedSeries2& a, const TruncatedSeries2& b) {
    a.match(b);
    TruncatedSeries2 r(a.order_);
    a.for_each([&](long i, long j, const Rational& v) {
      if (v.is_zero()) return;
      for (long p = 0; i + p <= a.order_; ++p)
        for (long q = 0; i + j + p + q <= a.order_; ++q) {
          const Rational& w = b.coeff(p, q);
          if (w.is_zero()) continue;
          r.set(i + p, j + q, r.coeff(i + p, j + q) + v * w);
        }
    });
    return r;
  }

  friend TruncatedSeries2 operator*(const Rational& a, const TruncatedSeries2& s) {
    TruncatedSeries2 r(s.order_);
    s.for_each([&](long i, long j, const Rational& v) { r.set(i, j, a * v); });
    return r;
  }

  friend bool operator==(const TruncatedSeries2& a, const TruncatedSeries2& b) {
    a.match(b);
    return a.c_ == b.c_;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (long i = 0; i <= order_; ++i)
      for (long j = 0; i + j <= order_; ++j) f(i, j, coeff(i, j));
  }

  std::string str(const std::string& vx = "x", const std::string& vy = "y") const {
    std::string out;
    for (long d = 0; d <= order_; ++d)
      for (long i = d; i >= 0; --i) {
        long j = d - i;
        const Rational& a = coeff(i, j);
        if (a.is_zero()) continue;
        Rational mag = a.abs();
        if (out.empty())
          out += a.sign() < 0 ? "-" : "";
        else
          out += a.sign() < 0 ? " - " : " + ";
        std::string mono;
        if (i > 0) mono += vx + (i > 1 ? "^" + std::to_string(i) : "");
        if (j > 0) {
          if (!mono.empty()) mono += "*";
          mono += vy + (j > 1 ? "^" + std::to_string(j) : "");
        }
        if (mono.empty())
          out += mag.str();
        else
          out += (mag.is_one() ? "" : mag.str() + "*") + mono;
      }
    return out.empty() ? "0" : out;
  }

private:
  size_t idx(long i, long j) const {
    if (i < 0 || j < 0 || i + j > order_)
      throw std::invalid_argument("TruncatedSeries2: coefficient index (" + std::to_string(i) +
                                  "," + std::to_string(j) + ") out of range for order " +
                                  std::to_string(order_));
    long d = i + j;
    return static_cast<size_t>(d * (d + 1) / 2 + j);
  }
  void match(const TruncatedSeries2& o) const {
    if (order_ != o.order_)
      throw std::invalid_argument("TruncatedSeries2: truncation order mismatch (" +
                                  std::to_string(order_) + " vs " + std::to_string(o.order_) + ")");
  }

  long order_;
  std::vector<Rational> c_;
};

inline TruncatedSeries2 unit_invert(const TruncatedSeries2& a) {
  if (a.coeff(0, 0).is_zero())
    throw std::invalid_argument("unit_invert: constant term is zero");
  TruncatedSeries2 b(a.order());
  Rational c0inv = a.coeff(0, 0).inverse();
  b.set(0, 0, c0inv);
  // Solve degree by degree: a*b = 1.
  for (long d = 1; d <= a.order(); ++d)
    for (long i = d; i >= 0; --i) {
      long j = d - i;
      Rational acc(0);
      for (long p = 0; p <= i; ++p)
        for (long q = 0; q <= j; ++q) {
          if (p == 0 && q == 0) continue;
          acc += a.coeff(p, q) * b.coeff(i - p, j - q);
        }
      b.set(i, j, -c0inv * acc);
    }
  return b;
}

/// F(hx, hy) truncated at the common order. Requires hx(0,0) = hy(0,0) = 0.
inline TruncatedSeries2 subst2(const TruncatedSeries2& f, const TruncatedSeries2& hx,
                               const TruncatedSeries2& hy) {
  if (f.order() != hx.order() || f.order() != hy.order())
    throw std::invalid_argument("subst2: truncation order mismatch");
  if (!hx.coeff(0, 0).is_zero() || !hy.coeff(0, 0).is_zero())
    throw std::invalid_argument("subst2: inner series must have zero constant term");
  long d = f.order();
  TruncatedSeries2 r(d);
  // Power tables hx^i, hy^j.
  std::vector<TruncatedSeries2> px, py;
  px.push_back(TruncatedSeries2::constant(Rational(1), d));
  py.push_back(TruncatedSeries2::constant(Rational(1), d));
  for (long k = 1; k <= d; ++k) {
    px.push_back(px.back() * hx);
    py.push_back(py.back() * hy);
  }
  f.for_each([&](long i, long j, const Rational& a) {
    if (a.is_zero()) return;
    r = r + a * (px[static_cast<size_t>(i)] * py[static_cast<size_t>(j)]);
  });
  return r;
}

enum class Var2 { X, Y };

inline TruncatedSeries2 derive(const TruncatedSeries2& a, Var2 v) {
  if (a.order() < 1) throw std::invalid_argument("derive: order must be >= 1");
  TruncatedSeries2 r(a.order() - 1);
  a.for_each([&](long i, long j, const Rational& c) {
    if (c.is_zero()) return;
    if (v == Var2::X && i >= 1) r.set(i - 1, j, Rational(i) * c);
    if (v == Var2::Y && j >= 1) r.set(i, j - 1, Rational(j) * c);
  });
  return r;
}

/// Exact division by the variable x (resp. y); every monomial must contain
/// the variable. The truncation order drops by one.
inline TruncatedSeries2 divide_by_var(const TruncatedSeries2& a, Var2 v) {
  if (a.order() < 1) throw std::invalid_argument("divide_by_var: order must be >= 1");
  TruncatedSeries2 r(a.order() - 1);
  a.for_each([&](long i, long j, const Rational& c) {
    if (c.is_zero()) return;
    if (v == Var2::X) {
      if (i == 0)
        throw std::invalid_argument("divide_by_var: series not divisible by x");
      r.set(i - 1, j, c);
    } else {
      if (j == 0)
        throw std::invalid_argument("divide_by_var: series not divisible by y");
      r.set(i, j - 1, c);
    }
  });
  return r;
}

// --- serialization -----------------------------------------------------

inline nlohmann::json to_json(const TruncatedSeries1& s) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (long k = 0; k <= s.order(); ++k)
    if (!s.coeff(k).is_zero())
      coeffs.push_back({k, s.coeff(k).fraction_str()});
  return {{"order", s.order()}, {"coeffs", coeffs}};
}

inline TruncatedSeries1 series1_from_json(const nlohmann::json& j) {
  TruncatedSeries1 s(j.at("order").get<long>());
  for (const auto& e : j.at("coeffs"))
    s.set(e.at(0).get<long>(), Rational::parse(e.at(1).get<std::string>()));
  return s;
}

inline nlohmann::json to_json(const TruncatedSeries2& s) {
  nlohmann::json coeffs = nlohmann::json::array();
  s.for_each([&](long i, long jj, const Rational& a) {
    if (!a.is_zero()) coeffs.push_back({i, jj, a.fraction_str()});
  });
  return {{"order", s.order()}, {"coeffs", coeffs}};
}

inline TruncatedSeries2 series2_from_json(const nlohmann::json& j) {
  TruncatedSeries2 s(j.at("order").get<long>());
  for (const auto& e : j.at("coeffs"))
    s.set(e.at(0).get<long>(), e.at(1).get<long>(), Rational::parse(e.at(2).get<std::string>()));
  return s;
}

/// Parses polynomial literals in the formal coordinate g, e.g. "g+g^2" or
/// "-1/2*g + 3g^4". The result carries the requested truncation order; terms
/// above it are rejected rather than silently dropped.
inline TruncatedSeries1 series1_from_text(std::string_view text, long order) {
  if (order < 0) throw std::invalid_argument("series1_from_text: negative order");
  size_t pos = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("series parse error at offset " + std::to_string(pos) + ": " +
                                what + " (input: '" + std::string(text) + "')");
  };
  auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  };
  auto eat = [&](char c) {
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  };
  auto digit = [&] {
    return pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]));
  };
  auto parse_uint = [&]() -> long {
    if (!digit()) fail("expected digit");
    long v = 0;
    while (digit()) {
      v = v * 10 + (text[pos] - '0');
      if (v > 1000000) fail("number too large");
      ++pos;
    }
    return v;
  };

  TruncatedSeries1 out(order);
  skip_ws();
  if (pos == text.size()) fail("empty input");
  bool negative = eat('-');
  while (true) {
    skip_ws();
    Rational coeff(1);
    bool saw_coeff = false;
    if (digit()) {
      long num = parse_uint();
      long den = 1;
      if (eat('/')) den = parse_uint();
      if (den == 0) fail("zero denominator");
      coeff = Rational(num, den);
      saw_coeff = true;
      skip_ws();
      eat('*');
      skip_ws();
    }
    long power = 0;
    if (eat('g')) {
      power = 1;
      skip_ws();
      if (eat('^')) {
        skip_ws();
        power = parse_uint();
      }
      if (power < 1) fail("power must be >= 1");
    } else if (!saw_coeff) {
      fail("expected coefficient or 'g'");
    }
    if (power > order)
      fail("term power " + std::to_string(power) + " exceeds truncation order " +
           std::to_string(order));
    out.set(power, out.coeff(power) + (negative ? -coeff : coeff));
    skip_ws();
    if (pos == text.size()) break;
    if (eat('+'))
      negative = false;
    else if (eat('-'))
      negative = true;
    else
      fail("expected '+', '-' or end of input");
  }
  return out;
}

}  // namespace cdr
