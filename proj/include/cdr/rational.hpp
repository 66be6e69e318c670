#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cdr {

/// Exact rational scalar over arbitrary-precision integers.
/// Invariants: always reduced to lowest terms, denominator > 0.
class Rational {
public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}
  Rational(const mpz_class& n) : v_(n) {}
  Rational(long num, long den) : Rational(mpz_class(num), mpz_class(den)) {}
  Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : v_(q) {
    v_.canonicalize();
  }

  /// Parses "p/q" or "p". Rejects unreduced or non-positive-denominator input.
  static Rational parse(std::string_view s) {
    auto slash = s.find('/');
    mpz_class num, den = 1;
    try {
      num = mpz_class(std::string(s.substr(0, slash)));
      if (slash != std::string_view::npos) den = mpz_class(std::string(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("Rational: cannot parse '" + std::string(s) + "'");
    }
    if (den <= 0) throw std::invalid_argument("Rational: denominator must be positive in '" + std::string(s) + "'");
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (den != 1 && g != 1)
      throw std::invalid_argument("Rational: fraction '" + std::string(s) + "' is not reduced");
    return Rational(num, den);
  }

  const mpz_class& num() const { return v_.get_num(); }
  const mpz_class& den() const { return v_.get_den(); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_one() const { return v_ == 1; }
  int sign() const { return sgn(v_); }

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }

  Rational inverse() const {
    if (is_zero()) throw std::invalid_argument("Rational: inverse of zero");
    return Rational(den(), num());
  }

  Rational abs() const { return sign() < 0 ? -*this : *this; }

  Rational pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Rational r(1), b = *this;
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  /// Short display form: "p" when the denominator is 1, else "p/q".
  std::string str() const {
    if (den() == 1) return num().get_str();
    return num().get_str() + "/" + den().get_str();
  }

  /// Canonical serialization form, always "p/q".
  std::string fraction_str() const { return num().get_str() + "/" + den().get_str(); }

private:
  mpq_class v_;
};

/// binomial(n, k) for integer n (possibly negative) and k >= 0:
/// n(n-1)...(n-k+1)/k!. Exact; the division is always integral.
inline mpz_class binomial(const mpz_class& n, unsigned long k) {
  mpz_class num = 1, fact = 1;
  for (unsigned long t = 0; t < k; ++t) {
    num *= n - static_cast<long>(t);
    fact *= static_cast<long>(t + 1);
  }
  mpz_class r;
  mpz_divexact(r.get_mpz_t(), num.get_mpz_t(), fact.get_mpz_t());
  return r;
}

inline mpz_class binomial(long n, unsigned long k) { return binomial(mpz_class(n), k); }

/// Multiset coefficient ((n, k)) = binomial(n + k - 1, k).
inline mpz_class multichoose(const mpz_class& n, unsigned long k) {
  return binomial(n + static_cast<long>(k) - 1, k);
}

}  // namespace cdr
