#pragma once

// Exact arbitrary-size rational arithmetic on top of GMP's mpq_t.
// Values are always canonical: fully reduced, denominator > 0 (GMP invariant).

#include <gmp.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace psitree {

class Rational {
 public:
  Rational() { mpq_init(q_); }
  Rational(long n) {  // NOLINT(google-explicit-constructor) - ergonomics
    mpq_init(q_);
    mpq_set_si(q_, n, 1);
  }
  Rational(long num, long den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    // mpq_set_si takes the denominator as unsigned; normalize the sign here.
    if (den < 0) {
      num = -num;
      den = -den;
    }
    mpq_init(q_);
    mpq_set_si(q_, num, static_cast<unsigned long>(den));
    mpq_canonicalize(q_);
  }
  // Accepts "num", "num/den", with optional sign.
  explicit Rational(const std::string& s) {
    mpq_init(q_);
    if (mpq_set_str(q_, s.c_str(), 10) != 0) {
      mpq_clear(q_);
      throw std::invalid_argument("Rational: cannot parse '" + s + "'");
    }
    if (mpz_sgn(mpq_denref(q_)) == 0)
      throw std::domain_error("Rational: zero denominator");
    mpq_canonicalize(q_);
  }
  Rational(const Rational& o) {
    mpq_init(q_);
    mpq_set(q_, o.q_);
  }
  Rational(Rational&& o) noexcept {
    mpq_init(q_);
    mpq_swap(q_, o.q_);
  }
  Rational& operator=(const Rational& o) {
    if (this != &o) mpq_set(q_, o.q_);
    return *this;
  }
  Rational& operator=(Rational&& o) noexcept {
    mpq_swap(q_, o.q_);
    return *this;
  }
  ~Rational() { mpq_clear(q_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    Rational r;
    mpq_add(r.q_, a.q_, b.q_);
    return r;
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    Rational r;
    mpq_sub(r.q_, a.q_, b.q_);
    return r;
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    Rational r;
    mpq_mul(r.q_, a.q_, b.q_);
    return r;
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    Rational r;
    mpq_div(r.q_, a.q_, b.q_);
    return r;
  }
  Rational operator-() const {
    Rational r;
    mpq_neg(r.q_, q_);
    return r;
  }
  Rational& operator+=(const Rational& o) {
    mpq_add(q_, q_, o.q_);
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    mpq_sub(q_, q_, o.q_);
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    mpq_mul(q_, q_, o.q_);
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    mpq_div(q_, q_, o.q_);
    return *this;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return mpq_equal(a.q_, b.q_) != 0;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return mpq_cmp(a.q_, b.q_) < 0;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return mpq_cmp(a.q_, b.q_) <= 0;
  }
  friend bool operator>(const Rational& a, const Rational& b) {
    return mpq_cmp(a.q_, b.q_) > 0;
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return mpq_cmp(a.q_, b.q_) >= 0;
  }

  bool is_zero() const { return mpq_sgn(q_) == 0; }
  int sign() const { return mpq_sgn(q_); }
  Rational abs() const {
    Rational r;
    mpq_abs(r.q_, q_);
    return r;
  }
  Rational inv() const {
    if (is_zero()) throw std::domain_error("Rational: inverse of zero");
    Rational r;
    mpq_inv(r.q_, q_);
    return r;
  }
  // Integer exponent power (e may be negative).
  Rational pow(long e) const {
    if (e < 0) return inv().pow(-e);
    Rational base = *this, acc = 1;
    unsigned long n = static_cast<unsigned long>(e);
    while (n) {
      if (n & 1) acc *= base;
      base *= base;
      n >>= 1;
    }
    return acc;
  }

  bool is_integer() const { return mpz_cmp_ui(mpq_denref(q_), 1) == 0; }
  // Valid only when the value fits a long.
  long to_long() const {
    if (!is_integer()) throw std::domain_error("Rational: not an integer");
    if (!mpz_fits_slong_p(mpq_numref(q_)))
      throw std::overflow_error("Rational: integer too large for long");
    return mpz_get_si(mpq_numref(q_));
  }
  double to_double() const { return mpq_get_d(q_); }

  std::string to_string() const {
    char* c = mpq_get_str(nullptr, 10, q_);
    std::string s(c);
    void (*freefunc)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefunc);
    freefunc(c, s.size() + 1);
    return s;
  }
  std::string numerator_string() const {
    char* c = mpz_get_str(nullptr, 10, mpq_numref(q_));
    std::string s(c);
    void (*freefunc)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefunc);
    freefunc(c, s.size() + 1);
    return s;
  }
  std::string denominator_string() const {
    char* c = mpz_get_str(nullptr, 10, mpq_denref(q_));
    std::string s(c);
    void (*freefunc)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefunc);
    freefunc(c, s.size() + 1);
    return s;
  }

  const mpq_t& raw() const { return q_; }

 private:
  mpq_t q_;
};

// n! as an exact rational (n >= 0).
inline Rational factorial(long n) {
  if (n < 0) throw std::domain_error("factorial: negative argument");
  mpz_t f;
  mpz_init(f);
  mpz_fac_ui(f, static_cast<unsigned long>(n));
  char* c = mpz_get_str(nullptr, 10, f);
  Rational r{std::string(c)};
  void (*freefunc)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefunc);
  freefunc(c, std::string(c).size() + 1);
  mpz_clear(f);
  return r;
}

// Binomial coefficient C(n, k) for integer n (possibly negative), k >= 0.
inline Rational binomial(long n, long k) {
  if (k < 0) return 0;
  Rational num = 1;
  for (long i = 0; i < k; ++i) num *= Rational(n - i);
  return num / factorial(k);
}

// Rising factorial x(x+1)...(x+n-1).
inline Rational rising(const Rational& x, long n) {
  Rational r = 1;
  for (long i = 0; i < n; ++i) r *= x + Rational(i);
  return r;
}

}  // namespace psitree
