#pragma once

// Arbitrary-precision real arithmetic on top of MPFR.
//
// Every value carries its own precision (>= 64 bits). Binary operations
// promote the result to the maximum precision of the operands and round to
// nearest, which makes every computation bit-for-bit reproducible for a fixed
// set of input precisions.

#include <mpfr.h>

#include <algorithm>
#include <stdexcept>
#include <string>

#include "psitree/rational.hpp"

namespace psitree {

class BigReal {
 public:
  static constexpr long kMinPrec = 64;

  explicit BigReal(long prec = 128) : prec_(std::max(prec, kMinPrec)) {
    mpfr_init2(v_, prec_);
    mpfr_set_zero(v_, 1);
  }
  BigReal(long n, long prec) : prec_(std::max(prec, kMinPrec)) {
    mpfr_init2(v_, prec_);
    mpfr_set_si(v_, n, MPFR_RNDN);
  }
  BigReal(int n, long prec) : BigReal(static_cast<long>(n), prec) {}
  BigReal(const Rational& q, long prec) : prec_(std::max(prec, kMinPrec)) {
    mpfr_init2(v_, prec_);
    mpfr_set_q(v_, q.raw(), MPFR_RNDN);
  }
  BigReal(double d, long prec) : prec_(std::max(prec, kMinPrec)) {
    mpfr_init2(v_, prec_);
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  // Parses a decimal string such as "3.14085e0" at the given precision.
  BigReal(const std::string& s, long prec) : prec_(std::max(prec, kMinPrec)) {
    mpfr_init2(v_, prec_);
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0 && mpfr_nan_p(v_))
      throw std::invalid_argument("BigReal: cannot parse '" + s + "'");
  }
  BigReal(const BigReal& o) : prec_(o.prec_) {
    mpfr_init2(v_, prec_);
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigReal(BigReal&& o) noexcept : prec_(o.prec_) {
    mpfr_init2(v_, prec_);
    mpfr_swap(v_, o.v_);
  }
  BigReal& operator=(const BigReal& o) {
    if (this != &o) {
      mpfr_set_prec(v_, o.prec_);
      prec_ = o.prec_;
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigReal& operator=(BigReal&& o) noexcept {
    std::swap(prec_, o.prec_);
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigReal() { mpfr_clear(v_); }

  long precision() const { return prec_; }
  // Returns this value re-rounded to a new precision.
  BigReal round_to(long prec) const {
    BigReal r(prec);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

#define PSITREE_BIGREAL_BINOP(op, fn)                           \
  friend BigReal operator op(const BigReal& a, const BigReal& b) { \
    BigReal r(std::max(a.prec_, b.prec_));                      \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                            \
    return r;                                                   \
  }
  PSITREE_BIGREAL_BINOP(+, mpfr_add)
  PSITREE_BIGREAL_BINOP(-, mpfr_sub)
  PSITREE_BIGREAL_BINOP(*, mpfr_mul)
  PSITREE_BIGREAL_BINOP(/, mpfr_div)
#undef PSITREE_BIGREAL_BINOP

  BigReal operator-() const {
    BigReal r(prec_);
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }
  BigReal& operator+=(const BigReal& o) { return *this = *this + o; }
  BigReal& operator-=(const BigReal& o) { return *this = *this - o; }
  BigReal& operator*=(const BigReal& o) { return *this = *this * o; }
  BigReal& operator/=(const BigReal& o) { return *this = *this / o; }

  friend bool operator==(const BigReal& a, const BigReal& b) {
    return mpfr_cmp(a.v_, b.v_) == 0;
  }
  friend bool operator!=(const BigReal& a, const BigReal& b) {
    return !(a == b);
  }
  friend bool operator<(const BigReal& a, const BigReal& b) {
    return mpfr_cmp(a.v_, b.v_) < 0;
  }
  friend bool operator<=(const BigReal& a, const BigReal& b) {
    return mpfr_cmp(a.v_, b.v_) <= 0;
  }
  friend bool operator>(const BigReal& a, const BigReal& b) {
    return mpfr_cmp(a.v_, b.v_) > 0;
  }
  friend bool operator>=(const BigReal& a, const BigReal& b) {
    return mpfr_cmp(a.v_, b.v_) >= 0;
  }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

#define PSITREE_BIGREAL_UNFN(name, fn)  \
  BigReal name() const {                \
    BigReal r(prec_);                   \
    fn(r.v_, v_, MPFR_RNDN);            \
    return r;                           \
  }
  PSITREE_BIGREAL_UNFN(abs, mpfr_abs)
  PSITREE_BIGREAL_UNFN(sqrt, mpfr_sqrt)
  PSITREE_BIGREAL_UNFN(log, mpfr_log)
  PSITREE_BIGREAL_UNFN(exp, mpfr_exp)
  PSITREE_BIGREAL_UNFN(sin, mpfr_sin)
  PSITREE_BIGREAL_UNFN(cos, mpfr_cos)
  PSITREE_BIGREAL_UNFN(tanh, mpfr_tanh)
  PSITREE_BIGREAL_UNFN(cosh, mpfr_cosh)
  PSITREE_BIGREAL_UNFN(sinh, mpfr_sinh)
#undef PSITREE_BIGREAL_UNFN

  BigReal pow(long e) const {
    BigReal r(prec_);
    if (e >= 0) {
      mpfr_pow_ui(r.v_, v_, static_cast<unsigned long>(e), MPFR_RNDN);
    } else {
      mpfr_pow_si(r.v_, v_, e, MPFR_RNDN);
    }
    return r;
  }
  BigReal pow(const BigReal& e) const {
    BigReal r(std::max(prec_, e.prec_));
    mpfr_pow(r.v_, v_, e.v_, MPFR_RNDN);
    return r;
  }
  // value * 2^e (exact).
  BigReal ldexp(long e) const {
    BigReal r(prec_);
    mpfr_mul_2si(r.v_, v_, e, MPFR_RNDN);
    return r;
  }
  // floor(log2 |x|); requires x != 0.
  long exponent2() const {
    if (is_zero()) throw std::domain_error("BigReal: exponent of zero");
    return static_cast<long>(mpfr_get_exp(v_)) - 1;
  }
  BigReal floor() const {
    BigReal r(prec_);
    mpfr_floor(r.v_, v_);
    return r;
  }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDZ); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  static BigReal pi(long prec) {
    BigReal r(prec);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  static BigReal max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }
  static BigReal min(const BigReal& a, const BigReal& b) { return a < b ? a : b; }

  // Decimal string with the requested number of significant digits
  // (default: full precision of the value).
  std::string to_string(long digits = 0) const {
    if (digits <= 0)
      digits = static_cast<long>(static_cast<double>(prec_) * 0.30103) + 2;
    char fmt[32];
    snprintf(fmt, sizeof fmt, "%%.%ldRe", digits - 1);
    char* buf = nullptr;
    mpfr_asprintf(&buf, fmt, v_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

 private:
  mpfr_t v_;
  long prec_;
};

}  // namespace psitree
