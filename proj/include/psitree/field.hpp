#pragma once

// Scalar field abstraction used by the mode-system machinery.
//
// The psi-series solver is generic over a field-like scalar F:
//   Rational      - exact, for families whose normalized ODE data is rational
//   AlgElem       - Q[x]/(minpoly), for exact symbolic constants such as the
//                   quadtree exponent v = (sqrt(17)-3)/2
//   BigReal       - arbitrary-precision floating point
//   Jet           - dual numbers over BigReal (value, d/dc) used to push exact
//                   sensitivities w.r.t. the free resonance constant through
//                   the linear solves
//   CPoly         - polynomials in the free constant c over Rational, used to
//                   build expansions whose coefficients depend on c
//
// FieldTraits<F> supplies construction from rationals (with a per-field
// context), an exactness flag, zero tests and a pivot score for elimination.

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "psitree/bigreal.hpp"
#include "psitree/rational.hpp"

namespace psitree {

// --- AlgElem: element of Q[x]/(p(x)), p monic with rational coefficients ---

struct AlgCtx {
  // Monic minimal polynomial: p(x) = x^deg + minpoly[deg-1] x^(deg-1) + ...
  std::vector<Rational> minpoly;  // size deg, the leading 1 is implicit
  BigReal root;                   // numeric value of the generator
  std::size_t deg() const { return minpoly.size(); }
};

class AlgElem {
 public:
  AlgElem() = default;
  AlgElem(std::shared_ptr<const AlgCtx> ctx, std::vector<Rational> c)
      : ctx_(std::move(ctx)), c_(std::move(c)) {
    c_.resize(ctx_->deg(), Rational(0));
  }
  static AlgElem from_rational(const std::shared_ptr<const AlgCtx>& ctx,
                               const Rational& q) {
    std::vector<Rational> c(ctx->deg(), Rational(0));
    c[0] = q;
    return AlgElem(ctx, std::move(c));
  }
  static AlgElem generator(const std::shared_ptr<const AlgCtx>& ctx) {
    std::vector<Rational> c(ctx->deg(), Rational(0));
    if (ctx->deg() < 2)
      throw std::domain_error("AlgElem: generator needs degree >= 2");
    c[1] = 1;
    return AlgElem(ctx, std::move(c));
  }

  bool is_zero() const {
    for (const auto& x : c_)
      if (!x.is_zero()) return false;
    return true;
  }
  const std::vector<Rational>& coeffs() const { return c_; }
  const std::shared_ptr<const AlgCtx>& ctx() const { return ctx_; }

  friend AlgElem operator+(const AlgElem& a, const AlgElem& b) {
    AlgElem r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
    return r;
  }
  friend AlgElem operator-(const AlgElem& a, const AlgElem& b) {
    AlgElem r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
    return r;
  }
  AlgElem operator-() const {
    AlgElem r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend AlgElem operator*(const AlgElem& a, const AlgElem& b) {
    const std::size_t d = a.ctx_->deg();
    std::vector<Rational> prod(2 * d - 1, Rational(0));
    for (std::size_t i = 0; i < d; ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < d; ++j) prod[i + j] += a.c_[i] * b.c_[j];
    }
    // Reduce modulo the monic minimal polynomial.
    for (std::size_t k = prod.size(); k-- > d;) {
      if (prod[k].is_zero()) continue;
      Rational f = prod[k];
      prod[k] = 0;
      for (std::size_t j = 0; j < d; ++j)
        prod[k - d + j] -= f * a.ctx_->minpoly[j];
    }
    prod.resize(d);
    return AlgElem(a.ctx_, std::move(prod));
  }
  AlgElem inv() const {
    // Extended Euclid in Q[x] on (this, minpoly).
    const std::size_t d = ctx_->deg();
    std::vector<Rational> r0 = ctx_->minpoly;  // monic p without leading 1
    r0.push_back(Rational(1));
    std::vector<Rational> r1 = c_;
    while (!r1.empty() && r1.back().is_zero()) r1.pop_back();
    if (r1.empty()) throw std::domain_error("AlgElem: inverse of zero");
    std::vector<Rational> s0 = {Rational(0)}, s1 = {Rational(1)};
    auto deg_of = [](const std::vector<Rational>& p) {
      return static_cast<long>(p.size()) - 1;
    };
    while (deg_of(r1) > 0) {
      // r0 = q r1 + r2
      std::vector<Rational> q(deg_of(r0) - deg_of(r1) + 1, Rational(0));
      std::vector<Rational> r2 = r0;
      for (long k = deg_of(r2); k >= deg_of(r1); --k) {
        Rational f = r2[k] / r1.back();
        q[k - deg_of(r1)] = f;
        if (f.is_zero()) continue;
        for (long j = 0; j <= deg_of(r1); ++j)
          r2[k - deg_of(r1) + j] -= f * r1[j];
      }
      while (!r2.empty() && r2.back().is_zero()) r2.pop_back();
      if (r2.empty())
        throw std::domain_error("AlgElem: not invertible (gcd nontrivial)");
      // s2 = s0 - q s1
      std::vector<Rational> s2(std::max(s0.size(), q.size() + s1.size()),
                               Rational(0));
      for (std::size_t i = 0; i < s0.size(); ++i) s2[i] = s0[i];
      for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < s1.size(); ++j) s2[i + j] -= q[i] * s1[j];
      while (!s2.empty() && s2.back().is_zero()) s2.pop_back();
      r0 = r1;
      r1 = r2;
      s0 = s1;
      s1 = s2.empty() ? std::vector<Rational>{Rational(0)} : s2;
    }
    // r1 is a nonzero constant: inverse = s1 / r1.
    std::vector<Rational> out(d, Rational(0));
    for (std::size_t i = 0; i < s1.size() && i < d; ++i) out[i] = s1[i] / r1[0];
    return AlgElem(ctx_, std::move(out));
  }
  friend AlgElem operator/(const AlgElem& a, const AlgElem& b) {
    return a * b.inv();
  }
  friend bool operator==(const AlgElem& a, const AlgElem& b) {
    return (a - b).is_zero();
  }
  friend bool operator!=(const AlgElem& a, const AlgElem& b) {
    return !(a == b);
  }

  BigReal to_bigreal(long prec) const {
    BigReal x = ctx_->root.round_to(prec);
    BigReal acc(0, prec);
    for (std::size_t i = c_.size(); i-- > 0;)
      acc = acc * x + BigReal(c_[i], prec);
    return acc;
  }

 private:
  std::shared_ptr<const AlgCtx> ctx_;
  std::vector<Rational> c_;
};

// --- Jet: first-order dual numbers (value, derivative) ---------------------

struct Jet {
  BigReal v, d;
  Jet() = default;
  Jet(BigReal value, BigReal deriv) : v(std::move(value)), d(std::move(deriv)) {}

  friend Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d}; }
  friend Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d}; }
  Jet operator-() const { return {-v, -d}; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d};
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    BigReal q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
  }
  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  bool is_zero() const { return v.is_zero() && d.is_zero(); }
};

// --- CPoly: polynomial in the free constant c over Q ----------------------

class CPoly {
 public:
  CPoly() = default;
  CPoly(Rational q) : c_{std::move(q)} { trim(); }  // NOLINT
  static CPoly c_times(const Rational& q) {  // q * c
    CPoly p;
    p.c_ = {Rational(0), q};
    p.trim();
    return p;
  }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(std::size_t k) const {
    return k < c_.size() ? c_[k] : Rational(0);
  }
  std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }

  friend CPoly operator+(const CPoly& a, const CPoly& b) {
    CPoly r;
    r.c_.resize(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r.c_[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r.c_[i] += b.c_[i];
    r.trim();
    return r;
  }
  friend CPoly operator-(const CPoly& a, const CPoly& b) {
    CPoly r;
    r.c_.resize(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r.c_[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r.c_[i] -= b.c_[i];
    r.trim();
    return r;
  }
  CPoly operator-() const {
    CPoly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend CPoly operator*(const CPoly& a, const CPoly& b) {
    CPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    r.c_.assign(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j)
        r.c_[i + j] += a.c_[i] * b.c_[j];
    r.trim();
    return r;
  }
  // Division only by nonzero constants (all pivots in our solves are
  // embedded rationals).
  friend CPoly operator/(const CPoly& a, const CPoly& b) {
    if (!b.is_constant() || b.is_zero())
      throw std::domain_error("CPoly: division only by nonzero constants");
    CPoly r = a;
    for (auto& x : r.c_) x /= b.c_[0];
    return r;
  }
  friend bool operator==(const CPoly& a, const CPoly& b) {
    return (a - b).is_zero();
  }
  friend bool operator!=(const CPoly& a, const CPoly& b) { return !(a == b); }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Rational> c_;  // c_[k] multiplies c^k
};

// --- traits ----------------------------------------------------------------

template <class F>
struct FieldTraits;

template <>
struct FieldTraits<Rational> {
  struct Ctx {};
  static constexpr bool exact = true;
  static Rational from_rational(const Ctx&, const Rational& q) { return q; }
  static bool is_zero(const Rational& x) { return x.is_zero(); }
  static double pivot_score(const Rational& x) {
    return x.is_zero() ? -std::numeric_limits<double>::infinity() : 0.0;
  }
};

template <>
struct FieldTraits<AlgElem> {
  struct Ctx {
    std::shared_ptr<const AlgCtx> alg;
  };
  static constexpr bool exact = true;
  static AlgElem from_rational(const Ctx& ctx, const Rational& q) {
    return AlgElem::from_rational(ctx.alg, q);
  }
  static bool is_zero(const AlgElem& x) { return x.is_zero(); }
  static double pivot_score(const AlgElem& x) {
    return x.is_zero() ? -std::numeric_limits<double>::infinity() : 0.0;
  }
};

template <>
struct FieldTraits<BigReal> {
  struct Ctx {
    long prec = 256;
  };
  static constexpr bool exact = false;
  static BigReal from_rational(const Ctx& ctx, const Rational& q) {
    return BigReal(q, ctx.prec);
  }
  static bool is_zero(const BigReal& x) { return x.is_zero(); }
  static double pivot_score(const BigReal& x) {
    if (x.is_zero()) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(x.exponent2());
  }
};

template <>
struct FieldTraits<Jet> {
  struct Ctx {
    long prec = 256;
  };
  static constexpr bool exact = false;
  static Jet from_rational(const Ctx& ctx, const Rational& q) {
    return {BigReal(q, ctx.prec), BigReal(0, ctx.prec)};
  }
  static bool is_zero(const Jet& x) { return x.is_zero(); }
  static double pivot_score(const Jet& x) {
    if (x.v.is_zero()) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(x.v.exponent2());
  }
};

template <>
struct FieldTraits<CPoly> {
  struct Ctx {};
  static constexpr bool exact = true;
  static CPoly from_rational(const Ctx&, const Rational& q) { return CPoly(q); }
  static bool is_zero(const CPoly& x) { return x.is_zero(); }
  static double pivot_score(const CPoly& x) {
    return x.is_zero() ? -std::numeric_limits<double>::infinity() : 0.0;
  }
};

}  // namespace psitree
