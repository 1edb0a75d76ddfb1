#pragma once

// Truncated formal (Puiseux) series with exact rational coefficients, plus
// the reversion machinery: a series with exponents in an arithmetic
// progression e0 + k*step is reverted by normalizing to an ordinary power
// series y = x * B(x), applying Lagrange inversion, and mapping back.
//
// Coefficients beyond the stored truncation order are undefined, never
// implicitly zero.

#include <stdexcept>
#include <vector>

#include "psitree/bigreal.hpp"
#include "psitree/rational.hpp"

namespace psitree {

// --- dense ordinary power-series helpers (index = power of x) -------------

inline std::vector<Rational> ps_mul(const std::vector<Rational>& a,
                                    const std::vector<Rational>& b,
                                    std::size_t n) {
  std::vector<Rational> c(n, Rational(0));
  for (std::size_t i = 0; i < a.size() && i < n; ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size() && i + j < n; ++j)
      c[i + j] += a[i] * b[j];
  }
  return c;
}

// A^q for a series with A[0] = 1 and rational exponent q, via the ODE
// recurrence A P' = q A' P.
inline std::vector<Rational> ps_pow1(const std::vector<Rational>& a,
                                     const Rational& q, std::size_t n) {
  if (a.empty() || a[0] != Rational(1))
    throw std::domain_error("ps_pow1: constant term must be 1");
  std::vector<Rational> p(n, Rational(0));
  p[0] = 1;
  for (std::size_t k = 1; k < n; ++k) {
    Rational s = 0;
    for (std::size_t j = 1; j <= k && j < a.size(); ++j)
      s += ((q + Rational(1)) * Rational(static_cast<long>(j)) -
            Rational(static_cast<long>(k))) *
           a[j] * p[k - j];
    p[k] = s / Rational(static_cast<long>(k));
  }
  return p;
}

// Composition a(b(x)) where b has zero constant term.
inline std::vector<Rational> ps_compose(const std::vector<Rational>& a,
                                        const std::vector<Rational>& b,
                                        std::size_t n) {
  if (!b.empty() && !b[0].is_zero())
    throw std::domain_error("ps_compose: inner constant term must be 0");
  std::vector<Rational> res(n, Rational(0));
  std::vector<Rational> bp(n, Rational(0));
  bp[0] = 1;  // b^0
  for (std::size_t k = 0; k < a.size() && k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) res[i] += a[k] * bp[i];
    bp = ps_mul(bp, b, n);
  }
  return res;
}

// Reversion of y = x * B(x) with B(0) = 1: returns C with x = y * C(y),
// via Lagrange inversion  [y^k] x = (1/k) [x^(k-1)] B(x)^(-k).
inline std::vector<Rational> ps_revert_normalized(const std::vector<Rational>& B,
                                                  std::size_t n) {
  std::vector<Rational> C(n, Rational(0));
  C[0] = 1;
  for (std::size_t k = 2; k <= n; ++k) {
    std::vector<Rational> Bk = ps_pow1(B, Rational(-static_cast<long>(k)), k);
    C[k - 1] = Bk[k - 1] / Rational(static_cast<long>(k));
  }
  return C;
}

// --- exact rational root: q^(num/den), throws when the result is irrational

inline Rational rational_pow_exact(const Rational& q, const Rational& e) {
  if (e.is_integer()) return q.pow(e.to_long());
  // q^(a/b): take exact b-th roots of numerator and denominator.
  Rational an(q);
  long a, b;
  {
    // e = a/b in lowest terms
    Rational num(e);
    a = std::stol(e.numerator_string());
    b = std::stol(e.denominator_string());
    (void)num;
  }
  if (q.sign() < 0) throw std::domain_error("rational_pow_exact: negative base");
  mpz_t nz, dz, rn, rd;
  mpz_inits(nz, dz, rn, rd, nullptr);
  mpz_set_str(nz, q.numerator_string().c_str(), 10);
  mpz_set_str(dz, q.denominator_string().c_str(), 10);
  int exact_n = mpz_root(rn, nz, static_cast<unsigned long>(b));
  int exact_d = mpz_root(rd, dz, static_cast<unsigned long>(b));
  if (!exact_n || !exact_d) {
    mpz_clears(nz, dz, rn, rd, nullptr);
    throw std::domain_error("rational_pow_exact: irrational root");
  }
  char* cn = mpz_get_str(nullptr, 10, rn);
  char* cd = mpz_get_str(nullptr, 10, rd);
  Rational root(std::string(cn) + "/" + cd);
  void (*freefunc)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefunc);
  freefunc(cn, std::string(cn).size() + 1);
  freefunc(cd, std::string(cd).size() + 1);
  mpz_clears(nz, dz, rn, rd, nullptr);
  return root.pow(a);
}

// --- Puiseux series -------------------------------------------------------

struct FormalSeries {
  Rational base_exp;             // exponent of coeffs[0]
  Rational step;                 // exponent spacing (nonzero)
  std::vector<Rational> coeffs;  // coeffs[k] multiplies X^(base_exp + k*step)

  std::size_t order() const { return coeffs.size(); }

  Rational exponent(std::size_t k) const {
    return base_exp + step * Rational(static_cast<long>(k));
  }

  BigReal evaluate(const BigReal& x, long prec) const {
    BigReal lx = x.round_to(prec).log();
    BigReal s(0, prec);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      if (coeffs[k].is_zero()) continue;
      BigReal e(exponent(k), prec);
      s += BigReal(coeffs[k], prec) * (e * lx).exp();
    }
    return s;
  }
};

// Reverts w = S(V) into V = T(w). The leading coefficient c0 of S must have
// an exact rational power c0^(1/e0) (true for every series in this project).
inline FormalSeries revert_series(const FormalSeries& s, std::size_t order) {
  if (s.coeffs.empty() || s.coeffs[0].is_zero())
    throw std::domain_error("revert_series: zero leading coefficient");
  if (s.base_exp.is_zero())
    throw std::domain_error("revert_series: zero leading exponent");
  const Rational c0 = s.coeffs[0];
  const Rational e0 = s.base_exp;
  const Rational st = s.step;

  // Normalize: w = c0 V^e0 A(x), x := V^st, A(0) = 1.
  std::vector<Rational> A(order + 1, Rational(0));
  for (std::size_t k = 0; k <= order && k < s.coeffs.size(); ++k)
    A[k] = s.coeffs[k] / c0;

  // y := (w/c0)^(st/e0) = x * B(x),  B = A^(st/e0).
  std::vector<Rational> B = ps_pow1(A, st / e0, order + 1);
  std::vector<Rational> C = ps_revert_normalized(B, order + 1);  // x = y C(y)

  // V = (w/c0)^(1/e0) A(x)^(-1/e0); substitute x = y C(y).
  std::vector<Rational> x_of_y = C;  // shifted by one power of y below
  std::vector<Rational> x_series(order + 1, Rational(0));
  for (std::size_t k = 0; k + 1 <= order; ++k) x_series[k + 1] = x_of_y[k];
  std::vector<Rational> Ainv = ps_pow1(A, Rational(-1) / e0, order + 1);
  std::vector<Rational> D = ps_compose(Ainv, x_series, order + 1);

  // Assemble T(w) = sum_k D_k (w/c0)^(1/e0) w^(k*st/e0): exponents
  // 1/e0 + k*st/e0, coefficients D_k * c0^(-(1/e0 + k*st/e0)).
  FormalSeries t;
  t.base_exp = Rational(1) / e0;
  t.step = st / e0;
  t.coeffs.resize(order + 1, Rational(0));
  for (std::size_t k = 0; k <= order; ++k) {
    Rational e = t.base_exp + t.step * Rational(static_cast<long>(k));
    t.coeffs[k] = D[k] * rational_pow_exact(c0, -e);
  }
  return t;
}

}  // namespace psitree
