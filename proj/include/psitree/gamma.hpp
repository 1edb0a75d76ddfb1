#pragma once

// Gamma function for arbitrary-precision reals.
//
// log Gamma is computed from the Stirling asymptotic series with exact
// Bernoulli-number coefficients after shifting the argument far enough to the
// right that the optimally truncated series reaches the target accuracy; the
// shift is undone with the functional equation Gamma(x+1) = x Gamma(x).
// Negative non-integer arguments go through the reflection formula.
//
// Guard digits: all internal work happens at (prec + kGuardBits) bits and the
// result is rounded back, so the final relative error is <= 2^-(prec-2).

#include <stdexcept>
#include <vector>

#include "psitree/bigreal.hpp"
#include "psitree/rational.hpp"

namespace psitree {

inline constexpr long kGuardBits = 96;

// B_0, B_2, B_4, ... (even-index Bernoulli numbers), cached.
inline const Rational& bernoulli_even(std::size_t k) {
  static std::vector<Rational> all = {Rational(1)};   // B_0, B_1, B_2, ...
  static std::vector<Rational> even = {Rational(1)};  // B_0, B_2, ...
  while (even.size() <= k) {
    // sum_{j=0}^{m} C(m+1, j) B_j = 0  =>  B_m.
    std::size_t m = all.size();
    Rational s = 0;
    for (std::size_t j = 0; j < m; ++j)
      s += binomial(static_cast<long>(m) + 1, static_cast<long>(j)) * all[j];
    all.push_back(-s / Rational(static_cast<long>(m) + 1));
    if (m % 2 == 0) even.push_back(all.back());
  }
  return even[k];
}

// log Gamma(x) for x > 0.
inline BigReal log_gamma(const BigReal& x, long prec) {
  if (x.sign() <= 0) throw std::domain_error("log_gamma: requires x > 0");
  const long wp = prec + kGuardBits;
  BigReal xs = x.round_to(wp);

  // Shift so the Stirling series can reach 2^-wp: its optimal truncation
  // error behaves like exp(-2 pi x), so x >= wp * ln2 / (2 pi) suffices.
  const long need = static_cast<long>(static_cast<double>(wp) * 0.1104) + 8;
  long shift = 0;
  if (xs < BigReal(need, wp)) shift = need - xs.floor().to_long();
  BigReal z = xs + BigReal(shift, wp);

  BigReal lz = z.log();
  BigReal half(Rational(1, 2), wp);
  BigReal res = (z - half) * lz - z +
                half * (BigReal(2, wp) * BigReal::pi(wp)).log();
  // sum_k B_{2k} / (2k (2k-1) z^(2k-1))
  BigReal z2 = z * z;
  BigReal zp = z;  // z^(2k-1)
  BigReal tol = BigReal(1, wp).ldexp(-wp + 4);
  for (std::size_t k = 1; k < 4096; ++k) {
    const Rational& b = bernoulli_even(k);
    long kk = static_cast<long>(k);
    BigReal term = BigReal(b / Rational(2 * kk * (2 * kk - 1)), wp) / zp;
    res += term;
    if (term.abs() < tol) break;
    zp *= z2;
  }
  // Undo the shift: log Gamma(x) = log Gamma(x + shift) - sum log(x + i).
  for (long i = 0; i < shift; ++i)
    res -= (xs + BigReal(i, wp)).log();
  return res.round_to(prec);
}

// Gamma(x) for real x, poles at non-positive integers.
inline BigReal eval_gamma(const BigReal& x, long prec) {
  const long wp = prec + kGuardBits;
  BigReal xs = x.round_to(wp);
  if (xs.sign() > 0) return log_gamma(xs, wp).exp().round_to(prec);
  if (xs == xs.floor())
    throw std::domain_error("eval_gamma: pole at non-positive integer");
  // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x)).
  BigReal pi = BigReal::pi(wp);
  BigReal s = (pi * xs).sin();
  BigReal g = log_gamma(BigReal(1, wp) - xs, wp).exp();
  return (pi / (s * g)).round_to(prec);
}

// Beta(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0.
inline BigReal eval_beta(const BigReal& a, const BigReal& b, long prec) {
  const long wp = prec + kGuardBits;
  return (log_gamma(a.round_to(wp), wp) + log_gamma(b.round_to(wp), wp) -
          log_gamma((a + b).round_to(wp), wp))
      .exp()
      .round_to(prec);
}

}  // namespace psitree
