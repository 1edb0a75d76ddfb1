#pragma once

// Transfer step: from the psi-series around the movable singularity to an
// asymptotic expansion of the normalized sequence
//
//   what_n := nu_f w_n rho^n = [w^n] sum_k u_k(log(1-w)) (1-w)^{k-alpha},
//
// where w_n are the connection coefficients (sequences.hpp) and the modes
// u_k come from the rho-free normalization (mode_system.hpp). Extraction is
// exact:
//
//   [w^n](1-w)^a = T(a) with T(a) = prod_{0<=i<n}(i-a)/n!   (a polynomial),
//   [w^n](1-w)^a log^l(1-w) = T^(l)(a),
//
// so for integer exponents e in [0, n) (simple zeros of T)
//
//   T'(e)   = (-1)^{e+1} e! (n-e-1)!/n!,
//   T''(e)  = -2 T'(e) (H_{n-e-1} - H_e),
//   T'''(e) =  3 T'(e) ((H_{n-e-1} - H_e)^2 - H2_{n-e-1} - H2_e),
//
// with H_k (H2_k) the (second-order) harmonic numbers. Negative exponents
// e < 0 contribute the exact polynomial binom(n-e-1, -e-1); the tau-degree-0
// parts of nonnegative exponents contribute nothing (pure powers of (1-w)
// are polynomials). Re-expanding the factorials in powers of 1/n turns the
// mode data into an expansion in n^-1 with H_n attached to the log^2 parts;
// all of its coefficients stay in the coefficient field (exact when the
// modes are exact). log^3 parts would bring in zeta(2) and are rejected if
// they fall inside the requested order.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "psitree/bigreal.hpp"
#include "psitree/connection.hpp"
#include "psitree/family.hpp"
#include "psitree/mode_system.hpp"
#include "psitree/psi_series.hpp"
#include "psitree/rational.hpp"
#include "psitree/sequences.hpp"

namespace psitree {

// Exact coefficient extraction: [w^n](1-w)^a log^l(1-w) for integer a and
// 0 <= l <= 3, as a rational number. For a >= n and l >= 1 the answer is
// still T^(l)(a) (T has no zero there), handled by the general-point branch.
inline Rational coeff_extract(long a, long l, long n) {
  if (n < 0 || l < 0 || l > 3)
    throw std::domain_error("coeff_extract: need n >= 0 and 0 <= l <= 3");
  if (l == 0) {  // (-1)^n binom(a, n)
    Rational b = binomial(a, n);
    return (n % 2 == 0) ? b : -b;
  }
  if (a >= 0 && a < n) {  // simple zero of T at a
    Rational tp = factorial(a) * factorial(n - a - 1) / factorial(n);
    if (a % 2 == 0) tp = -tp;
    if (l == 1) return tp;
    Rational h1 = 0, h2 = 0;  // H_{n-a-1} - H_a and H2_{n-a-1} + H2_a
    for (long j = 1; j <= n - a - 1; ++j) {
      h1 += Rational(1, j);
      h2 += Rational(1, j * j);
    }
    for (long j = 1; j <= a; ++j) {
      h1 -= Rational(1, j);
      h2 += Rational(1, j * j);
    }
    if (l == 2) return -Rational(2) * tp * h1;
    return Rational(3) * tp * (h1 * h1 - h2);
  }
  // General point: T(a) != 0, use logarithmic derivatives
  // sigma_k = sum_{0<=i<n} (k-1)! / (a-i)^k (signed), T' = T s1,
  // T'' = T (s1^2 + s2'), T''' = T (s1^3 + 3 s1 s2' + s3'').
  Rational T = coeff_extract(a, 0, n);
  Rational s1 = 0, d2 = 0, d3 = 0;
  for (long i = 0; i < n; ++i) {
    Rational ai = Rational(a - i);
    s1 += ai.inv();
    d2 -= (ai * ai).inv();
    d3 += Rational(2) * (ai * ai * ai).inv();
  }
  if (l == 1) return T * s1;
  if (l == 2) return T * (s1 * s1 + d2);
  return T * (s1 * s1 * s1 + Rational(3) * s1 * d2 + d3);
}

template <class F>
struct AsymTerm {
  long exp;  // power of n (positive for the leading polynomial part)
  int hn;    // 0 or 1: multiplied by H_n^hn
  F coeff;
};

template <class F>
struct Expansion {
  Family family;
  long alpha = 0;
  long order = 0;       // kept through n^-order
  long modes_used = 0;
  std::vector<AsymTerm<F>> terms;  // sorted by decreasing exp, hn last
};

namespace detail {

// Truncated power series in x = 1/n over F, length ord + 1.
template <class F>
using NSeries = std::vector<F>;

template <class F>
NSeries<F> ns_mul(const NSeries<F>& a, const NSeries<F>& b, long ord,
                  const typename FieldTraits<F>::Ctx& ctx) {
  NSeries<F> r(ord + 1, FieldTraits<F>::from_rational(ctx, Rational(0)));
  for (long i = 0; i <= ord && i < static_cast<long>(a.size()); ++i)
    for (long j = 0; i + j <= ord && j < static_cast<long>(b.size()); ++j)
      r[i + j] = r[i + j] + a[i] * b[j];
  return r;
}

// prod_{i=1}^{e} (1 - i x)^{-1}, i.e. n^{e+1} prod_{i=0}^{e} (n-i)^{-1}.
template <class F>
NSeries<F> ns_inv_falling(long e, long ord,
                          const typename FieldTraits<F>::Ctx& ctx) {
  NSeries<F> r(ord + 1, FieldTraits<F>::from_rational(ctx, Rational(0)));
  r[0] = FieldTraits<F>::from_rational(ctx, Rational(1));
  for (long i = 1; i <= e; ++i) {
    NSeries<F> g(ord + 1, FieldTraits<F>::from_rational(ctx, Rational(0)));
    Rational p = 1;
    for (long k = 0; k <= ord; ++k) {
      g[k] = FieldTraits<F>::from_rational(ctx, p);
      p *= Rational(i);
    }
    r = ns_mul<F>(r, g, ord, ctx);
  }
  return r;
}

// sum_{i=0}^{e} 1/(n-i) = sum_k x^{k+1} sum_{i=0}^{e} i^k.
template <class F>
NSeries<F> ns_sum_inv(long e, long ord,
                      const typename FieldTraits<F>::Ctx& ctx) {
  NSeries<F> r(ord + 1, FieldTraits<F>::from_rational(ctx, Rational(0)));
  for (long k = 0; k + 1 <= ord; ++k) {
    Rational s = 0;
    for (long i = 0; i <= e; ++i) s += Rational(i).pow(k);
    r[k + 1] = FieldTraits<F>::from_rational(ctx, s);
  }
  return r;
}

}  // namespace detail

// Builds the asymptotic expansion of nu_f w_n rho^n through order n^-order
// from K = alpha + order modes of the psi-series solved at the resonance
// constant c_r (pass CPoly::c_times(1) over CPoly to keep it symbolic).
template <class F>
Expansion<F> build_expansion(const Family& f, long order,
                             const typename FieldTraits<F>::Ctx& ctx,
                             const F& c_r) {
  if (order < 1) throw std::domain_error("build_expansion: order >= 1");
  ModeSystem<F> ms = build_mode_system<F>(f, ctx);
  const long alpha = ms.alpha;
  const long K = alpha + order;
  PsiSeries<F> ps = solve_modes(ms, K, c_r);

  Expansion<F> ex;
  ex.family = f;
  ex.alpha = alpha;
  ex.order = order;
  ex.modes_used = K;

  // accumulate coefficients per (exp, hn); exp from alpha-1 down to -order
  const long span = (alpha - 1) + order + 1;
  auto zero = [&] { return FieldTraits<F>::from_rational(ctx, Rational(0)); };
  std::vector<F> plain(span, zero()), withh(span, zero());
  auto slot = [&](long exp) { return (alpha - 1) - exp; };

  for (long k = 0; k <= K; ++k) {
    const TauPoly<F>& u = ps.mode(k, 0);
    const long deg = u.degree();
    const long e = k - alpha;
    if (e < 0) {
      // u_k Z^{-j}, j = -e: exact polynomial binom(n+j-1, j-1).
      if (deg > 0)
        throw std::domain_error(
            "build_expansion: logarithm attached to a pole mode");
      if (deg < 0) continue;
      const long j = -e;
      std::vector<Rational> poly = {Rational(1)};  // prod (n+i), i=1..j-1
      for (long i = 1; i <= j - 1; ++i) {
        std::vector<Rational> next(poly.size() + 1, Rational(0));
        for (std::size_t t = 0; t < poly.size(); ++t) {
          next[t] += poly[t] * Rational(i);
          next[t + 1] += poly[t];
        }
        poly = std::move(next);
      }
      Rational fj = factorial(j - 1);
      for (std::size_t t = 0; t < poly.size(); ++t) {
        F add = u.coeffs()[0] *
                FieldTraits<F>::from_rational(ctx, poly[t] / fj);
        plain[slot(static_cast<long>(t))] = plain[slot(static_cast<long>(t))] + add;
      }
      continue;
    }
    if (deg <= 0) continue;  // tau-free analytic part: no n^-j contribution
    if (e + 1 > order) continue;  // entirely beyond the requested order
    if (deg >= 3)
      throw std::domain_error(
          "build_expansion: log^3 mode inside the requested order needs "
          "zeta(2); reduce the order");
    const long sord = order - (e + 1);  // series length past x^{e+1}
    detail::NSeries<F> tprime = detail::ns_inv_falling<F>(e, sord, ctx);
    Rational sign_e_fact = factorial(e);
    if (e % 2 == 0) sign_e_fact = -sign_e_fact;  // (-1)^{e+1} e!
    // tau^1 part: a1 * T'(e)
    const F a1 = u.coeffs()[1];
    if (!FieldTraits<F>::is_zero(a1)) {
      F s = a1 * FieldTraits<F>::from_rational(ctx, sign_e_fact);
      for (long t = 0; t <= sord; ++t)
        plain[slot(-(e + 1 + t))] = plain[slot(-(e + 1 + t))] + s * tprime[t];
    }
    // tau^2 part: a2 * T''(e) = -2 a2 T'(e) (H_n - H_e - sum_{i<=e} 1/(n-i))
    if (deg >= 2) {
      const F a2 = u.coeffs()[2];
      if (!FieldTraits<F>::is_zero(a2)) {
        F s = a2 * FieldTraits<F>::from_rational(ctx, sign_e_fact);
        Rational he = 0;
        for (long j = 1; j <= e; ++j) he += Rational(1, j);
        detail::NSeries<F> rest = detail::ns_sum_inv<F>(e, sord, ctx);
        rest[0] = rest[0] + FieldTraits<F>::from_rational(ctx, he);
        rest = detail::ns_mul<F>(tprime, rest, sord, ctx);
        const F two = FieldTraits<F>::from_rational(ctx, Rational(2));
        for (long t = 0; t <= sord; ++t) {
          withh[slot(-(e + 1 + t))] =
              withh[slot(-(e + 1 + t))] - two * s * tprime[t];
          plain[slot(-(e + 1 + t))] =
              plain[slot(-(e + 1 + t))] + two * s * rest[t];
        }
      }
    }
  }

  for (long exp = alpha - 1; exp >= -order; --exp) {
    if (!FieldTraits<F>::is_zero(plain[slot(exp)]))
      ex.terms.push_back({exp, 0, plain[slot(exp)]});
    if (!FieldTraits<F>::is_zero(withh[slot(exp)]))
      ex.terms.push_back({exp, 1, withh[slot(exp)]});
  }
  return ex;
}

// Coefficient lookup (zero when absent).
template <class F>
F expansion_coeff(const Expansion<F>& ex, long exp, int hn) {
  for (const auto& t : ex.terms)
    if (t.exp == exp && t.hn == hn) return t.coeff;
  return F();
}

inline BigReal harmonic_number(long n, long prec) {
  BigReal h(0, prec);
  for (long j = 1; j <= n; ++j) h = h + BigReal(1, prec) / BigReal(j, prec);
  return h;
}

// Evaluates the expansion at a concrete n, keeping only terms with
// exp >= -through. `lower` converts coefficients to BigReal (identity-like
// for Rational/BigReal; substitutes numbers for AlgElem/CPoly coefficients).
template <class F, class Lower>
BigReal eval_expansion(const Expansion<F>& ex, long n, long through,
                       long prec, Lower&& lower) {
  BigReal acc(0, prec);
  BigReal hn = harmonic_number(n, prec);
  BigReal bn(n, prec);
  for (const auto& t : ex.terms) {
    if (t.exp < -through) continue;
    BigReal v = lower(t.coeff);
    if (t.exp >= 0)
      for (long i = 0; i < t.exp; ++i) v = v * bn;
    else
      for (long i = 0; i < -t.exp; ++i) v = v / bn;
    if (t.hn) v = v * hn;
    acc = acc + v;
  }
  return acc;
}

inline BigReal eval_expansion(const Expansion<Rational>& ex, long n,
                              long through, long prec) {
  return eval_expansion(ex, n, through, prec,
                        [&](const Rational& q) { return BigReal(q, prec); });
}

struct ValidationReport {
  Family family;
  long order = 0;        // expansion truncated after n^-order
  long n_lo = 0, n_hi = 0;
  double decay_exponent = 0;  // fitted slope of -log|residual| vs log n
  double max_scaled_residual = 0;  // max over samples of |R(n)| n^order
};

// Compares the normalized sequence nu_f w_n rho^n against the expansion
// truncated after n^-through and fits the decay rate of the remainder by
// least squares on (log n, log |R(n)|).
template <class F, class Lower>
ValidationReport validate_expansion(const Expansion<F>& ex,
                                    const BigReal& rho, long through,
                                    long n_lo, long n_hi, long prec,
                                    Lower&& lower) {
  if (n_lo < 2 || n_hi <= n_lo)
    throw std::domain_error("validate_expansion: need 2 <= n_lo < n_hi");
  const Family& f = ex.family;
  std::vector<BigReal> w = connection_coeffs(f, n_hi, prec);
  auto nu = detail::connection_scale(f, rho.round_to(prec), prec).first;

  std::vector<long> samples;
  for (double x = n_lo; x <= n_hi + 0.5; x *= 1.25)
    samples.push_back(static_cast<long>(x));
  samples.back() = n_hi;

  double sx = 0, sy = 0, sxx = 0, sxy = 0, maxsc = 0;
  BigReal rp = rho.round_to(prec).pow(samples.front());
  long cur = samples.front();
  for (long n : samples) {
    for (; cur < n; ++cur) rp = rp * rho;
    BigReal oracle = nu * w[n] * rp;
    BigReal pred = eval_expansion(ex, n, through, prec, lower);
    double r = (oracle - pred).abs().to_double();
    if (r <= 0) continue;
    double lx = std::log(static_cast<double>(n)), ly = std::log(r);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    maxsc = std::max(maxsc, r * std::pow(static_cast<double>(n),
                                         static_cast<double>(through)));
  }
  double m = static_cast<double>(samples.size());
  ValidationReport rep;
  rep.family = f;
  rep.order = through;
  rep.n_lo = n_lo;
  rep.n_hi = n_hi;
  rep.decay_exponent = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.max_scaled_residual = maxsc;
  return rep;
}

inline ValidationReport validate_expansion(const Expansion<Rational>& ex,
                                           const BigReal& rho, long through,
                                           long n_lo, long n_hi, long prec) {
  return validate_expansion(ex, rho, through, n_lo, n_hi, prec,
                            [&](const Rational& q) { return BigReal(q, prec); });
}

// Recursive-partition structures for general d: Frobenius analysis of the
// theta-operator equation
//
//   lambda theta (lambda theta - 1) ... (lambda theta - d + 1) H
//     = z^{-kappa} (omega)_d H^2,      kappa = (d + omega - 1)/lambda,
//
// around the movable singularity (which scales out of the normalized
// coefficients). The two leading Laurent coefficients determine the H-scale
// ratio c1, the h-scale ratio c1 + kappa (h = z^{-kappa} H), and, through
// the coefficient transfer n^{-d} binom(n+d-1,d-1)-expansion, the moment
// constant C1 = binom(d,2) + (d-1)(c1 + kappa).
struct PartitionConstants {
  Rational amplitude;  // leading Z^-d coefficient of H at the singularity
  Rational c1;         // second H-scale coefficient (c0 = 1)
  Rational c1_h;       // second h-scale coefficient
  Rational C1;         // subleading moment constant (C0 = 1)
};

inline PartitionConstants partition_constants(long d, const Rational& omega,
                                              const Rational& lambda) {
  if (d < 2) throw std::domain_error("partition_constants: d >= 2");
  Rational kappa = (Rational(d) + omega - Rational(1)) / lambda;
  Rational rising = 1;
  for (long i = 0; i < d; ++i) rising *= omega + Rational(i);

  // Laurent window Z^-2d .. Z^{-2d+1}; exponents stored with offset +2d.
  // theta = -(1-Z) d/dZ maps Z^e to -e Z^{e-1} + e Z^e.
  auto lhs2 = [&](const Rational& u1) {
    // u = Z^-d + u1 Z^{-d+1}; apply (lambda theta - i), i = 0..d-1; return
    // the coefficients of Z^-2d and Z^{-2d+1}.
    std::vector<Rational> coef(2 * d + 2, Rational(0));  // exp = idx - 2d
    coef[d] = Rational(1);
    coef[d + 1] = u1;
    for (long i = 0; i < d; ++i) {
      std::vector<Rational> next(coef.size(), Rational(0));
      for (std::size_t t = 0; t < coef.size(); ++t) {
        if (coef[t].is_zero()) continue;
        Rational e = Rational(static_cast<long>(t)) - Rational(2 * d);
        if (t > 0) next[t - 1] -= lambda * e * coef[t];
        next[t] += (lambda * e - Rational(i)) * coef[t];
      }
      coef = std::move(next);
    }
    return std::pair<Rational, Rational>(coef[0], coef[1]);
  };

  auto [l0, l1_of_0] = lhs2(Rational(0));
  auto [l0b, l1_of_1] = lhs2(Rational(1));
  (void)l0b;
  // Order Z^-2d: l0 * A = (omega)_d A^2  =>  A = l0 / (omega)_d.
  Rational A = l0 / rising;
  // Order Z^{-2d+1} with u1 = c1:
  //   A (l1_of_0 + c1 (l1_of_1 - l1_of_0)) = (omega)_d A^2 (2 c1 + kappa),
  // using (1-Z)^{-kappa} = 1 + kappa Z + O(Z^2).
  Rational slope = l1_of_1 - l1_of_0 - Rational(2) * l0;
  Rational c1 = (l0 * kappa - l1_of_0) / slope;

  PartitionConstants pc;
  pc.amplitude = A;
  pc.c1 = c1;
  pc.c1_h = c1 + kappa;
  pc.C1 = binomial(d, 2) + Rational(d - 1) * pc.c1_h;
  return pc;
}

// Moment generating function of the quadtree partial-match limit law,
// E(e^{Xz}) = sum_m E(X^m) z^m / m!, summed to convergence at z > 0,
// together with the three-term singular approximation
// e^{y}(3y + 9/5 - (22464/21875) y^{-5}), y = (z/rho)^{1/v}.
struct MgfPoint {
  BigReal value;          // E(e^{Xz})
  BigReal approximation;  // three-term formula
  BigReal gap;            // |value - approximation| / e^y
};

inline MgfPoint quadtree_mgf(const BigReal& z, const BigReal& rho,
                             long prec) {
  Family f = Family::quadtree();
  BigReal v = (BigReal(17, prec).sqrt() - BigReal(3, prec)) / BigReal(2, prec);
  // Terms are (a_m/m!) z^m / Gamma(m v + 1); peak near m* = (z/rho)^{1/v}.
  BigReal y = (z.round_to(prec) / rho.round_to(prec))
                  .pow(BigReal(1, prec) / v);
  long m_max = static_cast<long>(y.to_double() * 3) + 200;
  std::vector<BigReal> w = connection_coeffs(f, m_max, prec);  // a_m/m!
  BigReal sum(0, prec), zp(1, prec);
  for (long m = 0; m <= m_max; ++m) {
    BigReal g = eval_gamma(v * BigReal(m, prec) + BigReal(1, prec), prec);
    sum = sum + w[m] * zp / g;
    zp = zp * z;
  }
  MgfPoint p{sum, BigReal(0, prec), BigReal(0, prec)};
  BigReal ey = y.exp();
  BigReal y5 = y.pow(-5L);
  p.approximation =
      ey * (BigReal(3, prec) * y + BigReal(Rational(9, 5), prec) -
            BigReal(Rational(22464, 21875), prec) * y5);
  p.gap = (p.value - p.approximation).abs() / ey;
  return p;
}

}  // namespace psitree
