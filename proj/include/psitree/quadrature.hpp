#pragma once

// tanh-sinh (double-exponential) quadrature with level doubling.
//
// The substitution t = tanh((pi/2) sinh u) concentrates nodes double-
// exponentially at the endpoints, so integrands with algebraic endpoint
// singularities converge geometrically in the level. The integral is accepted
// once two successive levels agree to the requested tolerance.
//
// Integrands receive (x, dist_to_a, dist_to_b); the endpoint distances are
// computed without cancellation so that singular factors such as
// 1/sqrt(x - a) can be evaluated at full precision arbitrarily close to the
// endpoints.

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "psitree/bigreal.hpp"

namespace psitree {

using Integrand =
    std::function<BigReal(const BigReal& x, const BigReal& da, const BigReal& db)>;

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integrates f over the finite interval [a, b] to ~prec bits.
inline BigReal integrate(const Integrand& f, const BigReal& a, const BigReal& b,
                         long prec) {
  const long wp = prec + 64;
  const BigReal one(1, wp);
  const BigReal two(2, wp);
  const BigReal half_pi = BigReal::pi(wp) / two;
  const BigReal half_len = (b - a).round_to(wp) / two;
  const BigReal mid = (a + b).round_to(wp) / two;
  const BigReal tol = one.ldexp(-prec);
  const BigReal term_tol = one.ldexp(-wp);

  // weight(u) * f(node(u)); flip mirrors the node to the other half.
  auto node_term = [&](const BigReal& u, bool flip) -> BigReal {
    BigReal w = half_pi * u.sinh();
    // 1 -+ tanh(w) without cancellation: 1 - tanh(w) = 2 / (e^{2w} + 1).
    BigReal e2w = (two * w).exp();
    BigReal dist_hi = two / (e2w + one);        // 1 - t
    BigReal dist_lo = two / (one / e2w + one);  // 1 + t
    BigReal t = one - dist_hi;
    if (flip) {
      t = -t;
      std::swap(dist_hi, dist_lo);
    }
    BigReal x = mid + half_len * t;
    BigReal ch = w.cosh();
    BigReal weight = half_pi * u.cosh() / (ch * ch);
    return weight * f(x, half_len * dist_lo, half_len * dist_hi);
  };

  // sum_j term(j * h) over all integer multiples of h currently in play,
  // truncated once terms are negligible (their decay is double-exponential).
  auto add_terms = [&](BigReal& sum, const BigReal& h, long stride, long first) {
    long small_streak = 0;
    for (long j = first; j < (1L << 22); j += stride) {
      BigReal u = h * BigReal(j, wp);
      BigReal tp = node_term(u, false);
      BigReal tm = node_term(u, true);
      if (!tp.is_finite() || !tm.is_finite())
        throw QuadratureError("integrate: non-finite integrand value");
      sum += tp + tm;
      BigReal mag = BigReal::max(tp.abs(), tm.abs());
      BigReal scale = BigReal::max(sum.abs(), one);
      if (mag < term_tol * scale) {
        if (++small_streak >= 3) return;
      } else {
        small_streak = 0;
      }
    }
    throw QuadratureError("integrate: node truncation did not terminate");
  };

  BigReal h = one;
  BigReal sum = node_term(BigReal(0, wp), false);
  add_terms(sum, h, /*stride=*/1, /*first=*/1);
  BigReal estimate = sum * h * half_len;
  for (int level = 1; level <= 14; ++level) {
    h = h / two;
    add_terms(sum, h, /*stride=*/2, /*first=*/1);  // odd multiples of new h
    BigReal refined = sum * h * half_len;
    BigReal scale = BigReal::max(refined.abs(), one);
    bool done = (refined - estimate).abs() < tol * scale && level >= 3;
    estimate = refined;
    if (done) return estimate.round_to(prec);
  }
  throw QuadratureError("integrate: level doubling did not converge");
}

// Integrates f over [a, +inf), a > 0, by splitting at c = max(2a, a+1) and
// mapping the tail with x -> 1/x onto (0, 1/c].
inline BigReal integrate_to_inf(const Integrand& f, const BigReal& a, long prec) {
  if (a.sign() <= 0)
    throw std::domain_error("integrate_to_inf: requires a > 0");
  const long wp = prec + 64;
  BigReal c = BigReal::max(a + a, a + BigReal(1, wp)).round_to(wp);
  BigReal head = integrate(f, a.round_to(wp), c, prec + 8);
  Integrand tail = [&](const BigReal& u, const BigReal& da, const BigReal& db) {
    (void)u;
    (void)db;
    // The lower endpoint is 0, so da is the node position itself, computed
    // without the cancellation that makes u collapse to 0 near the endpoint.
    BigReal x = BigReal(1, da.precision()) / da;
    BigReal big(1, u.precision());  // distance to +inf: unused by our integrands
    return f(x, x - a, big) * x * x;
  };
  BigReal zero(0, wp);
  BigReal tail_val = integrate(tail, zero, BigReal(1, wp) / c, prec + 8);
  return (head + tail_val).round_to(prec);
}

}  // namespace psitree
