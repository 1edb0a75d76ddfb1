#pragma once

// Integrable Boltzmann cases (nu = 1, 2): the transformed equations solve by
// quadrature, giving the dominant singularity as an explicit integral,
//
//   nu = 1:  2 sqrt(zeta_inf) = int_1^inf dx / sqrt(x^3 - 1),
//   nu = 2:  zeta_inf = int_0^inf dx / sqrt(4 x^3 + 1)
//                     = 2^(1/3) Beta(1/6, 1/3) / 6,
//
// and a local inversion: Delta (the distance to the singularity in the
// transformed variable) expands in descending half-integer powers of the
// blowing-up solution, and series reversion recovers the solution in powers
// of Delta. The leading reverted term yields closed-form coefficient
// asymptotics with exponentially small error:
//
//   nu = 1:  t_n ~ 2 (-1)^(n-1) (2n - 1) |rho|^(-n),   rho = -zeta_inf,
//   nu = 2:  t_n ~ 3 (-1)^(n-1) (3n - 1) |rho|^(-n),   rho = -zeta_inf^3.

#include <stdexcept>

#include "psitree/bigreal.hpp"
#include "psitree/family.hpp"
#include "psitree/formal_series.hpp"
#include "psitree/gamma.hpp"
#include "psitree/quadrature.hpp"
#include "psitree/rational.hpp"

namespace psitree {

struct IntegrableSolution {
  long nu = 0;
  BigReal zeta_inf;
  BigReal rho;                 // negative: -zeta_inf (nu=1), -zeta_inf^3 (nu=2)
  FormalSeries delta_series;   // Delta in descending powers of the solution
  FormalSeries inverse_series; // solution in ascending powers of Delta
};

// Delta = int_W^inf dx / sqrt(x^3 - 1) (nu=1) or dx / sqrt(4x^3 + 1) (nu=2),
// expanded at large W by the binomial series of the integrand: exponents
// -(6k+1)/2, k = 0..order.
inline FormalSeries integrable_delta_series(long nu, std::size_t order) {
  if (nu != 1 && nu != 2)
    throw std::domain_error("integrable_delta_series: nu must be 1 or 2");
  FormalSeries s;
  s.base_exp = Rational(-1, 2);
  s.step = Rational(-3);
  s.coeffs.resize(order + 1, Rational(0));
  Rational central = 1;  // binom(2k, k) / 4^k
  Rational quarter_pow = 1;
  for (std::size_t k = 0; k <= order; ++k) {
    Rational tail = Rational(2) / Rational(6 * static_cast<long>(k) + 1);
    if (nu == 1) {
      s.coeffs[k] = central * tail;
    } else {
      Rational c = central * quarter_pow * tail / Rational(2);
      s.coeffs[k] = (k % 2 == 0) ? c : -c;
    }
    long kk = static_cast<long>(k) + 1;
    central = central * Rational(2 * kk - 1, 2 * kk);
    quarter_pow = quarter_pow / Rational(4);
  }
  return s;
}

inline BigReal zeta_infinity(long nu, long prec) {
  const long wp = prec + 32;
  if (nu == 1) {
    // int_1^inf dx / sqrt(x^3 - 1); the lower endpoint is an integrable
    // algebraic singularity, handled via the cancellation-free distance.
    Integrand f = [&](const BigReal& x, const BigReal& da, const BigReal& db) {
      (void)db;
      BigReal one(1, x.precision());
      return one / (da * (x * x + x + one)).sqrt();
    };
    BigReal I = integrate_to_inf(f, BigReal(1, wp), wp);
    BigReal half = I / BigReal(2, wp);
    return (half * half).round_to(prec);
  }
  if (nu == 2) {
    Integrand f = [&](const BigReal& x, const BigReal& da, const BigReal& db) {
      (void)da;
      (void)db;
      BigReal one(1, x.precision());
      return one / (BigReal(4, x.precision()) * x * x * x + one).sqrt();
    };
    BigReal head = integrate(f, BigReal(0, wp), BigReal(1, wp), wp);
    BigReal tail = integrate_to_inf(f, BigReal(1, wp), wp);
    return (head + tail).round_to(prec);
  }
  throw std::domain_error("zeta_infinity: nu must be 1 or 2");
}

inline IntegrableSolution integrable_solve(long nu, long prec,
                                           std::size_t order = 5) {
  if (order < 2) throw std::domain_error("integrable_solve: order >= 2");
  IntegrableSolution sol;
  sol.nu = nu;
  sol.zeta_inf = zeta_infinity(nu, prec);
  if (nu == 1)
    sol.rho = -sol.zeta_inf;
  else
    sol.rho = -(sol.zeta_inf * sol.zeta_inf * sol.zeta_inf);
  sol.delta_series = integrable_delta_series(nu, order);
  sol.inverse_series = revert_series(sol.delta_series, order);
  return sol;
}

// Closed-form asymptotic prediction for t_n.
inline BigReal integrable_asymptotics(const IntegrableSolution& sol, long n,
                                      long prec) {
  if (n < 1) throw std::domain_error("integrable_asymptotics: n >= 1");
  BigReal amag = sol.rho.abs().round_to(prec).pow(-n);
  BigReal lead = (sol.nu == 1) ? BigReal(2 * (2 * n - 1), prec)
                               : BigReal(3 * (3 * n - 1), prec);
  BigReal v = lead * amag;
  return (n % 2 == 1) ? v : -v;
}

}  // namespace psitree
