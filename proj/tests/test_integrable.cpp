#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "psitree/integrable.hpp"
#include "psitree/sequences.hpp"

using namespace psitree;

namespace {

bool agrees(const BigReal& a, const std::string& lit, long digits) {
  long prec = std::max<long>(a.precision(), 256);
  return (a - BigReal(lit, prec)).abs() < BigReal(10, prec).pow(-digits);
}

}  // namespace

TEST_CASE("singularities by quadrature match the closed forms") {
  const long prec = 320;
  BigReal z1 = zeta_infinity(1, prec);
  CHECK(agrees(z1, "1.4745859923711924803", 19));
  // The defining integral itself: 2 sqrt(zeta_inf).
  CHECK(agrees(BigReal(2, prec) * z1.sqrt(), "2.4286506478875816118", 19));

  BigReal z2 = zeta_infinity(2, prec);
  CHECK(agrees(z2, "1.7666387502854499573", 19));
  // Beta closed form: zeta_inf = 2^(1/3) Beta(1/6, 1/3) / 6.
  BigReal beta = eval_beta(BigReal(Rational(1, 6), prec),
                           BigReal(Rational(1, 3), prec), prec);
  BigReal closed = BigReal(2, prec).pow(BigReal(Rational(1, 3), prec)) * beta /
                   BigReal(6, prec);
  CHECK((z2 - closed).abs() < BigReal(10, prec).pow(-80));

  IntegrableSolution s2 = integrable_solve(2, prec);
  CHECK(agrees(s2.rho, "-5.5137015767105677550", 19));
  // rho = -Beta(1/6,1/3)^3 / 108 to quadrature accuracy.
  CHECK((s2.rho + beta.pow(3L) / BigReal(108, prec)).abs() <
        BigReal(10, prec).pow(-80));
  IntegrableSolution s1 = integrable_solve(1, prec);
  CHECK((s1.rho + z1).is_zero());
  CHECK(s1.rho.sign() < 0);
  CHECK(s2.rho.sign() < 0);
}

TEST_CASE("distance-to-singularity series: exact rationals") {
  // nu = 1: coefficients 2, 1/7, 3/52, 5/152 at exponents -1/2, -7/2, ...
  // The second coefficient is 1/7: the binomial pattern of the integrand
  // (which also produces the 3/52 and 5/152 terms) and the reverted series
  // below both force it.
  FormalSeries d1 = integrable_delta_series(1, 3);
  CHECK(d1.base_exp == Rational(-1, 2));
  CHECK(d1.step == Rational(-3));
  REQUIRE(d1.coeffs.size() == 4);
  CHECK(d1.coeffs[0] == Rational(2));
  CHECK(d1.coeffs[1] == Rational(1, 7));
  CHECK(d1.coeffs[2] == Rational(3, 52));
  CHECK(d1.coeffs[3] == Rational(5, 152));

  FormalSeries d2 = integrable_delta_series(2, 3);
  CHECK(d2.coeffs[0] == Rational(1));
  CHECK(d2.coeffs[1] == Rational(-1, 56));
  CHECK(d2.coeffs[2] == Rational(3, 1664));
  CHECK(d2.coeffs[3] == Rational(-5, 19456));

  CHECK_THROWS_AS(integrable_delta_series(3, 3), std::domain_error);
}

TEST_CASE("reverted series: exact rationals and composition identity") {
  IntegrableSolution s1 = integrable_solve(1, 256, 5);
  const FormalSeries& v = s1.inverse_series;
  CHECK(v.base_exp == Rational(-2));
  CHECK(v.step == Rational(6));
  CHECK(v.coeffs[0] == Rational(4));
  CHECK(v.coeffs[1] == Rational(1, 112));
  CHECK(v.coeffs[2] == Rational(1, 652288));
  CHECK(v.coeffs[3] == Rational("1/5552275456"));

  IntegrableSolution s2 = integrable_solve(2, 256, 5);
  const FormalSeries& l = s2.inverse_series;
  CHECK(l.coeffs[0] == Rational(1));
  CHECK(l.coeffs[1] == Rational(-1, 28));
  CHECK(l.coeffs[2] == Rational(1, 10192));
  CHECK(l.coeffs[3] == Rational("-1/5422144"));
  CHECK(l.coeffs[4] == Rational("3/9868302080"));

  // Composition closes: Delta(V(delta)) = delta through the truncation.
  const long prec = 256;
  for (long nu : {1L, 2L}) {
    IntegrableSolution s = integrable_solve(nu, prec, 5);
    BigReal delta(Rational(1, 100), prec);
    BigReal V = s.inverse_series.evaluate(delta, prec);
    BigReal back = s.delta_series.evaluate(V, prec);
    // Truncation error ~ delta^(6*5+1).
    CHECK((back - delta).abs() < BigReal(10, prec).pow(-55));
  }
}

TEST_CASE("closed-form coefficient asymptotics: signs and geometric error") {
  const long prec = 320;
  for (long nu : {1L, 2L}) {
    IntegrableSolution s = integrable_solve(nu, prec);
    SequenceSlice t = sequence(Family::boltzmann(nu), 45, /*exact=*/true);
    // Sign alternation (-1)^(n-1) from n = 2 on.
    for (long n = 2; n <= 45; ++n) {
      int oracle_sign = t.rat(n).sign();
      int pred_sign = integrable_asymptotics(s, n, prec).sign();
      CHECK(oracle_sign == pred_sign);
    }
    // Relative error decays geometrically over n in [10, 40].
    double prev = 1e9;
    double lo = 0, hi = 0;
    for (long n = 10; n <= 40; n += 5) {
      BigReal pred = integrable_asymptotics(s, n, prec);
      BigReal err = (pred / t.num(n, prec) - BigReal(1, prec)).abs();
      double e = err.to_double();
      CHECK(e < prev);  // strictly shrinking
      if (n == 10) lo = e;
      if (n == 40) hi = e;
      prev = e;
    }
    // Fitted per-step ratio stays below 1 by a clear margin.
    double ratio = std::pow(hi / lo, 1.0 / 30.0);
    CHECK(ratio < 0.9);
    CHECK(lo < 1e-2);
  }
  IntegrableSolution s1 = integrable_solve(1, prec);
  CHECK_THROWS_AS(integrable_asymptotics(s1, 0, prec), std::domain_error);
  CHECK_THROWS_AS(integrable_solve(3, prec), std::domain_error);
}
