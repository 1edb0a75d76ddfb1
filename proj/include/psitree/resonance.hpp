#pragma once

// Resonance analysis and compatibility checking.
//
// For each family the movable-singularity trial expansion U(Z) ~ u0 Z^{-alpha}
// leads, at order Z^{r-alpha} of the linearized equation, to a polynomial
// Phi(r) whose positive integer roots are the resonances: the indices at
// which a free constant (or, when the matching equation is inconsistent, a
// logarithm) enters the expansion. Phi(-1) = 0 always, reflecting the
// one-parameter freedom in the singularity location.
//
// resonance_polynomial builds Phi exactly for every family; the closed
// product forms below agree with det(r I - M) of the first-order mode
// systems up to a constant factor (tested).
//
// frobenius_and_compatibility runs the trial expansion up to a resonance r
// and reports whether the singular matching equation at r is solvable
// (Compatible: a free constant enters, the Laurent series continues) or not
// (Incompatible: the residual is the obstruction that forces a logarithm).
// With several positive resonances the check is decided at the least one;
// querying a higher resonance reports Shadowed, since by then the expansion
// already carries logarithms and the scalar residual loses its meaning.
//
// All quantities are exact rationals in the mode system's rho-free
// normalization (see mode_system.hpp); the `normalization` string records
// the change of variables relating them to the raw generating function.

#include <string>
#include <vector>

#include "psitree/family.hpp"
#include "psitree/linalg.hpp"
#include "psitree/mode_system.hpp"
#include "psitree/psi_series.hpp"
#include "psitree/rational.hpp"

namespace psitree {

struct ResonanceReport {
  Family family;
  std::vector<Rational> phi;  // Phi coefficients, index = power of r
  std::vector<long> integer_resonances;  // positive integer roots, sorted
  bool minus_one_root = false;           // Phi(-1) == 0, always true
};

enum class Verdict { Compatible, Incompatible, Shadowed };

struct CompatibilityReport {
  Family family;
  long resonance = 0;
  Verdict verdict = Verdict::Compatible;
  Rational residual;  // -w^T g_r (tau-degree 0); zero iff Compatible
  std::vector<Rational> frobenius_coefficients;  // c_0 .. c_{r-1}
  std::string normalization;
};

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Compatible:
      return "compatible";
    case Verdict::Incompatible:
      return "incompatible";
    case Verdict::Shadowed:
      return "shadowed";
  }
  return "?";
}

namespace detail {

// p * q over Q.
inline std::vector<Rational> poly_mul(const std::vector<Rational>& p,
                                      const std::vector<Rational>& q) {
  std::vector<Rational> out(p.size() + q.size() - 1, Rational(0));
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  return out;
}

// prod_{j in shifts} (r - j) as a polynomial in r.
inline std::vector<Rational> poly_from_roots(const std::vector<long>& shifts) {
  std::vector<Rational> p = {Rational(1)};
  for (long j : shifts) p = poly_mul(p, {Rational(-j), Rational(1)});
  return p;
}

// Positive integer roots by exact evaluation up to a Lagrange-type bound:
// every root of a_n r^n + ... + a_0 satisfies
// |r| <= 2 max_i |a_{n-i}/a_n|^{1/i}, so doubling b until
// |a_{n-i}| <= |a_n| (b/2)^i for all i gives a valid search ceiling.
inline std::vector<long> positive_integer_roots(
    const std::vector<Rational>& phi) {
  std::size_t n = phi.size();
  while (n > 0 && phi[n - 1].is_zero()) --n;
  if (n <= 1) return {};
  const Rational& lead = phi[n - 1];
  Rational b = 2;
  for (bool grew = true; grew;) {
    grew = false;
    Rational half_pow = 1;  // (b/2)^i, built incrementally
    for (std::size_t i = 1; i < n; ++i) {
      half_pow *= b / Rational(2);
      Rational ai = phi[n - 1 - i] / lead;
      if (ai.sign() < 0) ai = -ai;
      if (ai > half_pow) {
        b *= Rational(2);
        grew = true;
        break;
      }
    }
  }
  long bound = static_cast<long>(b.to_double()) + 1;
  std::vector<long> roots;
  for (long r = 1; r <= bound; ++r)
    if (peval(phi, Rational(r)).is_zero()) roots.push_back(r);
  return roots;
}

inline ResonanceReport finish_report(Family f, std::vector<Rational> phi) {
  ResonanceReport rep;
  rep.family = std::move(f);
  rep.minus_one_root = peval(phi, Rational(-1)).is_zero();
  rep.integer_resonances = positive_integer_roots(phi);
  rep.phi = std::move(phi);
  return rep;
}

}  // namespace detail

// Resonance polynomial of the generalized d-of-m search tree recurrence
// p_n = m binom(n, d-1)^{-1} sum p_{j_1} ... p_{j_m} (d = 2 is the m-ary
// family, m = 2 the d-fold one):
//   Phi(r) = prod_{0 <= j < d(m-1)} (d - r + j) - m (dm-1)!/(d-1)!.
inline ResonanceReport resonance_polynomial_d_of_m(long d, long m) {
  if (d < 2 || m < 2)
    throw std::domain_error("resonance_polynomial_d_of_m: d, m >= 2 required");
  std::vector<Rational> phi = {Rational(1)};
  for (long j = 0; j < d * (m - 1); ++j)
    phi = detail::poly_mul(phi, {Rational(d + j), Rational(-1)});
  phi[0] -= Rational(m) * factorial(d * m - 1) / factorial(d - 1);
  Family f = Family::bst(d);  // carrier only; d-of-m has no Family kind
  return detail::finish_report(f, std::move(phi));
}

inline ResonanceReport resonance_polynomial(const Family& f) {
  std::vector<Rational> phi;
  switch (f.kind) {
    case FamilyKind::BstEquality:
    case FamilyKind::Partition: {
      // prod_{0 <= j < d} (d - r + j) - (2d)!/d!
      const long d = f.d;
      phi = {Rational(1)};
      for (long j = 0; j < d; ++j)
        phi = detail::poly_mul(phi, {Rational(d + j), Rational(-1)});
      phi[0] -= factorial(2 * d) / factorial(d);
      break;
    }
    case FamilyKind::MarySearch: {
      // prod_{2 <= j < 2m} (r - j) - (2m)!/2
      std::vector<long> shifts;
      for (long j = 2; j < 2 * f.m; ++j) shifts.push_back(j);
      phi = detail::poly_from_roots(shifts);
      phi[0] -= factorial(2 * f.m) / Rational(2);
      break;
    }
    case FamilyKind::FringeBalanced: {
      // prod_{2<=j<=2t+1} (r-j) * (prod_{2t+2<=j<=4t+3} (r-j) - 2 prod j)
      const long t = f.t;
      std::vector<long> head, tail;
      for (long j = 2; j <= 2 * t + 1; ++j) head.push_back(j);
      for (long j = 2 * t + 2; j <= 4 * t + 3; ++j) tail.push_back(j);
      std::vector<Rational> second = detail::poly_from_roots(tail);
      Rational prod = 2;
      for (long j : tail) prod *= Rational(j);
      second[0] -= prod;
      phi = detail::poly_mul(detail::poly_from_roots(head), second);
      break;
    }
    case FamilyKind::PhyloAgreement:
    case FamilyKind::QuadtreeMoments:
    case FamilyKind::Boltzmann:
      phi = {Rational(-6), Rational(-5), Rational(1)};  // (r+1)(r-6)
      break;
    case FamilyKind::RelaxedKd:
      phi = {Rational(-2), Rational(-1), Rational(1)};  // (r+1)(r-2)
      break;
  }
  return detail::finish_report(f, std::move(phi));
}

// Frobenius trial expansion up to resonance r with compatibility verdict.
// Exact-capable families only (the verdicts for quadtree / relaxed-k-d /
// partition follow from the psi_engine's numeric solve instead).
inline CompatibilityReport frobenius_and_compatibility(const Family& f,
                                                       long r) {
  if (!f.exact_capable())
    throw std::domain_error(
        "frobenius_and_compatibility: exact rationals unavailable for " +
        f.name());
  ResonanceReport rr = resonance_polynomial(f);
  bool is_res = false;
  for (long q : rr.integer_resonances) is_res |= (q == r);
  if (!is_res)
    throw std::domain_error("frobenius_and_compatibility: " +
                            std::to_string(r) + " is not a resonance of " +
                            f.name());

  FieldTraits<Rational>::Ctx ctx;
  ModeSystem<Rational> ms = build_mode_system<Rational>(f, ctx);
  PsiSeries<Rational> ps = solve_modes(ms, r, Rational(0));

  CompatibilityReport rep;
  rep.family = f;
  rep.resonance = r;
  rep.normalization = ms.normalization;
  rep.frobenius_coefficients.reserve(r);
  for (long k = 0; k < r; ++k) {
    const TauPoly<Rational>& u = ps.mode(k);
    rep.frobenius_coefficients.push_back(
        u.degree() < 0 ? Rational(0) : u.coeffs()[0]);
  }
  if (ps.least_resonance != r) {
    rep.verdict = Verdict::Shadowed;
    rep.residual = Rational(0);
  } else {
    rep.residual = ps.residual;
    rep.verdict = ps.compatible ? Verdict::Compatible : Verdict::Incompatible;
  }
  return rep;
}

// Exact obstruction at the resonance r = 2 of the median-of-(2t+1) family,
// computed independently of the mode solver from the scalar coefficient
// identity for ((1-Z)^s f^(s))^(s) applied to the defining 2(2t+1)-th order
// equation. The returned value is the inconsistency of the k = 2 matching
// equation (whose u_2 coefficient vanishes); the mode solver's residual
// equals its negative, and the logarithm coefficient it forces at mode 2 is
// obstruction / Phi_t'(2). Closed form (t >= 1):
//   (4t+1)! (t+1)^2 (22 t^2 + 35 t + 14) u_0 / (6t+5)^2,
// with u_0 = (4t+3)! t!^4 / (2t+1)!^4.
inline Rational fringe_r2_obstruction(long t) {
  if (t < 1) throw std::domain_error("fringe_r2_obstruction: t >= 1 required");
  const long alpha = 2;
  const Rational u0 =
      factorial(4 * t + 3) * factorial(t).pow(4) / factorial(2 * t + 1).pow(4);
  const Rational u1 = -Rational(2) * Rational(t + 1).pow(2) * u0 /
                      Rational(6 * t + 5);
  const Rational Ct = factorial(2 * t + 1).pow(2) / factorial(t).pow(4);
  auto u = [&](long i) -> Rational {
    if (i == 0) return u0;
    if (i == 1) return u1;
    return 0;  // the u_2 coefficient of the k = 2 equation vanishes
  };
  auto falling = [](const Rational& x, long s) {
    Rational p = 1;
    for (long i = 0; i < s; ++i) p *= x - Rational(i);
    return p;
  };
  // tau_s(k) = coefficient of Z^{k-2s-alpha} in ((1-Z)^s f^(s))^(s).
  auto bracket = [&](long s, long k) {
    Rational sum = 0;
    for (long j = 0; j <= s && j <= k; ++j) {
      Rational term =
          binomial(s, j) * falling(Rational(k - alpha - j), s) * u(k - j);
      sum += (j % 2 == 0) ? term : -term;
    }
    return falling(Rational(k - alpha - s), s) * sum;
  };
  auto chi = [&](long k) { return bracket(t, k); };
  Rational rhs = 0;
  for (long l = 0; l <= 2; ++l) rhs += chi(l) * chi(2 - l);
  return Ct * rhs - bracket(2 * t + 1, 2);
}

inline Rational fringe_r2_obstruction_closed(long t) {
  if (t < 1)
    throw std::domain_error("fringe_r2_obstruction_closed: t >= 1 required");
  const Rational u0 =
      factorial(4 * t + 3) * factorial(t).pow(4) / factorial(2 * t + 1).pow(4);
  return factorial(4 * t + 1) * Rational(t + 1).pow(2) *
         Rational(22 * t * t + 35 * t + 14) * u0 / Rational(6 * t + 5).pow(2);
}

}  // namespace psitree
