#pragma once

// Psi-series mode solver.
//
// Given a mode system u_k' + (k I - M) u_k = g_k (see mode_system.hpp), the
// modes are solved in order. When det(k I - M) != 0 the tau-polynomial
// coefficients of u_k are obtained by back-substitution in descending tau
// degree. When k is a resonance (det(k I - M) = 0, always of rank defect 1
// here), the general solution gains a free multiple of the null vector n and
// solvability w^T rhs = 0 (w the left null vector) fixes the free multiples
// one tau-degree higher -- this is what creates logarithms: if the degree-0
// solvability fails, the solution is bumped one tau degree.
//
// Conventions at a resonance:
//   n is scaled so n[0] = 1: the free constant is the coefficient of
//     Z^{r - alpha} in U_1.
//   w is scaled so its last component is 1.
//   residual := -w^T g_r (tau-degree-0 part). The series is "compatible" at
//     the least resonance iff the residual vanishes; then no log appears.
//   The free constant c_r is attached at the least positive resonance; at
//     any further (shadowed) resonances the free multiple is set to 0.

#include <string>
#include <vector>

#include "psitree/linalg.hpp"
#include "psitree/mode_system.hpp"
#include "psitree/taupoly.hpp"

namespace psitree {

// p(x) for a rational coefficient vector (index = power).
inline Rational peval(const std::vector<Rational>& p, const Rational& x) {
  Rational acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

template <class F>
struct PsiSeries {
  Family family;
  long s = 0;
  long alpha = 2;
  std::vector<long> expo;
  std::vector<std::vector<TauPoly<F>>> modes;  // modes[k][component]
  std::vector<long> resonances;                // positive resonances <= K
  long least_resonance = -1;                   // -1: pure Laurent so far
  bool compatible = true;
  bool residual_set = false;
  F residual;         // -w^T g_r at tau-degree 0, least resonance
  std::vector<F> left_null;  // w, last component 1
  std::vector<F> null_vec;   // n, first component 1

  const TauPoly<F>& mode(long k, long comp = 0) const {
    return modes.at(static_cast<std::size_t>(k))[static_cast<std::size_t>(comp)];
  }
};

namespace detail {

// Rational null vector of a rank-(s-1) rational matrix, scaled so that the
// component `anchor` equals 1 (throws if that component vanishes).
inline Vec<Rational> rational_null_scaled(const Mat<Rational>& a, long anchor,
                                          const char* what) {
  FieldTraits<Rational>::Ctx rctx;
  Vec<Rational> n = nullspace_rank1(a, rctx);
  if (n[static_cast<std::size_t>(anchor)].is_zero())
    throw std::domain_error(std::string("solve_modes: ") + what +
                            " null vector vanishes at its anchor component");
  Rational f = n[static_cast<std::size_t>(anchor)].inv();
  for (auto& x : n) x *= f;
  return n;
}

}  // namespace detail

// Solves modes 1..K on top of the seed mode. c_r is the value given to the
// free constant at the least positive resonance (ignored if none is met).
template <class F>
PsiSeries<F> solve_modes(const ModeSystem<F>& ms, long K, const F& c_r) {
  using Poly = TauPoly<F>;
  const auto& ctx = ms.ctx;
  auto lift = [&](const Rational& q) {
    return FieldTraits<F>::from_rational(ctx, q);
  };
  const long s = ms.s;

  PsiSeries<F> ps;
  ps.family = ms.family;
  ps.s = s;
  ps.alpha = ms.alpha;
  ps.expo = ms.expo;
  ps.modes.reserve(K + 1);
  {
    std::vector<Poly> m0(s);
    for (long j = 0; j < s; ++j) m0[j] = Poly::constant(ms.seed[j]);
    ps.modes.push_back(std::move(m0));
  }

  const std::vector<Rational> cp = char_poly(ms.M);

  for (long k = 1; k <= K; ++k) {
    std::vector<Poly> g = ms.g(k, ps.modes);
    long D = -1;
    for (long j = 0; j < s; ++j) D = std::max(D, g[j].degree());
    if (D < 0) D = 0;

    // A = k I - M over F.
    Mat<F> A(s, Vec<F>(s));
    for (long i = 0; i < s; ++i)
      for (long j = 0; j < s; ++j)
        A[i][j] = lift((i == j ? Rational(k) : Rational(0)) - ms.M[i][j]);

    // g as per-tau-degree vectors g_i.
    auto g_at = [&](long i) {
      Vec<F> v(s);
      for (long j = 0; j < s; ++j)
        v[j] = g[j].coeff(static_cast<std::size_t>(i), ctx);
      return v;
    };

    std::vector<Vec<F>> phi;  // phi[i] = tau^i coefficient vector

    if (!peval(cp, Rational(k)).is_zero()) {
      phi.assign(D + 1, Vec<F>(s, lift(0)));
      for (long i = D; i >= 0; --i) {
        Vec<F> rhs = g_at(i);
        if (i < D) {
          for (long j = 0; j < s; ++j) {
            F t = phi[i + 1][j];
            for (long rep = 1; rep <= i; ++rep) t = t + phi[i + 1][j];
            rhs[j] = rhs[j] - t;  // (i+1) * phi_{i+1}
          }
        }
        phi[i] = gauss_solve(A, rhs);
      }
    } else {
      // Resonance. Null data is rational (A is rational for every family).
      ps.resonances.push_back(k);
      Mat<Rational> Ar(s, Vec<Rational>(s));
      for (long i = 0; i < s; ++i)
        for (long j = 0; j < s; ++j)
          Ar[i][j] = (i == j ? Rational(k) : Rational(0)) - ms.M[i][j];
      Vec<Rational> n_rat = detail::rational_null_scaled(Ar, 0, "right");
      Vec<Rational> w_rat =
          detail::rational_null_scaled(mat_transpose(Ar), s - 1, "left");
      Rational wn_rat = 0;
      for (long j = 0; j < s; ++j) wn_rat += w_rat[j] * n_rat[j];
      if (wn_rat.is_zero())
        throw std::domain_error("solve_modes: defective resonance (w.n = 0)");
      Vec<F> n(s), w(s);
      for (long j = 0; j < s; ++j) {
        n[j] = lift(n_rat[j]);
        w[j] = lift(w_rat[j]);
      }

      const bool first = (ps.least_resonance < 0);
      if (first) {
        ps.least_resonance = k;
        ps.left_null = w;
        ps.null_vec = n;
        F res = lift(0);
        Vec<F> g0 = g_at(0);
        for (long j = 0; j < s; ++j) res = res - w[j] * g0[j];
        ps.residual = res;
        ps.residual_set = true;
        ps.compatible = FieldTraits<F>::is_zero(res);
      }

      // phi_i = p_i + gamma_i n, solved in descending tau degree; the
      // solvability of degree i fixes gamma_{i+1}.
      std::vector<Vec<F>> p(D + 2, Vec<F>(s, lift(0)));
      std::vector<F> gamma(D + 2, lift(0));
      for (long i = D; i >= 0; --i) {
        Vec<F> gi = g_at(i);
        // gamma_{i+1} = w^T (g_i - (i+1) p_{i+1}) / ((i+1) w^T n)
        F num = lift(0);
        for (long j = 0; j < s; ++j) {
          F t = p[i + 1][j];
          for (long rep = 1; rep <= i; ++rep) t = t + p[i + 1][j];
          num = num + w[j] * (gi[j] - t);
        }
        gamma[i + 1] = num / lift(Rational(i + 1) * wn_rat);
        Vec<F> rhs(s);
        for (long j = 0; j < s; ++j) {
          F full = p[i + 1][j] + gamma[i + 1] * n[j];
          F t = full;
          for (long rep = 1; rep <= i; ++rep) t = t + full;
          rhs[j] = gi[j] - t;
        }
        p[i] = gauss_solve_gauged(A, rhs, 0, ctx);
      }
      gamma[0] = first ? c_r : lift(0);
      phi.assign(D + 2, Vec<F>(s, lift(0)));
      for (long i = 0; i <= D + 1; ++i)
        for (long j = 0; j < s; ++j) phi[i][j] = p[i][j] + gamma[i] * n[j];
    }

    std::vector<Poly> mode(s);
    for (long j = 0; j < s; ++j) {
      std::vector<F> coeffs(phi.size());
      for (std::size_t i = 0; i < phi.size(); ++i) coeffs[i] = phi[i][j];
      mode[j] = Poly(std::move(coeffs));
    }
    ps.modes.push_back(std::move(mode));
  }
  return ps;
}

// Value and first two Z-derivatives of U_1(Z) = sum u_k(tau) Z^{k-alpha}
// truncated at mode K_use, evaluated at Z0 (tau0 = log Z0 supplied by the
// caller, since log is not available on every scalar field).
template <class F>
struct PsiValue {
  F value, d1, d2;
};

template <class F>
PsiValue<F> evaluate_psi(const PsiSeries<F>& ps, const F& Z0, const F& tau0,
                         long K_use,
                         const typename FieldTraits<F>::Ctx& ctx) {
  auto lift = [&](const Rational& q) {
    return FieldTraits<F>::from_rational(ctx, q);
  };
  if (K_use >= static_cast<long>(ps.modes.size()))
    throw std::domain_error("evaluate_psi: not enough modes solved");
  const long a = ps.alpha;
  F zpow = lift(1);
  for (long i = 0; i < a; ++i) zpow = zpow / Z0;  // Z0^{-alpha}
  PsiValue<F> out{lift(0), lift(0), lift(0)};
  for (long k = 0; k <= K_use; ++k) {
    const TauPoly<F>& u = ps.modes[k][0];
    TauPoly<F> du = u.derivative();
    TauPoly<F> d2u = du.derivative();
    F uv = u.evaluate(tau0);
    F duv = du.evaluate(tau0);
    F d2uv = d2u.evaluate(tau0);
    F e = lift(Rational(k - a));
    out.value = out.value + uv * zpow;
    out.d1 = out.d1 + (e * uv + duv) * zpow / Z0;
    out.d2 = out.d2 +
             (e * (e - lift(1)) * uv + (e + e - lift(1)) * duv + d2uv) * zpow /
                 (Z0 * Z0);
    zpow = zpow * Z0;
  }
  return out;
}

// Heuristic tail bound for the truncated psi-series at Z0: models the mode
// magnitudes as |u_k(tau0)| <= C |1-tau0|^k with C fitted as 1.5x the
// largest observed normalized magnitude. Not a proven bound (flagged so).
struct PsiTail {
  BigReal bound;
  bool heuristic = true;
};

inline PsiTail psi_tail(const PsiSeries<BigReal>& ps, const BigReal& Z0,
                        const BigReal& tau0, long K_use) {
  const long prec = std::max<long>(Z0.precision(), 128);
  BigReal B = (BigReal(1, prec) - tau0).abs();
  if (B < BigReal(1, prec)) B = BigReal(1, prec);
  BigReal C(0, prec);
  BigReal bk(1, prec);
  for (long k = 0; k <= K_use; ++k) {
    C = BigReal::max(C, ps.modes[k][0].evaluate(tau0).abs() / bk);
    bk *= B;
  }
  C = C * BigReal(Rational(3, 2), prec);
  BigReal x = B * Z0.abs();
  if (x >= BigReal(1, prec))
    throw std::domain_error("psi_tail: |Z0 (1 - log Z0)| >= 1, no convergence");
  BigReal bound = C * x.pow(K_use + 1) / (BigReal(1, prec) - x) /
                  Z0.abs().pow(ps.alpha);
  return {bound, true};
}

}  // namespace psitree
