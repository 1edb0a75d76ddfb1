#pragma once

// Connection step: determines the singularity location rho (and the free
// psi-series constant c_r, when the family has a resonance) by matching the
// recurrence-side partial sums with the psi-series evaluation at an interior
// point z0 of the common region of analyticity:
//
//   nu_f S_N(z0)        = W(Z0),        Z0 = 1 - z0/rho,
//   -rho nu_f S_N'(z0)  = W'(Z0),
//
// where S(z) = sum w_n z^n is the family's connection series
// (sequences.hpp), W(Z) = sum u_k(log Z) Z^{k-alpha} the psi-series in the
// family's rho-free normalization, and nu_f the scale between them (rho for
// the tree-counting and Boltzmann families, rho/lambda_m for m-ary search
// trees, 1 for the moment families).
//
// The two equations are solved by a damped Newton iteration: d/dc_r comes
// from running the mode solver over dual numbers (Jet), d/drho from the
// chain rule through Z0 (the modes themselves are rho-free). Families with
// no positive resonance (d-fold equality, d odd) have a pure Laurent series
// and a single unknown; only the first equation is used.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "psitree/bigreal.hpp"
#include "psitree/family.hpp"
#include "psitree/mode_system.hpp"
#include "psitree/psi_series.hpp"
#include "psitree/resonance.hpp"
#include "psitree/sequences.hpp"

namespace psitree {

// Raised when an operation is well-posed mathematically but outside this
// artifact's implemented scope (distinct exit path in the CLI).
struct unsupported_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConnectionSolution {
  Family family;
  BigReal rho;  // singularity of the connection series (positive)
  BigReal c_r;  // free constant at the least resonance (0 if none), in the
                // mode system's rho-free normalization W
  BigReal c_natural;  // c_r / nu_f: the same constant in the scale of the
                      // family's generating function itself
  long resonance = -1;
  BigReal z0;
  long n_terms = 0;
  long m_modes = 0;
  BigReal residual_value;       // nu_f S_N(z0) - W(Z0) at the solution
  BigReal residual_derivative;  // -rho nu_f S_N'(z0) - W'(Z0)
  BigReal error_estimate;       // combined sequence + psi-series tail bound
  long iterations = 0;
  long precision = 0;
};

// lambda_m = ((2m-1)!/(m-1)!^2)^{1/(m-1)}: the m-ary leading-amplitude base.
inline BigReal mary_lambda(long m, long prec) {
  if (m < 2) throw std::domain_error("mary_lambda: m >= 2 required");
  Rational r = factorial(2 * m - 1) / (factorial(m - 1) * factorial(m - 1));
  if (m == 2) return BigReal(r, prec);
  return BigReal(r, prec).pow(BigReal(1, prec) / BigReal(m - 1, prec));
}

// Positivity-induction upper bound for the binary-equality singularity:
// assuming p_j <= c (j+1) x^{-j-1} for all j with c = 6 n0/(n0+2), the
// induction closes for every
//   x <= min_{0<=j<=n0} (6 n0 (j+1) / (p_j (n0+2)))^{1/(j+1)},
// and the minimum is the best bound the scheme yields at cutoff n0.
inline BigReal bracket_rho(const Family& f, long n0, long prec = 192) {
  if (n0 < 1) throw std::domain_error("bracket_rho: n0 >= 1 required");
  if (f.kind != FamilyKind::BstEquality || f.d != 2)
    throw unsupported_error(
        "bracket_rho: the positivity induction is implemented for the "
        "binary-equality family only");
  SequenceSlice s = sequence(f, n0, /*exact_mode=*/true);
  BigReal best(0, prec);
  for (long j = 0; j <= n0; ++j) {
    Rational base = Rational(6 * n0 * (j + 1)) / (s.rat(j) * Rational(n0 + 2));
    BigReal cand =
        BigReal(base, prec).pow(BigReal(1, prec) / BigReal(j + 1, prec));
    if (j == 0 || cand < best) best = cand;
  }
  return best;
}

// Truncates x >= 0 to `digits` decimal places (no rounding), as a string.
inline std::string truncate_decimal(const BigReal& x, long digits) {
  if (x.sign() < 0)
    throw std::domain_error("truncate_decimal: nonnegative input required");
  const long prec = std::max<long>(x.precision(), 128);
  BigReal scaled = x.round_to(prec);
  for (long i = 0; i < digits; ++i) scaled *= BigReal(10, prec);
  mpz_t z;
  mpz_init(z);
  mpfr_get_z(z, scaled.raw(), MPFR_RNDZ);
  char* c = mpz_get_str(nullptr, 10, z);
  std::string s(c);
  void (*freefunc)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefunc);
  freefunc(c, s.size() + 1);
  mpz_clear(z);
  while (static_cast<long>(s.size()) <= digits) s.insert(s.begin(), '0');
  std::string head = s.substr(0, s.size() - digits);
  std::string tail = s.substr(s.size() - digits);
  while (!tail.empty() && tail.back() == '0') tail.pop_back();
  return tail.empty() ? head : head + "." + tail;
}

// Unique root x = z0/rho in (1/2, 1) of x^{1/beta} = (1 - log(1-x))(1 - x),
// balancing the sequence-side and psi-series-side truncation errors when
// M = beta N modes are used against N sequence terms. Returns the ratio x.
inline BigReal choose_z0_ratio(const Rational& beta_split, long prec = 128) {
  if (beta_split <= Rational(0) || beta_split > Rational(1))
    throw std::domain_error("choose_z0_ratio: beta in (0, 1] required");
  const BigReal one(1, prec);
  const BigReal inv_beta(beta_split.inv(), prec);
  auto g = [&](const BigReal& x) {
    BigReal omx = one - x;
    return x.pow(inv_beta) - (one - omx.log()) * omx;
  };
  BigReal lo(Rational(1, 2), prec), hi(1, prec);
  hi = hi - one.ldexp(-prec / 2);  // keep log(1 - x) finite
  if (g(lo).sign() >= 0 || g(hi).sign() <= 0)
    throw std::logic_error("choose_z0_ratio: bracket failed");
  for (long it = 0; it < prec + 8; ++it) {
    BigReal mid = (lo + hi) / BigReal(2, prec);
    if (g(mid).sign() < 0)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / BigReal(2, prec);
}

inline BigReal choose_z0(const BigReal& rho_est, const Rational& beta_split,
                         long prec = 128) {
  return rho_est.round_to(prec) * choose_z0_ratio(beta_split, prec);
}

// Estimate of rho from successive coefficient ratios w_n / w_{n+1} of the
// connection series, accelerated by Richardson extrapolation (the ratios
// approach rho with an asymptotic expansion in powers of 1/n).
inline BigReal ratio_rho_estimate(const Family& f, long n_terms = 160,
                                  long prec = 256) {
  if (n_terms < 24)
    throw std::domain_error("ratio_rho_estimate: n_terms >= 24 required");
  std::vector<BigReal> w = connection_coeffs(f, n_terms, prec);
  const long levels = 3;
  long base = n_terms - (levels + 9);
  std::vector<BigReal> a;  // a[i] is the ratio at index n = base + i
  for (long n = base; n < n_terms; ++n) a.push_back(w[n] / w[n + 1]);
  for (long k = 0; k < levels; ++k) {
    std::vector<BigReal> b;
    for (std::size_t i = 1; i < a.size(); ++i) {
      BigReal n(base + static_cast<long>(i), prec);
      b.push_back((n * a[i] - (n - BigReal(k + 1, prec)) * a[i - 1]) /
                  BigReal(k + 1, prec));
    }
    a = std::move(b);
    ++base;
  }
  return a.back();
}

namespace detail {

inline PsiValue<Jet> eval_psi_side(const PsiSeries<Jet>& ps,
                                   const BigReal& Z0, long m_modes,
                                   const FieldTraits<Jet>::Ctx& jctx) {
  const long prec = jctx.prec;
  Jet Z0j{Z0.round_to(prec), BigReal(0, prec)};
  Jet tau0j{Z0.round_to(prec).log(), BigReal(0, prec)};
  return evaluate_psi(ps, Z0j, tau0j, m_modes, jctx);
}

// (nu_f, d nu_f/d rho) for the family at the current rho.
inline std::pair<BigReal, BigReal> connection_scale(const Family& f,
                                                    const BigReal& rho,
                                                    long prec) {
  switch (f.kind) {
    case FamilyKind::BstEquality:
    case FamilyKind::PhyloAgreement:
    case FamilyKind::FringeBalanced:
    case FamilyKind::Boltzmann:
      return {rho.round_to(prec), BigReal(1, prec)};
    case FamilyKind::MarySearch: {
      BigReal lam = mary_lambda(f.m, prec);
      return {rho.round_to(prec) / lam, BigReal(1, prec) / lam};
    }
    default:
      return {BigReal(1, prec), BigReal(0, prec)};
  }
}

}  // namespace detail

inline ConnectionSolution solve_connection(const Family& f,
                                           long target_digits = 25,
                                           const Rational& beta_split =
                                               Rational(1, 2),
                                           long prec = 0) {
  if (f.kind == FamilyKind::Partition && f.d > 2)
    throw unsupported_error(
        "solve_connection: partition families with d > 2 are not reduced to "
        "a first-order mode system");
  if (f.kind == FamilyKind::FringeBalanced && f.t >= 1)
    throw unsupported_error(
        "solve_connection: fringe families with t >= 1 carry more than one "
        "free resonance constant; two-equation matching is underdetermined");
  // For m >= 3 the resonance polynomial prod_{2<=j<2m}(r-j) - (2m)!/2 has,
  // besides -1 and 2m+2, complex-conjugate roots (for m = 3 at (7 +-
  // i sqrt(71))/2). The generating function carries nonzero amplitudes on
  // those directions (the coefficients visibly oscillate at frequency
  // Im(r) in log n with envelope n^{1-Re(r)}), so it is not in the
  // two-parameter (rho, c_r) psi-series family and two-equation matching
  // converges to a biased rho (observed relative bias ~7e-6 for m = 3,
  // far above the nominal error estimate).
  if (f.kind == FamilyKind::MarySearch && f.m >= 3)
    throw unsupported_error(
        "solve_connection: m-ary families with m >= 3 have complex resonance "
        "pairs with nonzero amplitude; two-equation matching yields a biased "
        "rho (ratio_rho_estimate gives an estimate good to roughly the "
        "oscillation envelope at its extrapolation window)");
  if (target_digits < 4)
    throw std::domain_error("solve_connection: target_digits >= 4 required");
  if (prec <= 0)
    prec = std::max<long>(320, (target_digits * 10) / 3 + 160);

  ConnectionSolution sol;
  sol.family = f;
  sol.precision = prec;

  // Resonance structure decides the number of unknowns.
  ResonanceReport rr = resonance_polynomial(f);
  const bool two_unknowns = !rr.integer_resonances.empty();
  sol.resonance = two_unknowns ? rr.integer_resonances.front() : -1;

  // Initial rho and the fixed matching point z0.
  BigReal rho =
      ratio_rho_estimate(f, 160, std::min<long>(prec, 384)).round_to(prec);
  const BigReal x_ratio = choose_z0_ratio(beta_split, prec);
  const BigReal z0 = (rho * x_ratio).round_to(prec);
  sol.z0 = z0;

  // Sequence terms: (z0/rho)^N below the target, with headroom for the
  // polynomial factor and the safety margin of the tail model.
  const double dpd = -std::log10(x_ratio.to_double());  // digits per term
  long N = static_cast<long>((target_digits + 12) / dpd) + 48;
  PartialSum seq = partial_sum(f, z0, N, rho, prec);
  {
    BigReal tol = BigReal(10, prec).pow(-(target_digits + 6)) *
                  BigReal::max(seq.value.abs(), BigReal(1, prec));
    for (int grow = 0; grow < 4 && seq.tail > tol; ++grow) {
      N += N / 2;
      seq = partial_sum(f, z0, N, rho, prec);
    }
  }
  sol.n_terms = N;

  // Mode count M = beta N, comfortably past the resonance.
  long M = static_cast<long>(static_cast<double>(N) * beta_split.to_double());
  if (two_unknowns) M = std::max(M, sol.resonance + 16);
  M = std::max<long>(M, 48);
  sol.m_modes = M;

  FieldTraits<Jet>::Ctx jctx{prec};
  ModeSystem<Jet> ms = build_mode_system<Jet>(f, jctx);
  const BigReal cd(two_unknowns ? 1 : 0, prec);

  BigReal c(0, prec);
  PsiSeries<Jet> ps = solve_modes(ms, M, Jet{c, cd});

  // Residuals (F1, F2) and psi-side data at (rho_v, modes of c).
  struct Eval {
    PsiValue<Jet> pv;
    BigReal nu_f, dnu_f, F1, F2, norm;
  };
  auto eval_at = [&](const BigReal& rho_v, const PsiSeries<Jet>& ps_v) {
    BigReal Z0 = BigReal(1, prec) - z0 / rho_v;
    if (Z0.sign() <= 0)
      throw std::domain_error("solve_connection: z0 crossed the singularity");
    Eval e{detail::eval_psi_side(ps_v, Z0, M, jctx),
           BigReal(0, prec), BigReal(0, prec), BigReal(0, prec),
           BigReal(0, prec), BigReal(0, prec)};
    auto sc = detail::connection_scale(f, rho_v, prec);
    e.nu_f = sc.first;
    e.dnu_f = sc.second;
    e.F1 = e.nu_f * seq.value - e.pv.value.v;
    e.F2 = -rho_v * e.nu_f * seq.derivative - e.pv.d1.v;
    e.norm = e.F1.abs();
    if (two_unknowns)
      e.norm += e.F2.abs() / BigReal::max(rho_v.abs(), BigReal(1, prec));
    return e;
  };

  const BigReal step_tol = BigReal(10, prec).pow(-target_digits - 2);
  long iters = 0;
  Eval cur = eval_at(rho, ps);

  for (long it = 0; it < 60; ++it) {
    ++iters;
    BigReal dZ_drho = z0 / (rho * rho);
    BigReal drho(0, prec), dc(0, prec);
    if (two_unknowns) {
      BigReal J11 = cur.dnu_f * seq.value - cur.pv.d1.v * dZ_drho;
      BigReal J12 = -cur.pv.value.d;
      BigReal J21 = -(cur.nu_f + rho * cur.dnu_f) * seq.derivative -
                    cur.pv.d2.v * dZ_drho;
      BigReal J22 = -cur.pv.d1.d;
      BigReal det = J11 * J22 - J12 * J21;
      if (det.is_zero())
        throw std::domain_error("solve_connection: singular Jacobian");
      drho = -(cur.F1 * J22 - cur.F2 * J12) / det;
      dc = -(J11 * cur.F2 - J21 * cur.F1) / det;
    } else {
      BigReal J11 = cur.dnu_f * seq.value - cur.pv.d1.v * dZ_drho;
      if (J11.is_zero())
        throw std::domain_error("solve_connection: singular Jacobian");
      drho = -cur.F1 / J11;
    }

    // Damped update: halve the step while the residual norm increases.
    BigReal lambda(1, prec);
    BigReal rho_try = rho, c_try = c;
    PsiSeries<Jet> ps_try = ps;
    Eval next = cur;
    bool accepted = false;
    for (int halving = 0; halving <= 20; ++halving) {
      rho_try = rho + lambda * drho;
      c_try = c + lambda * dc;
      if (rho_try > z0) {
        if (two_unknowns && !(lambda * dc).is_zero())
          ps_try = solve_modes(ms, M, Jet{c_try, cd});
        else
          ps_try = ps;
        next = eval_at(rho_try, ps_try);
        if (next.norm <= cur.norm || halving == 20) {
          accepted = true;
          break;
        }
      }
      lambda = lambda / BigReal(2, prec);
    }
    if (!accepted)
      throw std::domain_error(
          "solve_connection: Newton step rejected after 20 halvings "
          "(last rho " + rho.to_string(20) + ")");

    BigReal scaled_step =
        (lambda * drho).abs() / rho_try.abs() +
        (lambda * dc).abs() / BigReal::max(c_try.abs(), BigReal(1, prec));
    rho = rho_try;
    c = c_try;
    ps = std::move(ps_try);
    cur = next;
    if (scaled_step < step_tol && it >= 1) break;
  }
  sol.iterations = iters;
  sol.rho = rho;
  sol.c_r = c;
  sol.residual_value = cur.F1;
  sol.residual_derivative = cur.F2;

  // Combined error estimate: sequence tail plus the psi-series tail (the
  // latter needs a plain BigReal series at the solved constant).
  {
    BigReal Z0 = BigReal(1, prec) - z0 / rho;
    FieldTraits<BigReal>::Ctx fctx{prec};
    ModeSystem<BigReal> msf = build_mode_system<BigReal>(f, fctx);
    PsiSeries<BigReal> psf = solve_modes(msf, M, c);
    PsiTail pt = psi_tail(psf, Z0, Z0.log(), M);
    sol.error_estimate = cur.nu_f.abs() * seq.tail + pt.bound;
    sol.c_natural = c / cur.nu_f;
  }
  return sol;
}

}  // namespace psitree
