#pragma once

// Evaluation of the defining recurrences.
//
// Families with rational data (BST equality, m-ary, fringe-balanced, phylo,
// Boltzmann) evaluate exactly over Rational by default and can opt into
// arbitrary-precision floating point for long slices. The moment families
// (quadtree, relaxed k-d, partition) have Gamma-function data and evaluate in
// floating point only; the default working precision grows linearly with the
// slice length (3.5 bits per term + 128 guard bits), enough because these
// recurrences are subtraction-free apart from O(1) boundary terms.

#include <stdexcept>
#include <vector>

#include "psitree/bigreal.hpp"
#include "psitree/family.hpp"
#include "psitree/gamma.hpp"
#include "psitree/rational.hpp"

namespace psitree {

inline long default_sequence_prec(long n_max) {
  return (7 * n_max) / 2 + 128;
}

namespace detail {

// Minimal adapter so each recurrence is written once and instantiated for
// both Rational and BigReal.
template <class T>
struct SeqOps;

template <>
struct SeqOps<Rational> {
  long prec;  // unused
  Rational from_rat(const Rational& q) const { return q; }
  Rational from_long(long n) const { return Rational(n); }
};

template <>
struct SeqOps<BigReal> {
  long prec;
  BigReal from_rat(const Rational& q) const { return BigReal(q, prec); }
  BigReal from_long(long n) const { return BigReal(n, prec); }
};

// p_n = n^-d sum_{0<=j<n} p_j p_{n-1-j},  p_0 = p0.
template <class T>
std::vector<T> seq_bst(long d, long n_max, const SeqOps<T>& ops,
                       const Rational& p0 = Rational(1)) {
  std::vector<T> p;
  p.reserve(n_max + 1);
  p.push_back(ops.from_rat(p0));
  for (long n = 1; n <= n_max; ++n) {
    T s = ops.from_long(0);
    for (long j = 0; j < n; ++j) s = s + p[j] * p[n - 1 - j];
    T den = ops.from_rat(Rational(n).pow(d));
    p.push_back(s / den);
  }
  return p;
}

// q_1 = 1, q_n = 2/(n-1)^2 sum_{1<=j<n} q_j q_{n-j}; index 0 holds 0.
template <class T>
std::vector<T> seq_phylo(long n_max, const SeqOps<T>& ops) {
  std::vector<T> q;
  q.reserve(n_max + 1);
  q.push_back(ops.from_long(0));
  if (n_max >= 1) q.push_back(ops.from_long(1));
  for (long n = 2; n <= n_max; ++n) {
    T s = ops.from_long(0);
    for (long j = 1; j < n; ++j) s = s + q[j] * q[n - j];
    q.push_back(s * ops.from_rat(Rational(2) / Rational((n - 1) * (n - 1))));
  }
  return q;
}

// q_j = 1 for 0 <= j <= m-2;
// q_n = C(n, m-1)^-2 sum_{j_1+...+j_m = n-m+1} q_{j_1} ... q_{j_m}.
// The m-fold convolution is maintained incrementally through the tower of
// powers (q^2, q^3, ..., q^m); index i of every power only needs q_0..q_i.
template <class T>
std::vector<T> seq_mary(long m, long n_max, const SeqOps<T>& ops) {
  std::vector<T> q;
  q.reserve(n_max + 1);
  for (long j = 0; j <= std::min(m - 2, n_max); ++j) q.push_back(ops.from_long(1));
  // pw[l-2][i] = (q^l)_i, filled for i <= filled.
  std::vector<std::vector<T>> pw(m - 1);
  long filled = -1;
  auto fill_to = [&](long idx) {
    for (; filled < idx; ++filled) {
      long i = filled + 1;
      for (long l = 2; l <= m; ++l) {
        T s = ops.from_long(0);
        const std::vector<T>& lower = (l == 2) ? q : pw[l - 3];
        for (long j = 0; j <= i; ++j) s = s + q[j] * lower[i - j];
        pw[l - 2].push_back(s);
      }
    }
  };
  for (long n = m - 1; n <= n_max; ++n) {
    fill_to(n - m + 1);  // uses q_0..q_{n-m+1}, all already known (m >= 2)
    T den = ops.from_rat(binomial(n, m - 1).pow(2));
    q.push_back(pw[m - 2][n - m + 1] / den);
  }
  return q;
}

// f_n = 1 for 0 <= n <= 2t;
// f_n = sum_{t<=j<=n-1-t} [C(j,t) C(n-1-j,t) / C(n,2t+1)]^2 f_j f_{n-1-j}.
template <class T>
std::vector<T> seq_fringe(long t, long n_max, const SeqOps<T>& ops) {
  std::vector<T> f;
  f.reserve(n_max + 1);
  for (long n = 0; n <= std::min(2 * t, n_max); ++n) f.push_back(ops.from_long(1));
  for (long n = 2 * t + 1; n <= n_max; ++n) {
    Rational dn = binomial(n, 2 * t + 1).pow(2);
    T s = ops.from_long(0);
    for (long j = t; j <= n - 1 - t; ++j) {
      Rational w = (binomial(j, t) * binomial(n - 1 - j, t)).pow(2) / dn;
      s = s + ops.from_rat(w) * f[j] * f[n - 1 - j];
    }
    f.push_back(s);
  }
  return f;
}

// t_0 = t_1 = 1; (c2 n(n-1) - n + 1) t_n = -sum_{1<=j<=n-1} t_j t_{n-j},
// c2 = nu(nu+1)/(nu+2).
template <class T>
std::vector<T> seq_boltzmann(long nu, long n_max, const SeqOps<T>& ops) {
  const Rational c2 = Rational(nu * (nu + 1)) / Rational(nu + 2);
  std::vector<T> t;
  t.reserve(n_max + 1);
  t.push_back(ops.from_long(1));
  if (n_max >= 1) t.push_back(ops.from_long(1));
  for (long n = 2; n <= n_max; ++n) {
    Rational lead = c2 * Rational(n * (n - 1)) - Rational(n - 1);
    if (lead.is_zero())
      throw std::domain_error("boltzmann: degenerate leading coefficient");
    T s = ops.from_long(0);
    for (long j = 1; j <= n - 1; ++j) s = s + t[j] * t[n - j];
    t.push_back(-s / ops.from_rat(lead));
  }
  return t;
}

// Binomial row C(m, 0..m) in floating point, by the ratio recurrence.
inline std::vector<BigReal> binomial_row(long m, long prec) {
  std::vector<BigReal> row;
  row.reserve(m + 1);
  row.emplace_back(1, prec);
  for (long j = 0; j < m; ++j)
    row.push_back(row.back() * BigReal(m - j, prec) / BigReal(j + 1, prec));
  return row;
}

// a_0 = 1, a_1 = Gamma(2v+2) / (2 Gamma(v+1)^2),
// a_m = 2 / (v (m-1) ((m+1) v + 3)) sum_{1<=j<m} C(m,j) a_j a_{m-j}.
inline std::vector<BigReal> seq_quadtree(long n_max, long prec) {
  const BigReal one(1, prec), two(2, prec), three(3, prec);
  const BigReal v = (BigReal(17, prec).sqrt() - three) / two;
  std::vector<BigReal> a;
  a.reserve(n_max + 1);
  a.push_back(one);
  if (n_max >= 1) {
    BigReal g1 = eval_gamma(v + one, prec);
    a.push_back(eval_gamma(two * v + two, prec) / (two * g1 * g1));
  }
  for (long m = 2; m <= n_max; ++m) {
    auto bin = binomial_row(m, prec);
    BigReal s(0, prec);
    for (long j = 1; j < m; ++j) s += bin[j] * a[j] * a[m - j];
    BigReal den = v * BigReal(m - 1, prec) * (BigReal(m + 1, prec) * v + three);
    a.push_back(two * s / den);
  }
  return a;
}

// b_0 = 1, b_1 = 2 Gamma(2b+2) / (b (b+1)^2 (2b+1) Gamma(b+1)^3),
// b_m = (b+1) / ((m-1) ((m+1) b + 1)) sum_{1<=j<m} C(m,j) (j b + 1) b_j b_{m-j}.
inline std::vector<BigReal> seq_relaxed_kd(const BigReal& beta, long n_max,
                                           long prec) {
  const BigReal one(1, prec), two(2, prec);
  const BigReal b = beta.round_to(prec);
  std::vector<BigReal> out;
  out.reserve(n_max + 1);
  out.push_back(one);
  if (n_max >= 1) {
    BigReal g1 = eval_gamma(b + one, prec);
    BigReal num = two * eval_gamma(two * b + two, prec);
    BigReal den = b * (b + one) * (b + one) * (two * b + one) * g1 * g1 * g1;
    out.push_back(num / den);
  }
  for (long m = 2; m <= n_max; ++m) {
    auto bin = binomial_row(m, prec);
    BigReal s(0, prec);
    for (long j = 1; j < m; ++j)
      s += bin[j] * (BigReal(j, prec) * b + one) * out[j] * out[m - j];
    BigReal den = BigReal(m - 1, prec) * (BigReal(m + 1, prec) * b + one);
    out.push_back((b + one) * s / den);
  }
  return out;
}

// h_0 = h_1 = 1; for m >= 2,
//   [1 - 2 G(d+w) G(m l + w) / (G(w) G(m l + d + w))] h_m =
//   G(d+w) / (G(w)^2 G(m l + d + w)) *
//       sum_{1<=j<m} C(m,j) G(j l + w) G((m-j) l + w) h_j h_{m-j},
// with l the Malthusian exponent. G(x + d) = rising(x, d) G(x) keeps the
// Gamma table to one entry per index.
inline std::vector<BigReal> seq_partition(long d, const BigReal& omega,
                                          long n_max, long prec) {
  const BigReal one(1, prec);
  const BigReal w = omega.round_to(prec);
  const BigReal lam = malthusian_lambda(w, d, prec);
  auto rising_d = [&](const BigReal& x) {
    BigReal r = one;
    for (long i = 0; i < d; ++i) r *= x + BigReal(i, prec);
    return r;
  };
  std::vector<BigReal> G;  // G[j] = Gamma(j lam + w)
  G.reserve(n_max + 1);
  for (long j = 0; j <= n_max; ++j)
    G.push_back(eval_gamma(BigReal(j, prec) * lam + w, prec));
  const BigReal gdw = rising_d(w) * G[0];  // Gamma(d + w)
  std::vector<BigReal> h;
  h.reserve(n_max + 1);
  h.push_back(one);
  if (n_max >= 1) h.push_back(one);
  for (long m = 2; m <= n_max; ++m) {
    BigReal gmdl = rising_d(BigReal(m, prec) * lam + w) * G[m];
    BigReal lead = one - BigReal(2, prec) * gdw * G[m] / (G[0] * gmdl);
    auto bin = binomial_row(m, prec);
    BigReal s(0, prec);
    for (long j = 1; j < m; ++j) s += bin[j] * G[j] * G[m - j] * h[j] * h[m - j];
    BigReal rhs = gdw * s / (G[0] * G[0] * gmdl);
    h.push_back(rhs / lead);
  }
  return h;
}

}  // namespace detail

// A contiguous slice of a family's sequence, indices 0..n_max.
struct SequenceSlice {
  Family family;
  bool exact = false;
  std::vector<Rational> rvals;
  std::vector<BigReal> fvals;

  long size() const {
    return static_cast<long>(exact ? rvals.size() : fvals.size());
  }
  const Rational& rat(long n) const {
    if (!exact) throw std::logic_error("SequenceSlice: not exact");
    return rvals.at(static_cast<std::size_t>(n));
  }
  BigReal num(long n, long prec) const {
    if (exact) return BigReal(rvals.at(static_cast<std::size_t>(n)), prec);
    return fvals.at(static_cast<std::size_t>(n)).round_to(prec);
  }
};

// Evaluates the family's sequence up to index n_max. `exact_mode` is honored
// for families with rational data; moment families always run in floating
// point at `prec` bits (0 = default growth rule).
inline SequenceSlice sequence(const Family& f, long n_max,
                              bool exact_mode = true, long prec = 0) {
  if (n_max < 0) throw std::domain_error("sequence: n_max >= 0 required");
  if (prec <= 0) prec = default_sequence_prec(n_max);
  SequenceSlice out;
  out.family = f;
  const bool exact = exact_mode && f.exact_capable();
  out.exact = exact;
  detail::SeqOps<Rational> rops{0};
  detail::SeqOps<BigReal> fops{prec};
  switch (f.kind) {
    case FamilyKind::BstEquality:
      if (exact)
        out.rvals = detail::seq_bst<Rational>(f.d, n_max, rops);
      else
        out.fvals = detail::seq_bst<BigReal>(f.d, n_max, fops);
      break;
    case FamilyKind::MarySearch:
      if (exact)
        out.rvals = detail::seq_mary<Rational>(f.m, n_max, rops);
      else
        out.fvals = detail::seq_mary<BigReal>(f.m, n_max, fops);
      break;
    case FamilyKind::FringeBalanced:
      if (exact)
        out.rvals = detail::seq_fringe<Rational>(f.t, n_max, rops);
      else
        out.fvals = detail::seq_fringe<BigReal>(f.t, n_max, fops);
      break;
    case FamilyKind::PhyloAgreement:
      if (exact)
        out.rvals = detail::seq_phylo<Rational>(n_max, rops);
      else
        out.fvals = detail::seq_phylo<BigReal>(n_max, fops);
      break;
    case FamilyKind::Boltzmann:
      if (exact)
        out.rvals = detail::seq_boltzmann<Rational>(f.nu, n_max, rops);
      else
        out.fvals = detail::seq_boltzmann<BigReal>(f.nu, n_max, fops);
      break;
    case FamilyKind::QuadtreeMoments:
      out.fvals = detail::seq_quadtree(n_max, prec);
      break;
    case FamilyKind::RelaxedKd:
      out.fvals = detail::seq_relaxed_kd(f.beta, n_max, prec);
      break;
    case FamilyKind::Partition:
      out.fvals = detail::seq_partition(f.d, f.omega, n_max, prec);
      break;
  }
  return out;
}

// Coefficients w_n of the family's connection series S(z) = sum w_n z^n:
// the generating function (ordinary or Gamma-weighted, depending on the
// family) that satisfies the family's normalized differential equation and
// has its dominant singularity at the family's rho.
//
//   tree counting families: ordinary generating function of the sequence
//   phylo:                  w_n = 2 q_{n+1} (the shifted-and-doubled series
//                            that satisfies the quadratic-equality equation;
//                            its radius is half the base family's)
//   quadtree / relaxed k-d:  w_m = a_m / m!
//   partition:               w_m = h_m Gamma(m lam + w) / (m! Gamma(w))
//   Boltzmann:               w_n = (-1)^n t_{n+1}   (series in zeta = -z,
//                            singular at zeta = |rho|)
inline std::vector<BigReal> connection_coeffs(const Family& f, long n_max,
                                              long prec = 0) {
  if (prec <= 0) prec = default_sequence_prec(n_max);
  std::vector<BigReal> w;
  w.reserve(n_max + 1);
  switch (f.kind) {
    case FamilyKind::BstEquality:
    case FamilyKind::MarySearch:
    case FamilyKind::FringeBalanced: {
      SequenceSlice s = sequence(f, n_max, /*exact_mode=*/false, prec);
      w = std::move(s.fvals);
      break;
    }
    case FamilyKind::PhyloAgreement: {
      SequenceSlice s = sequence(f, n_max + 1, /*exact_mode=*/false, prec);
      w.resize(n_max + 1);
      for (long n = 0; n <= n_max; ++n)
        w[n] = s.fvals[n + 1] + s.fvals[n + 1];
      break;
    }
    case FamilyKind::QuadtreeMoments:
    case FamilyKind::RelaxedKd: {
      SequenceSlice s = sequence(f, n_max, false, prec);
      BigReal fact(1, prec);
      for (long n = 0; n <= n_max; ++n) {
        if (n > 1) fact *= BigReal(n, prec);
        w.push_back(s.fvals[n] / fact);
      }
      break;
    }
    case FamilyKind::Partition: {
      SequenceSlice s = sequence(f, n_max, false, prec);
      const BigReal lam = malthusian_lambda(f.omega, f.d, prec);
      const BigReal gw = eval_gamma(f.omega.round_to(prec), prec);
      BigReal fact(1, prec);
      for (long n = 0; n <= n_max; ++n) {
        if (n > 1) fact *= BigReal(n, prec);
        BigReal g = eval_gamma(BigReal(n, prec) * lam + f.omega.round_to(prec),
                               prec);
        w.push_back(s.fvals[n] * g / (fact * gw));
      }
      break;
    }
    case FamilyKind::Boltzmann: {
      SequenceSlice s = sequence(f, n_max + 1, false, prec);
      for (long n = 0; n <= n_max; ++n) {
        BigReal v = s.fvals[n + 1];
        w.push_back((n % 2 == 0) ? v : -v);
      }
      break;
    }
  }
  return w;
}

// Closed-form tail bound for a series sum_{j>=N} (amp j + c1) (z0/rho)^j / rho:
//   amp x^N (N + c1/amp + x/(1-x)) / (rho - z0),  x = z0/rho.
// Templated so tests can evaluate it both exactly and in floating point.
template <class T>
T linear_tail_bound(const T& amp, const T& c1, const T& rho, const T& z0,
                    const T& n_from_val, long n_from) {
  T x = z0 / rho;
  T xn = x.pow(n_from);
  T one_minus_x = (rho - z0) / rho;
  return amp * xn * (n_from_val + c1 / amp + x / one_minus_x) / (rho - z0);
}

struct PartialSum {
  BigReal value;       // S_N(z0) = sum_{n<N} w_n z0^n
  BigReal derivative;  // S_N'(z0)
  BigReal tail;        // bound on |S - S_N| at z0, includes safety factor 2
  BigReal tail_main;   // the bound before the safety factor
  long n_terms = 0;
};

// Sums the first n_terms connection coefficients at z0 (0 < z0 < rho_est) and
// attaches a tail bound. For the BST family the bound uses the exact leading
// asymptotics of the coefficients; for polynomial-times-geometric families
// the amplitude is estimated from the last computed term; for the
// Gamma-damped moment families a last-term ratio bound is used. In every case
// a safety factor 2 is applied on top of the model.
inline PartialSum partial_sum(const Family& f, const BigReal& z0, long n_terms,
                              const BigReal& rho_est, long prec = 0) {
  if (n_terms < 8) throw std::domain_error("partial_sum: need n_terms >= 8");
  if (prec <= 0) prec = default_sequence_prec(n_terms);
  if (z0.sign() <= 0 || z0 >= rho_est)
    throw std::domain_error("partial_sum: need 0 < z0 < rho_est");
  std::vector<BigReal> w = connection_coeffs(f, n_terms - 1, prec);
  const BigReal z = z0.round_to(prec);
  const BigReal rho = rho_est.round_to(prec);
  PartialSum out;
  out.n_terms = n_terms;
  out.value = BigReal(0, prec);
  out.derivative = BigReal(0, prec);
  BigReal zp(1, prec);  // z^n
  BigReal last_terms[2] = {BigReal(0, prec), BigReal(0, prec)};
  for (long n = 0; n < n_terms; ++n) {
    BigReal term = w[n] * zp;
    out.value += term;
    if (n >= 1) out.derivative += BigReal(n, prec) * w[n] * zp / z;
    last_terms[0] = last_terms[1];
    last_terms[1] = term.abs();
    zp *= z;
  }

  const long N = n_terms;
  BigReal tail(0, prec);
  switch (f.kind) {
    case FamilyKind::BstEquality:
      if (f.d == 2) {
        // Exact leading data: p_n rho^{n+1} ~ 6n + 18/5.
        tail = linear_tail_bound(BigReal(6, prec), BigReal(Rational(18, 5), prec),
                                 rho, z, BigReal(N, prec), N);
        break;
      }
      [[fallthrough]];
    case FamilyKind::MarySearch:
    case FamilyKind::FringeBalanced:
    case FamilyKind::PhyloAgreement: {
      // w_n ~ amp n^g rho^{-n-1} with g = d-1 (1 for the quadratic families);
      // amp is fitted to the last computed term.
      long g = (f.kind == FamilyKind::BstEquality) ? f.d - 1 : 1;
      BigReal x = z / rho;
      BigReal amp = w[N - 1].abs() * rho.pow(N) /
                    BigReal(N - 1, prec).pow(g);
      BigReal head = BigReal(N, prec) + BigReal(1, prec) + x / (BigReal(1, prec) - x);
      tail = amp * x.pow(N) * head.pow(g) / (rho - z);
      break;
    }
    default: {
      // Gamma-damped coefficients: successive term ratios decrease, so
      // |tail| <= t_{N-1} q / (1 - q) with q the last observed ratio.
      BigReal q = last_terms[1] / BigReal::max(last_terms[0], BigReal(1, prec).ldexp(-prec));
      if (q >= BigReal(1, prec))
        q = z / rho;  // ratios not yet in the asymptotic regime
      tail = last_terms[1] * q / (BigReal(1, prec) - q);
      break;
    }
  }
  out.tail_main = tail.abs();
  out.tail = out.tail_main + out.tail_main;
  return out;
}

}  // namespace psitree
