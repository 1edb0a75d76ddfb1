#pragma once

// First-order mode systems for psi-series around the dominant singularity.
//
// Writing the normalized solution W and its companions as
//   U_j(Z) = sum_k u_k^{[j]}(tau) Z^{k - e_j},   tau = log Z,
// the ODE of each family becomes, mode by mode,
//   u_k' + (k I - M) u_k = g_k(u_0, ..., u_{k-1}),
// with a constant rational matrix M and a right-hand side g_k that collects
// the memory terms (from (1-Z)^-p factors), shift terms (from powers of Z)
// and the convolution part of the nonlinearity with all current-mode
// occurrences removed (their linearization sits inside M).
//
// Every system is normalized to be free of the unknown radius rho:
//   tree counting families:  W = rho P   (m-ary additionally / lambda_m)
//   quadtree / partition:    W = A resp. W = h (their ODEs have no rho)
//   relaxed k-d:             W = B
//   Boltzmann:               W = zeta_inf V, in the variable zeta = -z
//
// The g generator receives the modes solved so far (modes.size() == k when
// mode k is requested); indices >= modes.size() are treated as zero, which
// is exactly the "drop the current mode" convention described above.

#include <functional>
#include <string>
#include <vector>

#include "psitree/family.hpp"
#include "psitree/linalg.hpp"
#include "psitree/sequences.hpp"
#include "psitree/taupoly.hpp"

namespace psitree {

template <class F>
struct ModeSystem {
  using Ctx = typename FieldTraits<F>::Ctx;
  using Poly = TauPoly<F>;
  using Mode = std::vector<Poly>;  // one TauPoly per component

  Family family;
  Ctx ctx;
  long s = 0;              // number of first-order components
  long alpha = 2;          // U_1 ~ Z^-alpha at the singularity
  std::vector<long> expo;  // e_j (0-based component j): U_j ~ Z^{k - e_j}
  Mat<Rational> M;
  std::vector<F> seed;     // mode 0 (constants)
  std::function<Mode(long k, const std::vector<Mode>& modes)> g;
  std::string normalization;
};

namespace detail {

template <class F>
TauPoly<F> tp_const(const typename FieldTraits<F>::Ctx& ctx, const Rational& q) {
  if (q.is_zero()) return {};
  return TauPoly<F>::constant(FieldTraits<F>::from_rational(ctx, q));
}

// sum_{l < modes.size()} u_l^{[comp]}
template <class F>
TauPoly<F> sum_prefix(const std::vector<std::vector<TauPoly<F>>>& modes,
                      long comp) {
  TauPoly<F> s;
  for (const auto& m : modes) s = s + m[comp];
  return s;
}

// sum_{l < k} C(p + k - l, k - l) u_l^{[comp]}   (from a (1-Z)^-(p+1) factor)
template <class F>
TauPoly<F> sum_binom(const std::vector<std::vector<TauPoly<F>>>& modes,
                     long comp, long k, long p,
                     const typename FieldTraits<F>::Ctx& ctx) {
  TauPoly<F> s;
  for (long l = 0; l < static_cast<long>(modes.size()) && l < k; ++l) {
    Rational c = binomial(p + k - l, k - l);
    s = s + modes[l][comp].scaled(FieldTraits<F>::from_rational(ctx, c));
  }
  return s;
}

// (U_a U_b)_idx over the stored modes; indices beyond modes.size() are zero.
template <class F>
TauPoly<F> conv2(const std::vector<std::vector<TauPoly<F>>>& modes, long a,
                 long b, long idx) {
  TauPoly<F> s;
  if (idx < 0) return s;
  const long avail = static_cast<long>(modes.size());
  for (long i = 0; i <= idx; ++i) {
    long j = idx - i;
    if (i >= avail || j >= avail) continue;
    s = s + modes[i][a] * modes[j][b];
  }
  return s;
}

// (U_comp^m)_idx over the stored modes.
template <class F>
TauPoly<F> convm(const std::vector<std::vector<TauPoly<F>>>& modes, long comp,
                 long idx, long m) {
  const long avail = static_cast<long>(modes.size());
  std::vector<TauPoly<F>> base(idx + 1);
  for (long i = 0; i <= idx && i < avail; ++i) base[i] = modes[i][comp];
  std::vector<TauPoly<F>> acc = base;
  for (long l = 2; l <= m; ++l) {
    std::vector<TauPoly<F>> next(idx + 1);
    for (long i = 0; i <= idx; ++i) {
      TauPoly<F> s;
      for (long j = 0; j <= i; ++j) s = s + base[j] * acc[i - j];
      next[i] = s;
    }
    acc = std::move(next);
  }
  return acc[idx];
}

// mode index l of component comp, or zero when out of range
template <class F>
TauPoly<F> at(const std::vector<std::vector<TauPoly<F>>>& modes, long l,
              long comp) {
  if (l < 0 || l >= static_cast<long>(modes.size())) return {};
  return modes[l][comp];
}

}  // namespace detail

// --- builders ---------------------------------------------------------------

// d-fold BST equality: (z d/dz)^d P = z P^2, W = rho P, alpha = d.
// Components: U_1 = W, U_{j+1} = (1-Z) U_j'; M is bidiagonal with diagonal
// (d, ..., 2d-1), superdiagonal 1 and corner (-1)^d (2d)!/d!.
template <class F>
ModeSystem<F> build_bst_system(long d, const typename FieldTraits<F>::Ctx& ctx) {
  ModeSystem<F> ms;
  ms.family = Family::bst(d);
  ms.ctx = ctx;
  ms.s = d;
  ms.alpha = d;
  ms.normalization = "W = rho * P(z), Z = 1 - z/rho";
  ms.expo.resize(d);
  ms.M.assign(d, Vec<Rational>(d, Rational(0)));
  for (long j = 0; j < d; ++j) {
    ms.expo[j] = d + j;
    ms.M[j][j] = Rational(d + j);
    if (j + 1 < d) ms.M[j][j + 1] = Rational(1);
  }
  const Rational corner =
      (d % 2 == 0 ? Rational(1) : Rational(-1)) * factorial(2 * d) / factorial(d);
  ms.M[d - 1][0] = corner;
  ms.seed.resize(d);
  Rational u0 = factorial(2 * d) / (Rational(2) * factorial(d));
  for (long j = 0; j < d; ++j) {
    ms.seed[j] = FieldTraits<F>::from_rational(ctx, u0);
    u0 *= Rational(-(d + j));
  }
  const Rational sign = (d % 2 == 0) ? Rational(1) : Rational(-1);
  ms.g = [d, ctx, sign](long k, const std::vector<typename ModeSystem<F>::Mode>&
                                    modes) {
    typename ModeSystem<F>::Mode out(d);
    for (long j = 0; j + 1 < d; ++j)
      out[j] = detail::sum_prefix<F>(modes, j + 1);
    out[d - 1] = detail::conv2<F>(modes, 0, 0, k)
                     .scaled(FieldTraits<F>::from_rational(ctx, sign));
    return out;
  };
  return ms;
}

// m-ary search tree equality, normalized W_1 = rho Q / lambda_m so that all
// mode data is rational (lambda_m^{m-1} = (2m-1)!/(m-1)!^2). s = 2m-2.
template <class F>
ModeSystem<F> build_mary_system(long m,
                                const typename FieldTraits<F>::Ctx& ctx) {
  ModeSystem<F> ms;
  ms.family = Family::mary(m);
  ms.ctx = ctx;
  const long s = 2 * m - 2;
  ms.s = s;
  ms.alpha = 2;
  ms.normalization = "W = rho * Q(z) / lambda_m, Z = 1 - z/rho";
  ms.expo.resize(s);
  ms.M.assign(s, Vec<Rational>(s, Rational(0)));
  for (long j = 0; j < s; ++j) {
    ms.expo[j] = j + 2;
    ms.M[j][j] = Rational(j + 2);
    if (j + 1 < s) ms.M[j][j + 1] = Rational(1);
  }
  ms.M[s - 1][0] = Rational(m) * factorial(2 * m - 1);
  ms.seed.resize(s);
  Rational u0 = 1;
  for (long j = 0; j < s; ++j) {
    ms.seed[j] = FieldTraits<F>::from_rational(ctx, u0);
    u0 *= Rational(-(j + 2));
  }
  const Rational nl = factorial(2 * m - 1);
  ms.g = [m, s, ctx, nl](long k, const std::vector<typename ModeSystem<F>::Mode>&
                                     modes) {
    typename ModeSystem<F>::Mode out(s);
    // Row m-2 (0-based) carries the (1-Z)^-(m-1) memory on component m-1.
    out[m - 2] = detail::sum_binom<F>(modes, m - 1, k, m - 2, ctx);
    out[s - 1] = detail::convm<F>(modes, 0, k, m)
                     .scaled(FieldTraits<F>::from_rational(ctx, nl));
    return out;
  };
  return ms;
}

// Fringe-balanced (median-of-(2t+1)) BST equality, W = rho F, s = 4t+2.
template <class F>
ModeSystem<F> build_fringe_system(long t,
                                  const typename FieldTraits<F>::Ctx& ctx) {
  ModeSystem<F> ms;
  ms.family = Family::fringe(t);
  ms.ctx = ctx;
  const long s = 4 * t + 2;
  ms.s = s;
  ms.alpha = 2;
  ms.normalization = "W = rho * F(z), Z = 1 - z/rho";
  ms.expo.resize(s);
  ms.M.assign(s, Vec<Rational>(s, Rational(0)));
  for (long j = 0; j < s; ++j) {
    ms.expo[j] = j + 2;
    ms.M[j][j] = Rational(j + 2);
    if (j + 1 < s) ms.M[j][j + 1] = Rational(1);
  }
  ms.M[s - 1][2 * t] = Rational(2) * factorial(4 * t + 3) / factorial(2 * t + 1);
  const Rational t4 = factorial(t).pow(4);
  const Rational amp = factorial(4 * t + 3) * t4 / factorial(2 * t + 1).pow(4);
  ms.seed.resize(s);
  Rational u0 = amp;
  for (long j = 0; j < s; ++j) {
    ms.seed[j] = FieldTraits<F>::from_rational(ctx, u0);
    u0 *= Rational(-(j + 2));
  }
  const Rational cf = factorial(2 * t + 1).pow(2) / t4;
  ms.g = [t, s, ctx, cf, t4](
             long k, const std::vector<typename ModeSystem<F>::Mode>& modes) {
    typename ModeSystem<F>::Mode out(s);
    out[2 * t] = detail::sum_binom<F>(modes, 2 * t + 1, k, 2 * t, ctx);
    // Bilinear form sum_{i1,i2<=t} mu(i1,i2) (1-Z)^{2t-i1-i2}
    //                 U_{2t+1-i1} U_{2t+1-i2}, scaled by (2t+1)!^2 / t!^4.
    TauPoly<F> acc;
    for (long i1 = 0; i1 <= t; ++i1) {
      for (long i2 = 0; i2 <= t; ++i2) {
        Rational mu = t4 / (factorial(i1) * factorial(i2) *
                            factorial(t - i1).pow(2) * factorial(t - i2).pow(2));
        if ((i1 + i2) % 2 == 1) mu = -mu;
        const long q = 2 * t - i1 - i2;
        for (long j = 0; j <= q; ++j) {
          long idx = k - i1 - i2 - j;
          if (idx < 0) continue;
          Rational w = cf * mu * binomial(q, j);
          if (j % 2 == 1) w = -w;
          acc = acc + detail::conv2<F>(modes, 2 * t - i1, 2 * t - i2, idx)
                          .scaled(FieldTraits<F>::from_rational(ctx, w));
        }
      }
    }
    out[s - 1] = acc;
    return out;
  };
  return ms;
}

// Quadtree partial-match moments: v^2 (1-Z)^2 A'' - 2 (1-Z) A' + 2A = 2A^2,
// W = A, components (A, (1-Z)A'). The constant v must satisfy v^2 + 3v = 2.
template <class F>
ModeSystem<F> build_quadtree_system(const typename FieldTraits<F>::Ctx& ctx,
                                    const F& v) {
  ModeSystem<F> ms;
  ms.family = Family::quadtree();
  ms.ctx = ctx;
  ms.s = 2;
  ms.alpha = 2;
  ms.normalization = "W = A(z), Z = 1 - z/rho";
  ms.expo = {2, 3};
  ms.M = {{Rational(2), Rational(1)}, {Rational(12), Rational(3)}};
  const F two = FieldTraits<F>::from_rational(ctx, Rational(2));
  const F three = FieldTraits<F>::from_rational(ctx, Rational(3));
  const F v2 = v * v;
  ms.seed = {three * v2, -(three + three) * v2};
  const F inv_v2 = FieldTraits<F>::from_rational(ctx, Rational(1)) / v2;
  const F shift = two - v2;
  ms.g = [ctx, two, inv_v2, shift](
             long k, const std::vector<typename ModeSystem<F>::Mode>& modes) {
    typename ModeSystem<F>::Mode out(2);
    out[0] = detail::sum_prefix<F>(modes, 1);
    TauPoly<F> acc;
    for (long j = 0; j <= k; ++j) {
      TauPoly<F> inner = detail::conv2<F>(modes, 0, 0, j).scaled(two) -
                         detail::at<F>(modes, j - 2, 0).scaled(two) +
                         detail::at<F>(modes, j - 1, 1).scaled(shift);
      acc = acc + inner;
    }
    out[1] = acc.scaled(inv_v2);
    return out;
  };
  return ms;
}

// Recursive partition moments, d = 2: v (1-Z)^2 h'' - (1-Z) h' + h = h^2,
// with v = lambda^2 / (omega (omega + 1)). W = h.
template <class F>
ModeSystem<F> build_partition2_system(const typename FieldTraits<F>::Ctx& ctx,
                                      const F& v) {
  ModeSystem<F> ms;
  ms.family = Family::partition(2, BigReal(1, 128));
  ms.ctx = ctx;
  ms.s = 2;
  ms.alpha = 2;
  ms.normalization = "W = h(z), Z = 1 - z/rho";
  ms.expo = {2, 3};
  ms.M = {{Rational(2), Rational(1)}, {Rational(12), Rational(3)}};
  const F one = FieldTraits<F>::from_rational(ctx, Rational(1));
  const F six = FieldTraits<F>::from_rational(ctx, Rational(6));
  ms.seed = {six * v, -(six + six) * v};
  const F inv_v = one / v;
  const F shift = one - v;
  ms.g = [ctx, inv_v, shift](
             long k, const std::vector<typename ModeSystem<F>::Mode>& modes) {
    typename ModeSystem<F>::Mode out(2);
    out[0] = detail::sum_prefix<F>(modes, 1);
    TauPoly<F> acc;
    for (long j = 0; j <= k; ++j) {
      TauPoly<F> inner = detail::conv2<F>(modes, 0, 0, j) -
                         detail::at<F>(modes, j - 2, 0) +
                         detail::at<F>(modes, j - 1, 1).scaled(shift);
      acc = acc + inner;
    }
    out[1] = acc.scaled(inv_v);
    return out;
  };
  return ms;
}

// Relaxed k-d tree moments:
//   b (1-Z)^2 B'' - (b+1)^2 (1-Z) B' + (b+1) B
//       = (b+1) B^2 - b (b+1) (1-Z) B' B,
// W = B, alpha = 1, components (B, (1-Z)B'). b is the exponent beta.
template <class F>
ModeSystem<F> build_relaxed_system(const typename FieldTraits<F>::Ctx& ctx,
                                   const F& beta) {
  ModeSystem<F> ms;
  ms.family = Family::relaxed_kd(BigReal(Rational(1, 2), 128));
  ms.ctx = ctx;
  ms.s = 2;
  ms.alpha = 1;
  ms.normalization = "W = B(z), Z = 1 - z/rho";
  ms.expo = {1, 2};
  ms.M = {{Rational(1), Rational(1)}, {Rational(2), Rational(0)}};
  const F one = FieldTraits<F>::from_rational(ctx, Rational(1));
  const F two = FieldTraits<F>::from_rational(ctx, Rational(2));
  const F u0 = two / (beta + one);
  ms.seed = {u0, -u0};
  const F ca = (beta + one) / beta;                    // (b+1)/b
  const F cb = beta + one;                             // b+1
  const F cc = (beta * beta + beta + one) / beta;      // (b^2+b+1)/b
  ms.g = [ctx, ca, cb, cc](
             long k, const std::vector<typename ModeSystem<F>::Mode>& modes) {
    typename ModeSystem<F>::Mode out(2);
    out[0] = detail::sum_prefix<F>(modes, 1);
    TauPoly<F> acc;
    for (long j = 0; j <= k; ++j) {
      TauPoly<F> inner =
          (detail::conv2<F>(modes, 0, 0, j - 1) - detail::at<F>(modes, j - 2, 0))
              .scaled(ca) -
          detail::conv2<F>(modes, 1, 0, j).scaled(cb) +
          detail::at<F>(modes, j - 1, 1).scaled(cc);
      acc = acc + inner;
    }
    out[1] = acc;
    return out;
  };
  return ms;
}

// Boltzmann-equation coefficients, in zeta = -z with T = 1 - zeta V:
//   c2 (1-Z) W'' - c1 W' - W^2 = 0,   c2 = nu(nu+1)/(nu+2), c1 = 2 c2 - 1,
// W = zeta_inf V, components (W, W').
template <class F>
ModeSystem<F> build_boltzmann_system(long nu,
                                     const typename FieldTraits<F>::Ctx& ctx) {
  ModeSystem<F> ms;
  ms.family = Family::boltzmann(nu);
  ms.ctx = ctx;
  ms.s = 2;
  ms.alpha = 2;
  ms.normalization = "W = zeta_inf * V(zeta), Z = 1 - zeta/zeta_inf";
  ms.expo = {2, 3};
  ms.M = {{Rational(2), Rational(1)}, {Rational(12), Rational(3)}};
  const Rational c2 = Rational(nu * (nu + 1)) / Rational(nu + 2);
  const Rational c1 = Rational(2) * c2 - Rational(1);
  ms.seed = {FieldTraits<F>::from_rational(ctx, Rational(6) * c2),
             FieldTraits<F>::from_rational(ctx, Rational(-12) * c2)};
  const F fc1 = FieldTraits<F>::from_rational(ctx, c1 / c2);
  const F inv_c2 = FieldTraits<F>::from_rational(ctx, c2.inv());
  ms.g = [ctx, fc1, inv_c2](
             long k, const std::vector<typename ModeSystem<F>::Mode>& modes) {
    typename ModeSystem<F>::Mode out(2);
    TauPoly<F> acc;
    for (long j = 0; j <= k; ++j) {
      acc = acc + detail::conv2<F>(modes, 0, 0, j).scaled(inv_c2) +
            detail::at<F>(modes, j - 1, 1).scaled(fc1);
    }
    out[1] = acc;
    return out;
  };
  return ms;
}

namespace detail {

template <class F>
F lift_numeric(const typename FieldTraits<F>::Ctx& ctx, const BigReal& x) {
  if constexpr (std::is_same_v<F, BigReal>) {
    return x.round_to(ctx.prec);
  } else if constexpr (std::is_same_v<F, Jet>) {
    return Jet{x.round_to(ctx.prec), BigReal(0, ctx.prec)};
  } else {
    (void)ctx;
    (void)x;
    throw std::domain_error("mode system: numeric constant in an exact field");
  }
}

}  // namespace detail

// Builds the mode system of a family. Families with irrational structure
// constants (quadtree, partition, relaxed k-d) require a floating field or,
// where the constant is algebraic of degree 2 (quadtree; partition at
// omega = 1), the AlgElem field over x^2 + 3x - 2.
template <class F>
ModeSystem<F> build_mode_system(const Family& f,
                                const typename FieldTraits<F>::Ctx& ctx) {
  switch (f.kind) {
    case FamilyKind::BstEquality:
      return build_bst_system<F>(f.d, ctx);
    case FamilyKind::PhyloAgreement: {
      // 2 q_{n+1} satisfies the BST recurrence, so the mode system is BST's.
      ModeSystem<F> ms = build_bst_system<F>(2, ctx);
      ms.family = f;
      return ms;
    }
    case FamilyKind::MarySearch:
      return build_mary_system<F>(f.m, ctx);
    case FamilyKind::FringeBalanced:
      return build_fringe_system<F>(f.t, ctx);
    case FamilyKind::Boltzmann:
      return build_boltzmann_system<F>(f.nu, ctx);
    case FamilyKind::QuadtreeMoments: {
      if constexpr (std::is_same_v<F, AlgElem>) {
        ModeSystem<F> ms =
            build_quadtree_system<F>(ctx, AlgElem::generator(ctx.alg));
        ms.family = f;
        return ms;
      } else {
        const long prec = 256;
        BigReal v = (BigReal(17, prec).sqrt() - BigReal(3, prec)) /
                    BigReal(2, prec);
        if constexpr (std::is_same_v<F, BigReal> || std::is_same_v<F, Jet>) {
          v = (BigReal(17, ctx.prec).sqrt() - BigReal(3, ctx.prec)) /
              BigReal(2, ctx.prec);
        }
        ModeSystem<F> ms =
            build_quadtree_system<F>(ctx, detail::lift_numeric<F>(ctx, v));
        ms.family = f;
        return ms;
      }
    }
    case FamilyKind::Partition: {
      if (f.d != 2)
        throw std::domain_error(
            "mode system: partition families are implemented for d = 2");
      if constexpr (std::is_same_v<F, AlgElem>) {
        if (f.omega != BigReal(1, f.omega.precision()))
          throw std::domain_error(
              "mode system: exact partition field needs omega = 1");
        AlgElem lam = AlgElem::generator(ctx.alg);
        F v = lam * lam *
              AlgElem::from_rational(ctx.alg, Rational(1, 2));
        ModeSystem<F> ms = build_partition2_system<F>(ctx, v);
        ms.family = f;
        return ms;
      } else if constexpr (std::is_same_v<F, BigReal> ||
                           std::is_same_v<F, Jet>) {
        BigReal lam = malthusian_lambda(f.omega, 2, ctx.prec);
        BigReal w = f.omega.round_to(ctx.prec);
        BigReal v = lam * lam / (w * (w + BigReal(1, ctx.prec)));
        ModeSystem<F> ms =
            build_partition2_system<F>(ctx, detail::lift_numeric<F>(ctx, v));
        ms.family = f;
        return ms;
      } else {
        throw std::domain_error(
            "mode system: partition needs AlgElem or a floating field");
      }
    }
    case FamilyKind::RelaxedKd: {
      if constexpr (std::is_same_v<F, BigReal> || std::is_same_v<F, Jet>) {
        ModeSystem<F> ms = build_relaxed_system<F>(
            ctx, detail::lift_numeric<F>(ctx, f.beta));
        ms.family = f;
        return ms;
      } else {
        throw std::domain_error(
            "mode system: relaxed k-d needs a floating field");
      }
    }
  }
  throw std::logic_error("build_mode_system: unreachable");
}

}  // namespace psitree
