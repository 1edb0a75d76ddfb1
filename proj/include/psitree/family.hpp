#pragma once

// Family descriptors for the nonlinear "Faltung"-type recurrences handled by
// this library, together with the small closed-form constants attached to
// each family (leading amplitudes, structural exponents, defining parameters).
//
// The eight families:
//   BstEquality{d}    p_n = n^-d sum p_j p_{n-1-j}         (equality of d BSTs)
//   MarySearch{m}     m-ary search tree equality, m-fold convolution
//   FringeBalanced{t} median-of-(2t+1) BST equality
//   PhyloAgreement    q_n = 2/(n-1)^2 sum q_j q_{n-j}
//   QuadtreeMoments   partial-match cost moments in random 2-d quadtrees
//   RelaxedKd{beta}   partial-match cost moments in relaxed k-d trees
//   Partition{d,w}    moments of recursive interval-splitting limit laws
//   Boltzmann{nu}     Tjon-Wu / Boltzmann equation Ansatz coefficients

#include <memory>
#include <stdexcept>
#include <string>

#include "psitree/bigreal.hpp"
#include "psitree/field.hpp"
#include "psitree/gamma.hpp"
#include "psitree/rational.hpp"

namespace psitree {

enum class FamilyKind {
  BstEquality,
  MarySearch,
  FringeBalanced,
  PhyloAgreement,
  QuadtreeMoments,
  RelaxedKd,
  Partition,
  Boltzmann,
};

struct Family {
  FamilyKind kind = FamilyKind::BstEquality;
  long d = 2;       // BstEquality, Partition
  long m = 2;       // MarySearch
  long t = 0;       // FringeBalanced
  long nu = 1;      // Boltzmann
  BigReal beta{0.0, 128};   // RelaxedKd
  BigReal omega{1.0, 128};  // Partition

  static Family bst(long d) {
    if (d < 2) throw std::domain_error("BstEquality: d >= 2 required");
    Family f;
    f.kind = FamilyKind::BstEquality;
    f.d = d;
    return f;
  }
  static Family mary(long m) {
    if (m < 2) throw std::domain_error("MarySearch: m >= 2 required");
    Family f;
    f.kind = FamilyKind::MarySearch;
    f.m = m;
    return f;
  }
  static Family fringe(long t) {
    if (t < 0) throw std::domain_error("FringeBalanced: t >= 0 required");
    Family f;
    f.kind = FamilyKind::FringeBalanced;
    f.t = t;
    return f;
  }
  static Family phylo() {
    Family f;
    f.kind = FamilyKind::PhyloAgreement;
    return f;
  }
  static Family quadtree() {
    Family f;
    f.kind = FamilyKind::QuadtreeMoments;
    return f;
  }
  static Family relaxed_kd(const BigReal& beta) {
    if (beta.sign() <= 0 || beta >= BigReal(1, beta.precision()))
      throw std::domain_error("RelaxedKd: beta in (0,1) required");
    Family f;
    f.kind = FamilyKind::RelaxedKd;
    f.beta = beta;
    return f;
  }
  // beta derived from a query pattern with s of the k coordinates specified.
  static Family relaxed_kd(long k, long s, long prec) {
    BigReal nine(9, prec), eight(8, prec);
    BigReal beta = ((nine - eight * BigReal(s, prec) / BigReal(k, prec)).sqrt() -
                    BigReal(1, prec)) /
                   BigReal(2, prec);
    return relaxed_kd(beta);
  }
  static Family partition(long d, const BigReal& omega) {
    if (d < 2) throw std::domain_error("Partition: d >= 2 required");
    if (omega.sign() <= 0)
      throw std::domain_error("Partition: omega > 0 required");
    Family f;
    f.kind = FamilyKind::Partition;
    f.d = d;
    f.omega = omega;
    return f;
  }
  static Family boltzmann(long nu) {
    if (nu < 1) throw std::domain_error("Boltzmann: nu >= 1 required");
    Family f;
    f.kind = FamilyKind::Boltzmann;
    f.nu = nu;
    return f;
  }

  std::string name() const {
    switch (kind) {
      case FamilyKind::BstEquality:
        return "bst(d=" + std::to_string(d) + ")";
      case FamilyKind::MarySearch:
        return "mary(m=" + std::to_string(m) + ")";
      case FamilyKind::FringeBalanced:
        return "fringe(t=" + std::to_string(t) + ")";
      case FamilyKind::PhyloAgreement:
        return "phylo";
      case FamilyKind::QuadtreeMoments:
        return "quadtree";
      case FamilyKind::RelaxedKd:
        return "relaxed-kd";
      case FamilyKind::Partition:
        return "partition(d=" + std::to_string(d) + ")";
      case FamilyKind::Boltzmann:
        return "boltzmann(nu=" + std::to_string(nu) + ")";
    }
    return "?";
  }

  // True when the defining recurrence has rational data only.
  bool exact_capable() const {
    switch (kind) {
      case FamilyKind::BstEquality:
      case FamilyKind::MarySearch:
      case FamilyKind::FringeBalanced:
      case FamilyKind::PhyloAgreement:
      case FamilyKind::Boltzmann:
        return true;
      default:
        return false;
    }
  }
};

// Solves rising(lambda+omega, d) = 2 rising(omega, d) for the unique
// lambda > 0 (the Malthusian exponent of the recursive partition model).
// The left side is strictly increasing in lambda, so bisection applies.
inline BigReal malthusian_lambda(const BigReal& omega, long d, long prec) {
  if (omega.sign() <= 0 || d < 2)
    throw std::domain_error("malthusian_lambda: omega > 0 and d >= 2 required");
  const long wp = prec + 32;
  BigReal w = omega.round_to(wp);
  auto rising_at = [&](const BigReal& x) {
    BigReal r(1, wp);
    for (long i = 0; i < d; ++i) r *= x + BigReal(i, wp);
    return r;
  };
  const BigReal target = BigReal(2, wp) * rising_at(w);
  BigReal lo(0, wp), hi(1, wp);
  while (rising_at(w + hi) < target) hi += hi;
  // ~wp bisection steps: the root is simple and the bracket halves each time.
  for (long it = 0; it < wp + 16; ++it) {
    BigReal mid = (lo + hi) / BigReal(2, wp);
    if (rising_at(w + mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return ((lo + hi) / BigReal(2, wp)).round_to(prec);
}

// Exact-field context for the quadtree exponent v = (sqrt(17)-3)/2, the
// generator of Q(sqrt(17)) shifted so that v itself is the generator:
// v satisfies v^2 + 3v - 2 = 0.
inline std::shared_ptr<const AlgCtx> quadtree_alg_ctx(long prec = 256) {
  auto ctx = std::make_shared<AlgCtx>();
  ctx->minpoly = {Rational(-2), Rational(3)};  // x^2 + 3x - 2
  ctx->root =
      (BigReal(17, prec).sqrt() - BigReal(3, prec)) / BigReal(2, prec);
  return ctx;
}

}  // namespace psitree
