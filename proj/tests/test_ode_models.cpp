#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "psitree/family.hpp"
#include "psitree/linalg.hpp"
#include "psitree/mode_system.hpp"
#include "psitree/psi_series.hpp"

using namespace psitree;

namespace {
const FieldTraits<Rational>::Ctx kRatCtx{};

Rational rising_rat(const Rational& x, long n) { return rising(x, n); }

bool close_bits(const BigReal& a, const BigReal& b, long bits) {
  BigReal scale = BigReal::max(a.abs(), BigReal(1, a.precision()));
  return (a - b).abs() <= scale.ldexp(-bits);
}
}  // namespace

TEST_CASE("BST system: matrix, seeds, resonance polynomial") {
  ModeSystem<Rational> ms = build_bst_system<Rational>(2, kRatCtx);
  CHECK(ms.s == 2);
  CHECK(ms.alpha == 2);
  CHECK(ms.M[0][0] == Rational(2));
  CHECK(ms.M[0][1] == Rational(1));
  CHECK(ms.M[1][0] == Rational(12));
  CHECK(ms.M[1][1] == Rational(3));
  CHECK(ms.seed[0] == Rational(6));
  CHECK(ms.seed[1] == Rational(-12));
  std::vector<Rational> cp = char_poly(ms.M);
  REQUIRE(cp.size() == 3);
  CHECK(cp[0] == Rational(-6));  // (r+1)(r-6)
  CHECK(cp[1] == Rational(-5));
  CHECK(cp[2] == Rational(1));
}

TEST_CASE("d-fold BST: det(rI - M) = (-1)^d [rising(d-r, d) - (2d)!/d!]") {
  for (long d = 2; d <= 6; ++d) {
    ModeSystem<Rational> ms = build_bst_system<Rational>(d, kRatCtx);
    std::vector<Rational> cp = char_poly(ms.M);
    Rational sign = (d % 2 == 0) ? 1 : -1;
    for (long r = -3; r <= 2 * d + 3; ++r) {
      Rational ref =
          sign * (rising_rat(Rational(d - r), d) - factorial(2 * d) / factorial(d));
      CHECK(peval(cp, Rational(r)) == ref);
    }
    // r = -1 is always a resonance.
    CHECK(peval(cp, Rational(-1)) == Rational(0));
  }
}

TEST_CASE("m-ary: det(rI - M) = prod_{2<=j<2m} (r-j) - (2m)!/2") {
  for (long m = 2; m <= 5; ++m) {
    ModeSystem<Rational> ms = build_mary_system<Rational>(m, kRatCtx);
    CHECK(ms.s == 2 * m - 2);
    std::vector<Rational> cp = char_poly(ms.M);
    for (long r = -3; r <= 2 * m + 4; ++r) {
      Rational prod = 1;
      for (long j = 2; j < 2 * m; ++j) prod *= Rational(r - j);
      CHECK(peval(cp, Rational(r)) == prod - factorial(2 * m) / Rational(2));
    }
    CHECK(peval(cp, Rational(-1)) == Rational(0));
    CHECK(peval(cp, Rational(2 * m + 2)) == Rational(0));
  }
}

TEST_CASE("fringe-balanced: det factorization with the blocked second factor") {
  for (long t = 0; t <= 3; ++t) {
    ModeSystem<Rational> ms = build_fringe_system<Rational>(t, kRatCtx);
    CHECK(ms.s == 4 * t + 2);
    std::vector<Rational> cp = char_poly(ms.M);
    Rational tail_prod = 1;  // 2 prod_{2t+2 <= j <= 4t+3} j
    for (long j = 2 * t + 2; j <= 4 * t + 3; ++j) tail_prod *= Rational(j);
    for (long r = -3; r <= 4 * t + 6; ++r) {
      Rational head = 1, tail = 1;
      for (long j = 2; j <= 2 * t + 1; ++j) head *= Rational(r - j);
      for (long j = 2 * t + 2; j <= 4 * t + 3; ++j) tail *= Rational(r - j);
      CHECK(peval(cp, Rational(r)) == head * (tail - Rational(2) * tail_prod));
    }
    CHECK(peval(cp, Rational(-1)) == Rational(0));
  }
}

TEST_CASE("cross-family system equalities: fringe(0) == mary-normalized bst(2)") {
  ModeSystem<Rational> bst = build_bst_system<Rational>(2, kRatCtx);
  ModeSystem<Rational> fr = build_fringe_system<Rational>(0, kRatCtx);
  ModeSystem<Rational> ma = build_mary_system<Rational>(2, kRatCtx);
  CHECK(fr.M == bst.M);
  CHECK(ma.M == bst.M);
  CHECK(fr.seed[0] == bst.seed[0]);  // fringe(0) seeds equal BST's
  CHECK(fr.seed[1] == bst.seed[1]);
  CHECK(ma.seed[0] == Rational(1));  // m-ary is scaled by 1/lambda_2 = 1/6
  CHECK(bst.seed[0] == Rational(6) * ma.seed[0]);
}

TEST_CASE("relaxed k-d: matrix and resonance (r+1)(r-2)") {
  FieldTraits<BigReal>::Ctx ctx{256};
  ModeSystem<BigReal> ms =
      build_mode_system<BigReal>(Family::relaxed_kd(2, 1, 256), ctx);
  CHECK(ms.alpha == 1);
  CHECK(ms.M[0][0] == Rational(1));
  CHECK(ms.M[0][1] == Rational(1));
  CHECK(ms.M[1][0] == Rational(2));
  CHECK(ms.M[1][1] == Rational(0));
  std::vector<Rational> cp = char_poly(ms.M);
  CHECK(cp == std::vector<Rational>{Rational(-2), Rational(-1), Rational(1)});
  // u0 = 2/(beta+1), v0 = -u0.
  BigReal beta = ms.family.beta.round_to(256);
  CHECK(close_bits(ms.seed[0], BigReal(2, 256) / (beta + BigReal(1, 256)), 240));
  CHECK(close_bits(ms.seed[1], -ms.seed[0], 240));
}

TEST_CASE("quadtree: exact seeds over Q(v), v^2 = 2 - 3v") {
  FieldTraits<AlgElem>::Ctx actx{quadtree_alg_ctx(256)};
  ModeSystem<AlgElem> ms = build_mode_system<AlgElem>(Family::quadtree(), actx);
  // 3 v^2 = 6 - 9v and -6 v^2 = -12 + 18v.
  CHECK(ms.seed[0].coeffs() == std::vector<Rational>{Rational(6), Rational(-9)});
  CHECK(ms.seed[1].coeffs() ==
        std::vector<Rational>{Rational(-12), Rational(18)});
  std::vector<Rational> cp = char_poly(ms.M);
  CHECK(peval(cp, Rational(6)) == Rational(0));
  CHECK(peval(cp, Rational(-1)) == Rational(0));

  // The AlgElem and BigReal instantiations agree numerically on g(1), g(2).
  FieldTraits<BigReal>::Ctx fctx{256};
  ModeSystem<BigReal> mf = build_mode_system<BigReal>(Family::quadtree(), fctx);
  std::vector<std::vector<TauPoly<AlgElem>>> ma_modes = {
      {TauPoly<AlgElem>::constant(ms.seed[0]),
       TauPoly<AlgElem>::constant(ms.seed[1])}};
  std::vector<std::vector<TauPoly<BigReal>>> mf_modes = {
      {TauPoly<BigReal>::constant(mf.seed[0]),
       TauPoly<BigReal>::constant(mf.seed[1])}};
  auto ga = ms.g(1, ma_modes);
  auto gf = mf.g(1, mf_modes);
  for (long j = 0; j < 2; ++j) {
    BigReal va = ga[j].is_zero() ? BigReal(0, 256)
                                 : ga[j].coeffs()[0].to_bigreal(256);
    BigReal vf = gf[j].is_zero() ? BigReal(0, 256) : gf[j].coeffs()[0];
    CHECK(close_bits(va, vf, 230));
  }
}

TEST_CASE("partition d=2 at omega=1: exact system over Q(lambda)") {
  FieldTraits<AlgElem>::Ctx actx{quadtree_alg_ctx(256)};
  ModeSystem<AlgElem> ms =
      build_mode_system<AlgElem>(Family::partition(2, BigReal(1, 128)), actx);
  // v = lambda^2/2 = (2 - 3 lambda)/2 = 1 - (3/2) lambda; u0 = 6v.
  CHECK(ms.seed[0].coeffs() ==
        std::vector<Rational>{Rational(6), Rational(-9)});
  std::vector<Rational> cp = char_poly(ms.M);
  CHECK(peval(cp, Rational(6)) == Rational(0));
  // d > 2 not implemented as a mode system.
  CHECK_THROWS_AS(
      build_mode_system<AlgElem>(Family::partition(3, BigReal(1, 128)), actx),
      std::domain_error);
}

TEST_CASE("Boltzmann: seeds 6 c2, -12 c2 and resonance 6") {
  for (long nu : {1L, 2L, 3L, 4L}) {
    ModeSystem<Rational> ms = build_boltzmann_system<Rational>(nu, kRatCtx);
    Rational c2 = Rational(nu * (nu + 1)) / Rational(nu + 2);
    CHECK(ms.seed[0] == Rational(6) * c2);
    CHECK(ms.seed[1] == Rational(-12) * c2);
    std::vector<Rational> cp = char_poly(ms.M);
    CHECK(peval(cp, Rational(6)) == Rational(0));
    CHECK(peval(cp, Rational(-1)) == Rational(0));
  }
}

TEST_CASE("exact fields reject families with transcendental-looking constants") {
  CHECK_THROWS_AS(build_mode_system<Rational>(Family::quadtree(), kRatCtx),
                  std::domain_error);
  CHECK_THROWS_AS(
      build_mode_system<Rational>(Family::relaxed_kd(2, 1, 128), kRatCtx),
      std::domain_error);
}

TEST_CASE("first mode by hand: BST u_1 = -12/5") {
  ModeSystem<Rational> ms = build_bst_system<Rational>(2, kRatCtx);
  std::vector<std::vector<TauPoly<Rational>>> modes = {
      {TauPoly<Rational>::constant(ms.seed[0]),
       TauPoly<Rational>::constant(ms.seed[1])}};
  auto g1 = ms.g(1, modes);
  // A_1 = I - M, constant right-hand side (v_0, 0).
  Mat<Rational> A = {{Rational(-1), Rational(-1)},
                     {Rational(-12), Rational(-2)}};
  Vec<Rational> rhs = {g1[0].coeffs().at(0), Rational(0)};
  CHECK(g1[1].is_zero());
  Vec<Rational> phi = gauss_solve(A, rhs);
  CHECK(phi[0] == Rational(-12, 5));
  CHECK(phi[1] == Rational(72, 5));
}
