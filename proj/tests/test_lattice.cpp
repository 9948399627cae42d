// Operator algebra on window fields: shift, coin, walk, adjoints, the
// finite-rank perturbation V, and time evolution.

#include <catch2/catch_amalgamated.hpp>

#include "qws/coin.hpp"
#include "qws/lattice.hpp"
#include "qws/norms.hpp"
#include "qws/walk.hpp"

#include "support.hpp"

using namespace qws;
using qws::testing::max_difference;
using qws::testing::random_field;

TEST_CASE("chirality tables: axes, shift directions, labels") {
  CHECK(axis_of(Chirality::Left) == 0);
  CHECK(axis_of(Chirality::Right) == 0);
  CHECK(axis_of(Chirality::Down) == 1);
  CHECK(axis_of(Chirality::Up) == 1);
  CHECK(shift_sign(Chirality::Left) == +1);
  CHECK(shift_sign(Chirality::Right) == -1);
  CHECK(shift_sign(Chirality::Down) == +1);
  CHECK(shift_sign(Chirality::Up) == -1);
  CHECK(chirality_label(Chirality::Down) == 'D');
  CHECK(chirality_from_label('U') == Chirality::Up);
  CHECK_THROWS_AS(chirality_from_label('x'), std::invalid_argument);
}

TEST_CASE("shift moves point masses the way the chirality dictates") {
  Window w(5);
  // A Left mass moves left: the state at x after the shift is what sat at
  // x + e1 before it.
  GridField const left = apply_shift(delta_field(w, Site{0, 0}, Chirality::Left));
  CHECK(left.at(Site{-1, 0}, Chirality::Left) == cplx(1.0));
  CHECK(l2_norm(left) == Catch::Approx(1.0));

  GridField const up = apply_shift(delta_field(w, Site{0, 0}, Chirality::Up));
  CHECK(up.at(Site{0, 1}, Chirality::Up) == cplx(1.0));

  GridField const invLeft = apply_shift_inverse(delta_field(w, Site{0, 0}, Chirality::Left));
  CHECK(invLeft.at(Site{1, 0}, Chirality::Left) == cplx(1.0));
}

TEST_CASE("shift and its inverse cancel exactly on interior fields") {
  std::mt19937_64 rng(7001);
  Window w(8);
  GridField const f = random_field(w, rng, 6);
  CHECK(max_difference(apply_shift_inverse(apply_shift(f)), f) == 0.0);
  CHECK(max_difference(apply_shift(apply_shift_inverse(f)), f) == 0.0);
  CHECK(l2_norm(apply_shift(f)) == Catch::Approx(l2_norm(f)));
}

TEST_CASE("coin acts pointwise, preserves norm, is identity off its box") {
  std::mt19937_64 rng(7002);
  Window w(6);
  CoinField const c = CoinField::constant(2, coin_example1());

  GridField const f = random_field(w, rng);
  GridField const cf = apply_coin(c, f);
  CHECK(l2_norm(cf) == Catch::Approx(l2_norm(f)));

  // Pointwise action at a box site.
  Site const x{1, -2};
  Vec4 const expected = coin_example1() * f.value(x);
  CHECK((cf.value(x) - expected).cwiseAbs().maxCoeff() == 0.0);

  // A field living entirely off D is untouched.
  GridField g(w);
  g.at(Site{5, 5}, Chirality::Right) = cplx(2.0, -1.0);
  g.at(Site{-6, 3}, Chirality::Down) = cplx(0.0, 1.0);
  CHECK(max_difference(apply_coin(c, g), g) == 0.0);

  // Coin adjoint undoes the coin.
  CHECK(max_difference(apply_coin_adjoint(c, cf), f) <= 1e-15);
}

TEST_CASE("walk unitarity and adjoint consistency on interior fields") {
  std::mt19937_64 rng(7003);
  Window w(10);
  CoinField const c = CoinField::constant(1, coin_example2());

  GridField const f = random_field(w, rng, 8);
  GridField const g = random_field(w, rng, 8);

  GridField const uf = apply_walk(c, f);
  CHECK(l2_norm(uf) == Catch::Approx(l2_norm(f)).epsilon(1e-12));

  // (U f, g) = (f, U* g) with conjugation on the second slot.
  cplx const lhs = pairing(uf, g);
  cplx const rhs = pairing(f, apply_walk_adjoint(c, g));
  CHECK(std::abs(lhs - rhs) <= 1e-12 * l2_norm(f) * l2_norm(g));

  // U* U = 1 away from the truncation boundary.
  CHECK(max_difference(apply_walk_adjoint(c, uf), f) <= 1e-14);

  // Identity coin degenerates the walk to the bare shift.
  CoinField const id = CoinField::identity(1);
  CHECK(max_difference(apply_walk(id, f), apply_free_walk(f)) == 0.0);
}

TEST_CASE("V = S(C-1) matches U - U0 and is adjoint to (C*-1)S^{-1}") {
  std::mt19937_64 rng(7004);
  Window w(7);
  CoinField const c = CoinField::constant(2, coin_example1());

  GridField const f = random_field(w, rng, 5);
  GridField const g = random_field(w, rng, 5);

  // Dual route: the direct S(C-1) kernel against the operator difference.
  VApplication const vf = apply_V(c, f);
  GridField diff = apply_walk(c, f);
  GridField const u0f = apply_free_walk(f);
  diff.for_each_site([&](Site x) {
    for (Chirality p : all_chiralities) diff.at(x, p) -= u0f.at(x, p);
  });
  CHECK(max_difference(vf.field, diff) <= 1e-15);

  // Adjoint pairing.
  VApplication const vg = apply_V_adjoint(c, g);
  CHECK(std::abs(pairing(vf.field, g) - pairing(f, vg.field)) <=
        1e-12 * l2_norm(f) * l2_norm(g));

  // Identity coin kills V.
  CHECK(l2_norm(apply_V(CoinField::identity(2), f).field) == 0.0);

  // Input supported outside D and its collar is annihilated.
  GridField far(w);
  far.at(Site{5, 5}, Chirality::Left) = 1.0;
  far.at(Site{-5, 0}, Chirality::Up) = 1.0;
  CHECK(l2_norm(apply_V(c, far).field) == 0.0);
}

TEST_CASE("V support box is honored by every basis field") {
  Window w(5);
  CoinField const c = CoinField::constant(1, coin_example2());
  for (int y1 = -5; y1 <= 5; ++y1)
    for (int y2 = -5; y2 <= 5; ++y2)
      for (Chirality q : all_chiralities) {
        VApplication const v = apply_V(c, delta_field(w, Site{y1, y2}, q));
        v.field.for_each_site([&](Site x) {
          for (Chirality p : all_chiralities)
            if (v.field.at(x, p) != cplx(0.0)) {
              REQUIRE(v.support.contains(x));
            }
        });
      }
}

TEST_CASE("V* lands inside D") {
  std::mt19937_64 rng(7005);
  Window w(6);
  CoinField const c = CoinField::constant(2, coin_example1());
  VApplication const v = apply_V_adjoint(c, random_field(w, rng));
  v.field.for_each_site([&](Site x) {
    if (!c.in_box(x)) {
      for (Chirality p : all_chiralities) REQUIRE(v.field.at(x, p) == cplx(0.0));
    }
  });
}

TEST_CASE("evaluator walk agrees with the window walk on the interior") {
  std::mt19937_64 rng(7006);
  Window w(6);
  CoinField const c = CoinField::constant(1, coin_example2());
  GridField const f = random_field(w, rng, 4);

  FieldEvaluator const ue = apply_walk(c, as_evaluator(f));
  GridField const ug = apply_walk(c, f);
  for (int x1 = -5; x1 <= 5; ++x1)
    for (int x2 = -5; x2 <= 5; ++x2) {
      Vec4 const a = ue(Site{x1, x2});
      Vec4 const b = ug.value(Site{x1, x2});
      REQUIRE((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("evolution: ballistic point mass and norm conservation") {
  Window w(9);
  CoinField const id = CoinField::identity(1);

  EvolutionResult const still = evolve(id, delta_field(w, Site{2, 1}, Chirality::Down), 0);
  CHECK(still.field.at(Site{2, 1}, Chirality::Down) == cplx(1.0));
  CHECK(still.validityRadius == 9);

  EvolutionResult const moved = evolve(id, delta_field(w, Site{0, 0}, Chirality::Left), 3);
  CHECK(moved.field.at(Site{-3, 0}, Chirality::Left) == cplx(1.0));
  CHECK(l2_norm(moved.field) == Catch::Approx(1.0));
  CHECK(moved.validityRadius == 6);

  std::mt19937_64 rng(7007);
  CoinField const c = CoinField::constant(1, coin_example1());
  GridField const f = random_field(w, rng, 3);
  double const before = l2_norm(f);
  EvolutionResult const r = evolve(c, f, 5);  // support radius 3 + 5 steps < L
  CHECK(l2_norm(r.field) == Catch::Approx(before).epsilon(1e-12));
}
