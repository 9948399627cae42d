// Coin validation: unitarity and the two chirality-pair minor conditions.

#include <catch2/catch_amalgamated.hpp>

#include "qws/coin.hpp"

using namespace qws;

TEST_CASE("builtin matrices are unitary") {
  for (const char* name : {"example1", "example2", "grover", "fourier", "identity"}) {
    Mat4 const m = builtin_coin_matrix(name);
    INFO("coin " << name);
    CHECK((m * m.adjoint() - Mat4::Identity()).norm() <= 1e-14);
  }
  CHECK_THROWS_AS(builtin_coin_matrix("hadamard"), std::invalid_argument);
}

TEST_CASE("example coins pass validation with the documented minors") {
  // Odd pair (Left, Down) = rows/cols {0,2}; even pair (Right, Up) = {1,3}.
  Mat4 const e1 = coin_example1();
  CHECK(std::abs(chirality_minor_det(e1, Chirality::Left, Chirality::Down) - cplx(-0.5)) <= 1e-15);
  CHECK(std::abs(chirality_minor_det(e1, Chirality::Right, Chirality::Up) - cplx(-0.5)) <= 1e-15);

  // Both minors of the second example have modulus 1/sqrt(24).
  Mat4 const e2 = coin_example2();
  double const expected = 1.0 / std::sqrt(24.0);
  CHECK(std::abs(chirality_minor_det(e2, Chirality::Left, Chirality::Down)) ==
        Catch::Approx(expected));
  CHECK(std::abs(chirality_minor_det(e2, Chirality::Right, Chirality::Up)) ==
        Catch::Approx(expected));

  for (int n0 : {1, 2}) {
    CHECK(validate_coin(CoinField::constant(n0, e1)).ok());
    CHECK(validate_coin(CoinField::constant(n0, e2)).ok());
    CHECK(validate_coin(CoinField::identity(n0)).ok());
  }
}

TEST_CASE("Grover and Fourier coins fail on the minor condition") {
  for (const Mat4& m : {coin_grover(), coin_fourier()}) {
    ValidationReport const r = validate_coin(CoinField::constant(1, m));
    CHECK_FALSE(r.ok());
    CHECK(r.maxUnitaryDefect <= 1e-12);  // they fail the minors, not unitarity
    CHECK(r.minOddMinorAbs <= 1e-15);
    REQUIRE_FALSE(r.offenders.empty());
    CHECK_FALSE(r.offenders.front().minorsOk);
    CHECK(r.offenders.front().unitaryOk);
    // Every box cell of a constant coin offends.
    CHECK(r.offenders.size() == 9);
  }
}

TEST_CASE("non-unitary matrix fails on unitarity") {
  Mat4 ones;
  ones.setOnes();
  ValidationReport const r = validate_coin(CoinField::constant(1, ones));
  CHECK_FALSE(r.ok());
  CHECK(r.maxUnitaryDefect > 1.0);
  CHECK_FALSE(r.offenders.front().unitaryOk);
}

TEST_CASE("minor floor is configurable") {
  // Real rotation mixing Left and Right: both pair minors have modulus
  // |sin(alpha)|, tunable at will while staying exactly orthogonal.
  double const alpha = 1e-12;
  Mat4 c = Mat4::Identity();
  c(0, 0) = std::sin(alpha);
  c(0, 1) = std::cos(alpha);
  c(1, 0) = std::cos(alpha);
  c(1, 1) = -std::sin(alpha);
  CoinField const coin = CoinField::constant(1, c);
  CHECK_FALSE(validate_coin(coin).ok());                    // default floor 1e-10
  CHECK(validate_coin(coin, 1e-12, 1e-13).ok());            // relaxed floor
}

TEST_CASE("per-site coins: one bad cell is pinpointed") {
  CoinField coin = CoinField::constant(1, coin_example1());
  coin.cell(Site{1, -1}) = coin_grover();
  ValidationReport const r = validate_coin(coin);
  REQUIRE(r.offenders.size() == 1);
  CHECK(r.offenders.front().x == Site{1, -1});
  CHECK_THROWS_AS(coin.cell(Site{2, 0}), std::out_of_range);
}

TEST_CASE("identity extension outside the box") {
  CoinField const c = CoinField::constant(2, coin_example1());
  CHECK((c.at(Site{3, 0}) - Mat4::Identity()).norm() == 0.0);
  CHECK((c.deviation(Site{0, 3})).norm() == 0.0);
  CHECK((c.at(Site{2, -2}) - coin_example1()).norm() == 0.0);
}
