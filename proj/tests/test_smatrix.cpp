// The finite scattering-matrix block: unitarity, confinement of A to the
// coin box (corridor structure), exact corridor closed forms of the
// scattered wave, physically read channel amplitudes with flux
// conservation, and agreement with the combinatorial eigenfunction route.

#include <catch2/catch_amalgamated.hpp>

#include <qws/combinatorial.hpp>
#include <qws/radiation.hpp>
#include <qws/smatrix.hpp>

#include "support.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace qws;
using qws::testing::random_unit_complex;

namespace {

BoundaryVector random_channel(double theta, int trange, std::mt19937_64& rng) {
  BoundaryVector phi(theta, trange);
  for (Chirality p : all_chiralities)
    for (int t = -trange; t <= trange; ++t) phi.at(p, t) = random_unit_complex(rng);
  return phi;
}

/// Outgoing-corridor site for chirality p with given longitudinal distance
/// (>= n0 + 1) and transverse offset.
Site corridor_site(Chirality p, int longitudinal, int transverse) {
  int const sign = shift_sign(p) > 0 ? -1 : 1;
  int const u = sign * longitudinal;
  return axis_of(p) == 0 ? Site{u, transverse} : Site{transverse, u};
}

double longitudinal_phase_sign(Chirality p) { return shift_sign(p) > 0 ? 1.0 : -1.0; }

}  // namespace

TEST_CASE("free coin scatters nothing") {
  CoinField const c = CoinField::identity(1);
  for (double theta : {0.0, 1.3, 4.9}) {
    SMatrixBlock const block = compute_A(c, theta);
    REQUIRE(block.A.norm() == 0.0);
    REQUIRE((block.sigma - Eigen::MatrixXcd::Identity(block.dimension(), block.dimension()))
                .norm() == 0.0);

    auto const uni = check_unitarity(block);
    REQUIRE(uni.pass);
    REQUIRE(uni.defectRight == 0.0);
    REQUIRE(check_corridor(block).bandMax == 0.0);

    for (Chirality p : all_chiralities) {
      auto const table = channel_amplitudes(block, 1, p);
      REQUIRE(table.fluxSum == 1.0);
      for (Chirality q : all_chiralities)
        for (int t = -block.transverseRange; t <= block.transverseRange; ++t)
          REQUIRE(table.amplitudes.at(q, t) == (q == p && t == 1 ? cplx{1.0, 0.0} : cplx{0.0, 0.0}));
    }

    std::mt19937_64 rng(90);
    BoundaryVector const phi = random_channel(theta, 3, rng);
    FieldEvaluator const v = scattered_wave(c, phi);
    for (Site x : std::vector<Site>{{0, 0}, {5, -3}, {-12, 1}})
      REQUIRE(v(x).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("block unitarity across the spectral circle") {
  struct Case {
    CoinField coin;
    const char* label;
  };
  std::vector<Case> const cases{{CoinField::constant(1, coin_example1()), "example1 n0=1"},
                                {CoinField::constant(1, coin_example2()), "example2 n0=1"},
                                {CoinField::constant(2, coin_example1()), "example1 n0=2"}};
  for (auto const& cs : cases) {
    INFO(cs.label);
    double maxDefect = 0.0;
    double maxBand = 0.0;
    for (int k = 0; k < 32; ++k) {
      double const theta = 2.0 * std::numbers::pi * k / 32.0 + 0.011;
      SMatrixBlock const block = compute_A(cs.coin, theta);
      auto const uni = check_unitarity(block);
      REQUIRE(uni.pass);
      maxDefect = std::max({maxDefect, uni.defectRight, uni.defectLeft});
      auto const cor = check_corridor(block);
      REQUIRE(cor.pass);
      maxBand = std::max(maxBand, cor.bandMax);
    }
    REQUIRE(maxDefect <= 1e-10);
    REQUIRE(maxBand <= 1e-12);
  }
}

TEST_CASE("corridor closed forms equal direct evaluation of the scattered wave") {
  for (Mat4 const& cell : {coin_example1(), coin_example2()}) {
    CoinField const c = CoinField::constant(1, cell);
    double const theta = 2.3;
    BoundarySystem const minusSystem(c, theta, Side::MinusI0);
    SMatrixBlock const block = compute_A(minusSystem, 3);

    std::mt19937_64 rng(91);
    BoundaryVector const phi = random_channel(theta, 3, rng);
    FieldEvaluator const v = scattered_wave(minusSystem, phi);

    // Deterministically scattered probe sites across all four corridors,
    // close to the box, deep out, and overlapping the corner quadrants.
    std::uniform_int_distribution<int> depth(0, 40);
    std::uniform_int_distribution<int> offset(-8, 8);
    std::uniform_int_distribution<int> which(0, 3);
    for (int trial = 0; trial < 50; ++trial) {
      Chirality const p = all_chiralities[static_cast<std::size_t>(which(rng))];
      Site const x = corridor_site(p, c.n0() + 1 + depth(rng), offset(rng));
      cplx const direct = v(x)(index_of(p));
      cplx const closed = corridor_component(block, phi, p, x);
      REQUIRE(std::abs(direct - closed) <= 1e-12);
    }

    // The full synthesis itself reads the S-matrix in the corridor: stripping
    // the free longitudinal phase from component p leaves (Sigma phi)_p.
    FieldEvaluator const u = fpm_star(minusSystem, phi, Side::PlusI0);
    for (Chirality p : all_chiralities)
      for (int t = -3; t <= 3; ++t) {
        Site const x = corridor_site(p, 4, t);
        int const longitudinal = axis_of(p) == 0 ? x.x1 : x.x2;
        cplx const read = std::sqrt(2.0 * std::numbers::pi) *
                          std::polar(1.0, -longitudinal_phase_sign(p) * theta * longitudinal) *
                          u(x)(index_of(p));
        cplx sigmaPhi = 0.0;
        for (Chirality q : all_chiralities)
          for (int y = -3; y <= 3; ++y)
            sigmaPhi += block.sigma(block.index(p, t), block.index(q, y)) * phi.at(q, y);
        REQUIRE(std::abs(read - sigmaPhi) <= 1e-12);
      }

    REQUIRE_THROWS_AS(corridor_component(block, phi, Chirality::Left, Site{0, 0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(corridor_component(block, phi, Chirality::Left, Site{5, 0}),
                      std::invalid_argument);
  }
}

TEST_CASE("scattered wave is purely outgoing") {
  CoinField const c = CoinField::constant(1, coin_example2());
  double const theta = 1.9;
  std::mt19937_64 rng(92);
  BoundaryVector const phi = random_channel(theta, 2, rng);
  FieldEvaluator const v = scattered_wave(c, phi);
  auto const report = radiation_residual(v, theta, RadiationSign::Minus, c.n0() + 2, Window(24));
  REQUIRE(report.supNorm <= 1e-12);
}

TEST_CASE("single-mode flux conservation") {
  for (Mat4 const& cell : {coin_example1(), coin_example2()}) {
    CoinField const c = CoinField::constant(1, cell);
    for (double theta : {0.7, 2.9}) {
      SMatrixBlock const block = compute_A(c, theta);
      for (Chirality p : all_chiralities)
        for (int b = -1; b <= 1; ++b) {
          auto const table = channel_amplitudes(block, b, p);
          REQUIRE(std::abs(table.fluxSum - 1.0) <= 1e-10);
        }
    }
  }
}

TEST_CASE("amplitude table matches the combinatorial corridor read-off") {
  struct Incidence {
    int b;
    Chirality p;
  };
  for (Mat4 const& cell : {coin_example1(), coin_example2()}) {
    CoinField const c = CoinField::constant(1, cell);
    for (double theta : {0.9, 3.7}) {
      SMatrixBlock const block = compute_A(c, theta);
      for (Incidence inc : std::vector<Incidence>{
               {0, Chirality::Left}, {1, Chirality::Up}, {-1, Chirality::Right}, {0, Chirality::Down}}) {
        auto const table = channel_amplitudes(block, inc.b, inc.p);
        auto const eig = combinatorial_eigenfunction(c, theta, inc.b, inc.p);
        for (Chirality q : all_chiralities)
          for (int depth = 2; depth <= 5; ++depth)
            for (int t = -3; t <= 3; ++t) {
              Site const x = corridor_site(q, depth, t);
              int const longitudinal = axis_of(q) == 0 ? x.x1 : x.x2;
              cplx const read = std::polar(1.0, -longitudinal_phase_sign(q) * theta * longitudinal) *
                                eig.psi(x)(index_of(q));
              REQUIRE(std::abs(read - table.amplitudes.at(q, t)) <= 1e-10);
            }
      }
    }
  }
}

TEST_CASE("recorded amplitude table for the first example coin") {
  // Regression record: incidence Left at row 0, theta = 1.3, first example
  // coin with box radius 1.  Values were computed from the assembled block
  // and are pinned against convention drift; the pairwise equalities reflect
  // the coin's real-symmetric structure and are recorded empirically, not
  // asserted a priori.
  CoinField const c = CoinField::constant(1, coin_example1());
  SMatrixBlock const block = compute_A(c, 1.3);
  auto const table = channel_amplitudes(block, 0, Chirality::Left);

  auto const at = [&](Chirality q, int t) { return table.amplitudes.at(q, t); };
  REQUIRE(std::abs(at(Chirality::Left, 0) - cplx{0.10605582852734075, 0.015338551544221368}) <=
          1e-9);
  REQUIRE(std::abs(at(Chirality::Right, 0) - cplx{-0.70723652270616999, 0.22444694780537716}) <=
          1e-9);
  REQUIRE(std::abs(at(Chirality::Down, 0) - cplx{-0.13407743434217367, -0.018521142777325639}) <=
          1e-9);
  REQUIRE(std::abs(at(Chirality::Up, 0) - cplx{0.30820075921219969, -0.0070722480797656972}) <=
          1e-9);
  REQUIRE(std::abs(at(Chirality::Up, -1) - at(Chirality::Left, 1)) <= 1e-12);
  REQUIRE(std::abs(at(Chirality::Down, 1) + at(Chirality::Right, -1)) <= 1e-12);
  for (Chirality q : all_chiralities)
    for (int t : {-3, -2, 2, 3}) REQUIRE(std::abs(at(q, t)) <= 1e-14);
}

TEST_CASE("negative controls and precondition violations") {
  CoinField const c = CoinField::constant(1, coin_example1());

  SECTION("a non-unitary coin breaks unitarity detectably") {
    CoinField const lossy = CoinField::constant(1, Mat4(0.9 * coin_example1()));
    auto const uni = check_unitarity(compute_A(lossy, 1.1));
    REQUIRE_FALSE(uni.pass);
    REQUIRE(uni.defectRight >= 1e-3);
  }

  SECTION("understating the box radius surfaces the hidden band") {
    SMatrixBlock block = compute_A(CoinField::constant(2, coin_example1()), 1.1);
    block.n0 = 1;  // claim the coin stops at radius 1 even though it does not
    auto const cor = check_corridor(block);
    REQUIRE_FALSE(cor.pass);
    REQUIRE(cor.bandMax >= 1e-6);
  }

  SECTION("preconditions") {
    REQUIRE_THROWS_AS(compute_A(c, 1.0, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(compute_A(BoundarySystem(c, 1.0, Side::PlusI0), 3), std::invalid_argument);
    SMatrixBlock const tight = compute_A(c, 1.0, 1);
    REQUIRE_THROWS_AS(check_corridor(tight), std::invalid_argument);
    SMatrixBlock const block = compute_A(c, 1.0);
    REQUIRE_THROWS_AS(channel_amplitudes(block, 7, Chirality::Left), std::invalid_argument);
  }
}
