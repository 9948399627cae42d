#pragma once

// Coin fields: a site-dependent 4x4 unitary C(x) equal to the identity
// outside the box D = {|x1| <= n0, |x2| <= n0}.  Validation enforces the two
// standing assumptions on every cell:
//
//   (i)  C(x) is unitary;
//   (ii) the 2x2 minor on the odd chirality pair (Left, Down) and the minor
//        on the even pair (Right, Up) both have nonvanishing determinant.
//
// Condition (ii) is what makes a walk eigenfunction locally reconstructible
// from its forward neighbors (see ucp.hpp) and rules out coins, such as the
// 2D Grover and Fourier coins, for which that local system degenerates.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qws/lattice.hpp"

namespace qws {

class CoinField {
 public:
  /// Cells are listed lexicographically over D: x1 = -n0..n0 outer,
  /// x2 = -n0..n0 inner.
  CoinField(int n0, std::vector<Mat4> cells) : n0_(n0), cells_(std::move(cells)) {
    if (n0 <= 0) throw std::invalid_argument("coin box half-width n0 must be positive");
    auto const side = static_cast<std::size_t>(2 * n0 + 1);
    if (cells_.size() != side * side)
      throw std::invalid_argument("coin cell count does not match (2 n0 + 1)^2");
  }

  static CoinField constant(int n0, const Mat4& c) {
    auto const side = static_cast<std::size_t>(2 * n0 + 1);
    return CoinField(n0, std::vector<Mat4>(side * side, c));
  }

  static CoinField identity(int n0) { return constant(n0, Mat4::Identity()); }

  int n0() const { return n0_; }

  /// True on the perturbation box D.
  bool in_box(Site x) const { return box_radius(x) <= n0_; }

  /// C(x), with the identity extension applied outside D.
  Mat4 at(Site x) const { return in_box(x) ? cells_[idx(x)] : Mat4::Identity(); }

  /// C(x) - I, identically zero outside D.  The perturbation V = S(C - I)
  /// inherits its finite rank from this box.
  Mat4 deviation(Site x) const {
    return in_box(x) ? Mat4(cells_[idx(x)] - Mat4::Identity()) : Mat4::Zero();
  }

  Mat4& cell(Site x) {
    if (!in_box(x)) throw std::out_of_range("coin cell outside box D");
    return cells_[idx(x)];
  }

 private:
  std::size_t idx(Site x) const {
    auto const side = static_cast<std::size_t>(2 * n0_ + 1);
    return static_cast<std::size_t>(x.x1 + n0_) * side +
           static_cast<std::size_t>(x.x2 + n0_);
  }

  int n0_;
  std::vector<Mat4> cells_;
};

// ---------------------------------------------------------------------------
// Builtin coins
// ---------------------------------------------------------------------------

/// Real Hadamard-type coin: passes validation (both minors have determinant
/// -1/2).
inline Mat4 coin_example1() {
  Mat4 c;
  c << 1, 1, 1, 1,
       1, -1, 1, -1,
       1, 1, -1, -1,
       1, -1, -1, 1;
  return 0.5 * c;
}

/// Real orthogonal coin with distinct column norm pattern: passes validation
/// (odd minor 1/sqrt(24), even minor -1/(2 sqrt 6)).
inline Mat4 coin_example2() {
  double const a = 1.0 / std::sqrt(2.0);
  double const b = 1.0 / std::sqrt(6.0);
  double const d = 1.0 / std::sqrt(12.0);
  Mat4 c;
  c << a, b, d, 0.5,
       -a, b, d, 0.5,
       0, -2 * b, d, 0.5,
       0, 0, 3 * d, -0.5;
  return c;
}

/// 2D Grover coin: unitary, but both 2x2 chirality-pair minors are singular,
/// so it fails validation.
inline Mat4 coin_grover() {
  Mat4 c;
  c << -1, 1, 1, 1,
       1, -1, 1, 1,
       1, 1, -1, 1,
       1, 1, 1, -1;
  return 0.5 * c;
}

/// 4-point Fourier coin: unitary, odd-pair minor singular, fails validation.
inline Mat4 coin_fourier() {
  cplx const i(0.0, 1.0);
  Mat4 c;
  c << cplx(1), cplx(1), cplx(1), cplx(1),
       cplx(1), i, cplx(-1), -i,
       cplx(1), cplx(-1), cplx(1), cplx(-1),
       cplx(1), -i, cplx(-1), i;
  return 0.5 * c;
}

/// Builtin lookup by name; throws std::invalid_argument on unknown names.
inline Mat4 builtin_coin_matrix(const std::string& name) {
  if (name == "example1") return coin_example1();
  if (name == "example2") return coin_example2();
  if (name == "grover") return coin_grover();
  if (name == "fourier") return coin_fourier();
  if (name == "identity") return Mat4::Identity();
  throw std::invalid_argument("unknown builtin coin '" + name +
                              "' (expected example1, example2, grover, fourier, identity)");
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct CoinCellReport {
  Site x;
  double unitaryDefect = 0.0;   // ||C C* - I||_F
  double oddMinorAbs = 0.0;     // |det of (Left, Down) minor|
  double evenMinorAbs = 0.0;    // |det of (Right, Up) minor|
  bool unitaryOk = true;
  bool minorsOk = true;
};

struct ValidationReport {
  double unitaryTol = 0.0;
  double minorFloor = 0.0;
  double maxUnitaryDefect = 0.0;
  double minOddMinorAbs = 0.0;
  double minEvenMinorAbs = 0.0;
  std::vector<CoinCellReport> offenders;  // cells failing either condition

  bool ok() const { return offenders.empty(); }
};

/// 2x2 minor of c on the chirality pair (p, q), rows and columns alike.
inline cplx chirality_minor_det(const Mat4& c, Chirality p, Chirality q) {
  int const i = index_of(p), j = index_of(q);
  return c(i, i) * c(j, j) - c(i, j) * c(j, i);
}

/// Check every cell of the coin field against the two standing assumptions.
/// The minor floor is configurable because "nonvanishing" only becomes a
/// decidable predicate in floating point with a quantitative cutoff; cells
/// near the floor would make the local reconstruction system ill-conditioned.
inline ValidationReport validate_coin(const CoinField& c, double unitaryTol = 1e-12,
                                      double minorFloor = 1e-10) {
  ValidationReport report;
  report.unitaryTol = unitaryTol;
  report.minorFloor = minorFloor;
  report.minOddMinorAbs = std::numeric_limits<double>::infinity();
  report.minEvenMinorAbs = std::numeric_limits<double>::infinity();

  int const n0 = c.n0();
  for (int x1 = -n0; x1 <= n0; ++x1) {
    for (int x2 = -n0; x2 <= n0; ++x2) {
      Site const x{x1, x2};
      Mat4 const m = c.at(x);

      CoinCellReport cell;
      cell.x = x;
      cell.unitaryDefect = (m * m.adjoint() - Mat4::Identity()).norm();
      cell.oddMinorAbs = std::abs(chirality_minor_det(m, Chirality::Left, Chirality::Down));
      cell.evenMinorAbs = std::abs(chirality_minor_det(m, Chirality::Right, Chirality::Up));
      cell.unitaryOk = cell.unitaryDefect <= unitaryTol;
      cell.minorsOk = cell.oddMinorAbs >= minorFloor && cell.evenMinorAbs >= minorFloor;

      report.maxUnitaryDefect = std::max(report.maxUnitaryDefect, cell.unitaryDefect);
      report.minOddMinorAbs = std::min(report.minOddMinorAbs, cell.oddMinorAbs);
      report.minEvenMinorAbs = std::min(report.minEvenMinorAbs, cell.evenMinorAbs);
      if (!cell.unitaryOk || !cell.minorsOk) report.offenders.push_back(cell);
    }
  }
  return report;
}

}  // namespace qws
