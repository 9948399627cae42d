#pragma once

// Unique continuation for stationary states: a solution of U psi = e^{i theta} psi
// is determined at x by its values at x + e1 and x + e2.  Splitting the four
// component equations of the eigen-relation by which base point they couple
// to yields the linear system
//
//   M_theta(x) psi(x) = A1 psi(x + e1) + A2 psi(x + e2),
//
//   M rows:  e^{i theta} e1^T,  c2(x),  e^{i theta} e3^T,  c4(x)
//   A1 rows: c1(x + e1),  e^{i theta} e2^T,  0,  0
//   A2 rows: 0,  0,  c3(x + e2),  e^{i theta} e4^T
//
// (ck(y) = k-th row of C(y)).  det M = e^{2 i theta} * det of the even
// chirality minor of C(x), so the coin validation floor guarantees local
// solvability; a singular M signals a violated coin assumption.

#include <qws/coin.hpp>
#include <qws/lattice.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qws {

struct SingularLocalSystem : std::runtime_error {
  explicit SingularLocalSystem(std::string const& what) : std::runtime_error(what) {}
};

inline constexpr double kLocalDetFloor = 1e-10;

/// Reconstructs psi(x) from psi(x + e1) and psi(x + e2) for a stationary
/// state at frequency theta.  Exact (up to a 4x4 solve) for any field
/// satisfying the eigen-equation near x.
inline Vec4 ucp_reconstruct(CoinField const& c, double theta, Site x, Vec4 const& psiE1,
                            Vec4 const& psiE2) {
  cplx const phase = std::polar(1.0, theta);
  Mat4 const cx = c.at(x);

  Mat4 m = Mat4::Zero();
  m(0, 0) = phase;
  m.row(1) = cx.row(1);
  m(2, 2) = phase;
  m.row(3) = cx.row(3);

  if (std::abs(m.determinant()) < kLocalDetFloor)
    throw SingularLocalSystem(
        "local reconstruction system is singular (even-minor determinant below floor)");

  Vec4 rhs;
  Site const xe1{x.x1 + 1, x.x2};
  Site const xe2{x.x1, x.x2 + 1};
  rhs(0) = (c.at(xe1).row(0) * psiE1).value();
  rhs(1) = phase * psiE1(1);
  rhs(2) = (c.at(xe2).row(2) * psiE2).value();
  rhs(3) = phase * psiE2(3);

  return m.partialPivLu().solve(rhs);
}

}  // namespace qws
