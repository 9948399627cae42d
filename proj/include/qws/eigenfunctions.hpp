#pragma once

// Distorted trace operators for the perturbed walk.  The family sign is the
// spectral side: Side::PlusI0 selects F(+), Side::MinusI0 selects F(-).
//
//   fpm:      F(+/-)(theta) f  = F0(theta) (f - V R(theta +/- i0) f)
//   fpm_star: F(+/-)(theta)* phi = F0(theta)* phi
//                                  + e^{i theta} U R(theta -/+ i0) V* F0(theta)* phi
//
// Note the sign flip: the adjoint of the (+) family uses the (-i0) resolvent.
// Both outputs are exact: fpm is a finite computation because V R f is
// supported on the boundary basis, and fpm_star composes exact evaluators.

#include <qws/boundary_system.hpp>
#include <qws/channels.hpp>
#include <qws/coin.hpp>
#include <qws/green.hpp>
#include <qws/lattice.hpp>
#include <qws/walk.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qws {

/// F(+/-)(theta) f, reusing an assembled boundary system at the same side.
inline BoundaryVector fpm(BoundarySystem const& system, GridField const& f) {
  int const n0 = system.coin().n0();
  GridField const g = materialize(system.boundary_source(f), Window(n0 + 1));
  return f0(f, system.theta()) - f0(g, system.theta());
}

inline BoundaryVector fpm(CoinField const& c, GridField const& f, double theta, Side side) {
  return fpm(BoundarySystem(c, theta, side), f);
}

/// F(+/-)(theta)* phi, reusing an assembled boundary system, which must sit
/// at the opposite spectral side (the resolvent in the adjoint representation
/// is R(theta -/+ i0) for the (+/-) family).
inline FieldEvaluator fpm_star(BoundarySystem const& resolventSystem, BoundaryVector const& phi,
                               Side side) {
  if (resolventSystem.side() != opposite(side))
    throw std::invalid_argument("fpm_star: resolvent system must be assembled at the opposite side");
  CoinField const& c = resolventSystem.coin();
  double const theta = phi.theta();

  FieldEvaluator const u0 = f0_star(phi);
  GridField const w = apply_V_adjoint(c, u0.materialize(Window(c.n0() + 1))).field;
  FieldEvaluator const rw = apply_R(resolventSystem, w);
  FieldEvaluator const urw = apply_walk(c, rw);
  cplx const scale = std::polar(1.0, theta);
  return FieldEvaluator{
      [u0, urw, scale](Site x) -> Vec4 { return u0(x) + scale * urw(x); },
      "exact on all of Z^2"};
}

inline FieldEvaluator fpm_star(CoinField const& c, BoundaryVector const& phi, Side side) {
  return fpm_star(BoundarySystem(c, phi.theta(), opposite(side)), phi, side);
}

/// Sup of |(U u - e^{i theta} u)(x)| over the window.  The evaluator variant
/// probes every site; the grid variant probes interior sites only (the walk
/// at the rim would read truncated zeros).
inline double eigen_residual(CoinField const& c, FieldEvaluator const& u, double theta, Window w) {
  FieldEvaluator const walked = apply_walk(c, u);
  cplx const phase = std::polar(1.0, theta);
  double sup = 0.0;
  for (int x1 = -w.L; x1 <= w.L; ++x1)
    for (int x2 = -w.L; x2 <= w.L; ++x2) {
      Site const x{x1, x2};
      sup = std::max(sup, (walked(x) - phase * u(x)).cwiseAbs().maxCoeff());
    }
  return sup;
}

inline double eigen_residual(CoinField const& c, GridField const& u, double theta, Window w) {
  GridField const walked = apply_walk(c, u);
  cplx const phase = std::polar(1.0, theta);
  int const rim = std::min(w.L, u.window().L - 1);
  double sup = 0.0;
  for (int x1 = -rim; x1 <= rim; ++x1)
    for (int x2 = -rim; x2 <= rim; ++x2) {
      Site const x{x1, x2};
      sup = std::max(sup, (walked.value(x) - phase * u.value(x)).cwiseAbs().maxCoeff());
    }
  return sup;
}

}  // namespace qws
