#pragma once

// Radiation-condition diagnostics.
//
// With F the indicator of {s >= 0}, the truncation operators
//
//   (B_+ f)(x) = [F(+x1) f_L, F(-x1) f_R, F(+x2) f_D, F(-x2) f_U]^T
//   (B_- f)(x) = [F(-x1) f_L, F(+x1) f_R, F(-x2) f_D, F(+x2) f_U]^T
//
// keep, for each chirality, exactly the half-plane where a wave of that
// chirality is moving toward (B_+) or away from (B_-) the origin.  A theta
// eigenfield u is incoming/outgoing according to whether the residual
//
//   r = B_{+-} S u - e^{i theta} u
//
// is negligible at infinity (decaying shell averages).  For the outgoing
// scattered waves produced by this library the residual vanishes identically
// outside the perturbation box and its one-site collar, so the diagnostic is
// a sup-norm check rather than a limit.

#include <utility>
#include <vector>

#include "qws/lattice.hpp"
#include "qws/norms.hpp"

namespace qws {

enum class RadiationSign { Plus, Minus };  // Minus selects the outgoing test

/// Half-plane factor of B_{+-} for chirality p at site x.
inline double radiation_factor(Site x, Chirality p, RadiationSign sign) {
  int const s = sign == RadiationSign::Plus ? +1 : -1;
  switch (p) {
    case Chirality::Left:  return heaviside(s * x.x1);
    case Chirality::Right: return heaviside(-s * x.x1);
    case Chirality::Down:  return heaviside(s * x.x2);
    case Chirality::Up:    return heaviside(-s * x.x2);
  }
  return 0.0;  // unreachable
}

struct RadiationReport {
  GridField residual;          // zero at sites inside the probe radius
  double supNorm = 0.0;        // sup |r(x)| over probed sites
  std::vector<double> shellAverages;  // (1/rho) anisotropic mass below rho, rho = 1..L
  int probeRadius = 0;
};

/// Evaluate r = B_{+-} S u - e^{i theta} u on all window sites with
/// box_radius(x) >= probeRadius.  The shell averages are the B*-style partial
/// means of |r|^2, whose decay in rho is the finite-window stand-in for
/// membership of the residual in the closure of compactly supported fields.
namespace detail {

inline RadiationReport radiation_residual_impl(const FieldEvaluator& u, double theta,
                                               RadiationSign sign, int probeRadius,
                                               Window probeWindow, int maxRadius) {
  cplx const phase = std::polar(1.0, theta);
  GridField res(probeWindow);
  double sup = 0.0;
  res.for_each_site([&](Site x) {
    if (box_radius(x) < probeRadius || box_radius(x) > maxRadius) return;
    Vec4 const here = u(x);
    Vec4 r;
    for (Chirality p : all_chiralities) {
      // (S u)_p(x) = u_p at the shift source of x.
      cplx const su = u(shift_source(x, p))(index_of(p));
      r(index_of(p)) = radiation_factor(x, p, sign) * su - phase * here(index_of(p));
    }
    res.set(x, r);
    sup = std::max(sup, r.cwiseAbs().maxCoeff());
  });

  RadiationReport report{std::move(res), sup, {}, probeRadius};
  // Shell averages on the probed part. bstar-style anisotropic binning.
  int const L = probeWindow.L;
  std::vector<double> mass1(static_cast<std::size_t>(L + 1), 0.0);
  std::vector<double> mass2(static_cast<std::size_t>(L + 1), 0.0);
  report.residual.for_each_site([&](Site x) {
    mass1[static_cast<std::size_t>(iabs(x.x1))] +=
        std::norm(report.residual.at(x, Chirality::Left)) +
        std::norm(report.residual.at(x, Chirality::Right));
    mass2[static_cast<std::size_t>(iabs(x.x2))] +=
        std::norm(report.residual.at(x, Chirality::Down)) +
        std::norm(report.residual.at(x, Chirality::Up));
  });
  double below = 0.0;
  for (int rho = 1; rho <= L; ++rho) {
    below += mass1[static_cast<std::size_t>(rho - 1)] + mass2[static_cast<std::size_t>(rho - 1)];
    report.shellAverages.push_back(below / rho);
  }
  return report;
}

}  // namespace detail

inline RadiationReport radiation_residual(const FieldEvaluator& u, double theta,
                                          RadiationSign sign, int probeRadius,
                                          Window probeWindow) {
  return detail::radiation_residual_impl(u, theta, sign, probeRadius, probeWindow,
                                         probeWindow.L);
}

/// Window-field variant.  Probing stops one site short of the window edge,
/// where (S u) would have to read truncated-away data.
inline RadiationReport radiation_residual(const GridField& u, double theta,
                                          RadiationSign sign, int probeRadius) {
  if (probeRadius > u.window().L - 1)
    throw std::invalid_argument(
        "probe radius must leave a one-site margin inside the window");
  return detail::radiation_residual_impl(as_evaluator(u), theta, sign, probeRadius,
                                         u.window(), u.window().L - 1);
}

}  // namespace qws
