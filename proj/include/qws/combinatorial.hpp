#pragma once

// Long-time combinatorial construction of generalized eigenfunctions.  An
// incident half-line plane wave feeds the coin box through a single entry
// site; the interior limit phi_inf solves (e^{i theta} - U_D) phi = chi U Psi0,
// the boundary ring B = {x in D : |x1| = n0 or |x2| = n0} radiates the
// outgoing flow, and
//   Psi_inf = chi* phi_inf + Psi_out + Psi0
// is a generalized eigenfunction of U on all of Z^2, with
//   Psi_out(x) = e^{-i mu_x theta} (U f_inf)(x~)
// on the four corridors (mu_x = distance past the box, x~ = the corridor
// entry site one step outside D) and zero on the corner quadrants.

#include <qws/coin.hpp>
#include <qws/lattice.hpp>
#include <qws/linsolve.hpp>
#include <qws/ud.hpp>
#include <qws/walk.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

namespace qws {

/// The unique box site fed by the incident half-line of chirality p at
/// transverse offset b.
inline Site incident_entry_site(int n0, Chirality p, int b) {
  switch (p) {
    case Chirality::Left: return Site{n0, b};
    case Chirality::Right: return Site{-n0, b};
    case Chirality::Down: return Site{b, n0};
    case Chirality::Up: return Site{b, -n0};
  }
  throw std::invalid_argument("incident_entry_site: bad chirality");
}

/// Incident half-line plane wave Psi0: chirality p travelling toward the box
/// along row/column b, supported where it has not yet reached the box.
inline FieldEvaluator incident_wave(int n0, double theta, Chirality p, int b) {
  return FieldEvaluator{
      [n0, theta, p, b](Site x) -> Vec4 {
        Vec4 v = Vec4::Zero();
        switch (p) {
          case Chirality::Left:
            if (x.x2 == b && x.x1 >= n0 + 1) v(0) = std::polar(1.0, theta * x.x1);
            break;
          case Chirality::Right:
            if (x.x2 == b && x.x1 <= -n0 - 1) v(1) = std::polar(1.0, -theta * x.x1);
            break;
          case Chirality::Down:
            if (x.x1 == b && x.x2 >= n0 + 1) v(2) = std::polar(1.0, theta * x.x2);
            break;
          case Chirality::Up:
            if (x.x1 == b && x.x2 <= -n0 - 1) v(3) = std::polar(1.0, -theta * x.x2);
            break;
        }
        return v;
      },
      "exact on all of Z^2"};
}

/// chi U Psi0 on the box basis: a single entry of modulus 1 at the entry
/// site, with phase e^{i theta (n0 + 1)} inherited from the incident wave.
inline Eigen::VectorXcd incident_boundary_source(int n0, double theta, Chirality p, int b) {
  int const side = 2 * n0 + 1;
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(4 * side * side);
  s(ud_index(n0, incident_entry_site(n0, p, b), p)) = std::polar(1.0, theta * (n0 + 1));
  return s;
}

struct CombinatorialEigenfunction {
  double theta = 0.0;
  Chirality incidence = Chirality::Left;
  int b = 0;
  GridField phiInf;  // interior limit on the box window
  GridField fInf;    // ring restriction delta_B chi* phi_inf
  FieldEvaluator psi;  // Psi_inf, exact on all of Z^2
};

inline CombinatorialEigenfunction combinatorial_eigenfunction(CoinField const& c, double theta,
                                                              int b, Chirality incidence) {
  int const n0 = c.n0();
  if (b < -n0 || b > n0)
    throw std::invalid_argument("combinatorial_eigenfunction: offset outside the box");

  UDMatrix const ud = build_UD(c);
  Eigen::MatrixXcd system = -ud.m;
  system.diagonal().array() += std::polar(1.0, theta);
  Eigen::VectorXcd const source = incident_boundary_source(n0, theta, incidence, b);
  Eigen::VectorXcd const phi = solve_complex_dense(system, source).solution;

  GridField phiInf{Window(n0)};
  for (int x1 = -n0; x1 <= n0; ++x1)
    for (int x2 = -n0; x2 <= n0; ++x2)
      for (Chirality p : all_chiralities)
        phiInf.at(Site{x1, x2}, p) = phi(ud_index(n0, Site{x1, x2}, p));

  GridField fInf{Window(n0)};
  phiInf.for_each_site([&](Site x) {
    if (iabs(x.x1) == n0 || iabs(x.x2) == n0) fInf.set(x, phiInf.value(x));
  });

  // (U f_inf) at the four corridor entry lines, one step outside the box.
  int const side = 2 * n0 + 1;
  auto entries = std::make_shared<std::array<std::vector<Vec4>, 4>>();
  auto walkAt = [&](Site x) -> Vec4 {
    Vec4 v;
    for (Chirality p : all_chiralities) {
      Site const z = shift_source(x, p);
      v(index_of(p)) = (c.at(z) * fInf.value(z))(index_of(p));
    }
    return v;
  };
  for (auto& e : *entries) e.resize(static_cast<std::size_t>(side));
  for (int s = -n0; s <= n0; ++s) {
    std::size_t const i = static_cast<std::size_t>(s + n0);
    (*entries)[0][i] = walkAt(Site{-(n0 + 1), s});  // left corridor
    (*entries)[1][i] = walkAt(Site{n0 + 1, s});     // right corridor
    (*entries)[2][i] = walkAt(Site{s, -(n0 + 1)});  // bottom corridor
    (*entries)[3][i] = walkAt(Site{s, n0 + 1});     // top corridor
  }

  auto const interior = std::make_shared<GridField>(phiInf);
  FieldEvaluator const psi0 = incident_wave(n0, theta, incidence, b);
  FieldEvaluator psi{
      [n0, theta, entries, interior, psi0](Site x) -> Vec4 {
        if (box_radius(x) <= n0) return interior->value(x);
        Vec4 out = Vec4::Zero();
        if (iabs(x.x2) <= n0) {
          std::size_t const i = static_cast<std::size_t>(x.x2 + n0);
          int const mu = iabs(x.x1) - n0;
          out = std::polar(1.0, -mu * theta) * (*entries)[x.x1 > 0 ? 1 : 0][i];
        } else if (iabs(x.x1) <= n0) {
          std::size_t const i = static_cast<std::size_t>(x.x1 + n0);
          int const mu = iabs(x.x2) - n0;
          out = std::polar(1.0, -mu * theta) * (*entries)[x.x2 > 0 ? 3 : 2][i];
        }
        return out + psi0(x);
      },
      "exact on all of Z^2"};

  return CombinatorialEigenfunction{theta, incidence, b, std::move(phiInf), std::move(fInf),
                                    std::move(psi)};
}

struct RecursionDiagnostic {
  std::vector<double> errorNorms;  // ||e^{-i t theta} phi_t - phi_inf||, t = 0..tMax
  double observedRatio = 0.0;      // geometric mean ratio over the run
};

/// Iterates phi_{t+1} = U_D phi_t + e^{i t theta} source from phi_0 = 0 and
/// tracks the distance of the rotated iterates from the stationary solution.
/// The error contracts like (e^{-i theta} U_D)^t, so the observed ratio must
/// not exceed the Gelfand spectral radius bound.
inline RecursionDiagnostic recursion_convergence(UDMatrix const& ud, double theta,
                                                 Eigen::VectorXcd const& source, int tMax) {
  Eigen::MatrixXcd system = -ud.m;
  system.diagonal().array() += std::polar(1.0, theta);
  Eigen::VectorXcd const phiInf = solve_complex_dense(system, source).solution;

  RecursionDiagnostic diag;
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(source.size());
  diag.errorNorms.push_back(phiInf.norm());
  for (int t = 0; t < tMax; ++t) {
    phi = (ud.m * phi + std::polar(1.0, t * theta) * source).eval();
    diag.errorNorms.push_back(
        (std::polar(1.0, -(t + 1) * theta) * phi - phiInf).norm());
  }
  double const first = diag.errorNorms.front();
  double const last = diag.errorNorms.back();
  diag.observedRatio = (first > 0.0 && last > 0.0) ? std::pow(last / first, 1.0 / tMax) : 0.0;
  return diag;
}

}  // namespace qws
