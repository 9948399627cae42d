#pragma once

// The finite scattering-matrix block on a spectral fiber.  A(theta) is the
// channel-to-channel operator (minus-family trace) o V* o (free synthesis);
// its matrix elements vanish whenever either transverse index leaves the
// coin box, so the infinite fiber operator Sigma(theta) = I - 2 pi e^{i
// theta} A(theta) is the identity plus a finite block and unitarity of the
// whole reduces exactly to unitarity of the block.  The block also drives
// the corridor closed forms of the outgoing scattered wave and the
// per-channel amplitude tables read off physically at infinity.

#include <qws/boundary_system.hpp>
#include <qws/channels.hpp>
#include <qws/eigenfunctions.hpp>
#include <qws/walk.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qws {

/// Finite matrix of A(theta) and Sigma(theta) = I - 2 pi e^{i theta} A on
/// the transverse range [-m, m] per chirality.  Row/column index is
/// index_of(chirality) * (2m + 1) + (t + m).
struct SMatrixBlock {
  double theta = 0.0;
  int n0 = 0;              ///< box radius of the coin the block was built from
  int transverseRange = 0; ///< m: transverse indices run over [-m, m]
  Eigen::MatrixXcd A;
  Eigen::MatrixXcd sigma;

  int dimension() const { return 4 * (2 * transverseRange + 1); }

  int index(Chirality p, int t) const {
    return index_of(p) * (2 * transverseRange + 1) + (t + transverseRange);
  }
};

/// Assemble A(theta) column by column: the column labeled by the incident
/// channel (p', y) is the minus-family trace of V* applied to the single-mode
/// plane wave delta_y e_{p'}, sampled on the transverse range.  The boundary
/// system must sit at the minus side and is factored once for all columns.
inline SMatrixBlock compute_A(BoundarySystem const& minusSystem, int m) {
  if (minusSystem.side() != Side::MinusI0)
    throw std::invalid_argument("compute_A: boundary system must sit at the minus side");
  CoinField const& c = minusSystem.coin();
  if (m < c.n0())
    throw std::invalid_argument("compute_A: transverse range must cover the coin box");

  double const theta = minusSystem.theta();
  SMatrixBlock block;
  block.theta = theta;
  block.n0 = c.n0();
  block.transverseRange = m;
  int const dim = block.dimension();
  block.A = Eigen::MatrixXcd::Zero(dim, dim);

  Window const collar(c.n0() + 1);
  for (Chirality incident : all_chiralities) {
    for (int y = -m; y <= m; ++y) {
      FieldEvaluator const mode = f0_star(delta_channel(theta, m, incident, y));
      GridField const w = apply_V_adjoint(c, mode.materialize(collar)).field;
      BoundaryVector const column = fpm(minusSystem, w);
      int const j = block.index(incident, y);
      for (Chirality out : all_chiralities)
        for (int t = -m; t <= m; ++t)
          block.A(block.index(out, t), j) = column.value_or_zero(out, t);
    }
  }

  block.sigma = Eigen::MatrixXcd::Identity(dim, dim) -
                2.0 * std::numbers::pi * std::polar(1.0, theta) * block.A;
  return block;
}

inline SMatrixBlock compute_A(CoinField const& c, double theta, int m) {
  return compute_A(BoundarySystem(c, theta, Side::MinusI0), m);
}

/// Default transverse range n0 + 2: one band beyond the box to witness the
/// vanishing of out-of-box matrix elements, one more as margin.
inline SMatrixBlock compute_A(CoinField const& c, double theta) {
  return compute_A(c, theta, c.n0() + 2);
}

// ---------------------------------------------------------------------------
// Block diagnostics

inline constexpr double kUnitarityTolerance = 1e-10;
inline constexpr double kCorridorTolerance = 1e-12;

struct UnitarityReport {
  double defectRight = 0.0;  ///< Frobenius norm of Sigma Sigma* - I
  double defectLeft = 0.0;   ///< Frobenius norm of Sigma* Sigma - I
  bool pass = false;
};

inline UnitarityReport check_unitarity(SMatrixBlock const& block) {
  int const dim = block.dimension();
  Eigen::MatrixXcd const id = Eigen::MatrixXcd::Identity(dim, dim);
  UnitarityReport report;
  report.defectRight = (block.sigma * block.sigma.adjoint() - id).norm();
  report.defectLeft = (block.sigma.adjoint() * block.sigma - id).norm();
  report.pass = report.defectRight <= kUnitarityTolerance &&
                report.defectLeft <= kUnitarityTolerance;
  return report;
}

struct CorridorReport {
  double bandMax = 0.0;  ///< largest |A| entry with either transverse index outside the box
  bool pass = false;
};

/// A(theta) must have no matrix elements connecting to transverse indices
/// beyond the coin box: every entry whose row or column transverse index
/// exceeds n0 in modulus has to vanish.  This is what licenses reading the
/// finite block as the whole fiber operator.
inline CorridorReport check_corridor(SMatrixBlock const& block) {
  if (block.transverseRange < block.n0 + 1)
    throw std::invalid_argument("check_corridor: need at least one band beyond the coin box");
  int const m = block.transverseRange;
  CorridorReport report;
  for (Chirality out : all_chiralities)
    for (int t = -m; t <= m; ++t)
      for (Chirality in : all_chiralities)
        for (int y = -m; y <= m; ++y) {
          if (std::abs(t) <= block.n0 && std::abs(y) <= block.n0) continue;
          report.bandMax = std::max(
              report.bandMax, std::abs(block.A(block.index(out, t), block.index(in, y))));
        }
  report.pass = report.bandMax <= kCorridorTolerance;
  return report;
}

// ---------------------------------------------------------------------------
// Scattered wave and its corridor closed forms

/// v = (plus-family synthesis of phi) - (free synthesis of phi): the outgoing
/// scattered part of the generalized eigenfunction with incident data phi.
/// The boundary system must sit at the minus side (it feeds the plus-family
/// synthesis).
inline FieldEvaluator scattered_wave(BoundarySystem const& minusSystem,
                                     BoundaryVector const& phi) {
  FieldEvaluator const full = fpm_star(minusSystem, phi, Side::PlusI0);
  FieldEvaluator const free = f0_star(phi);
  return FieldEvaluator{[full, free](Site x) -> Vec4 { return full(x) - free(x); },
                        "exact on all of Z^2"};
}

inline FieldEvaluator scattered_wave(CoinField const& c, BoundaryVector const& phi) {
  return scattered_wave(BoundarySystem(c, phi.theta(), Side::MinusI0), phi);
}

/// Closed-form corridor value of the outgoing component p at site x,
///   v_p(x) = -sqrt(2 pi) e^{i theta} (longitudinal phase) (A_p phi)(t),
/// with t the transverse coordinate of x.  Valid only in the outgoing
/// half-plane of p (longitudinal coordinate at least n0 + 1 on p's side);
/// elsewhere the closed form does not apply and this throws.
inline cplx corridor_component(SMatrixBlock const& block, BoundaryVector const& phi,
                               Chirality p, Site x) {
  double const theta = block.theta;
  int const longitudinal = axis_of(p) == 0 ? x.x1 : x.x2;
  int const transverse = axis_of(p) == 0 ? x.x2 : x.x1;
  // Outgoing direction: the shift moves p toward -infinity when shift_sign
  // is +1 (the component is read from x + e, so mass flows downward), and
  // toward +infinity when it is -1.
  bool const outgoingSide =
      shift_sign(p) > 0 ? longitudinal <= -(block.n0 + 1) : longitudinal >= block.n0 + 1;
  if (!outgoingSide)
    throw std::invalid_argument("corridor_component: site is not in the outgoing corridor of p");

  cplx row = 0.0;
  if (std::abs(transverse) <= block.transverseRange) {
    int const i = block.index(p, transverse);
    for (Chirality in : all_chiralities)
      for (int y = -block.transverseRange; y <= block.transverseRange; ++y)
        row += block.A(i, block.index(in, y)) * phi.value_or_zero(in, y);
  }
  // else: rows with |t| > m >= n0 vanish identically, so row stays 0.

  double const phaseSign = shift_sign(p) > 0 ? 1.0 : -1.0;
  cplx const longitudinalPhase = std::polar(1.0, phaseSign * theta * longitudinal);
  return -std::sqrt(2.0 * std::numbers::pi) * std::polar(1.0, theta) * longitudinalPhase * row;
}

// ---------------------------------------------------------------------------
// Physically read amplitudes

/// Outgoing amplitudes for a single-mode incidence delta_b e_p: entry (q, t)
/// is the coefficient of the outgoing plane wave in corridor q at transverse
/// offset t, normalized so that the free walk transmits with amplitude
/// exactly 1 (the -sqrt(2 pi) e^{i theta} corridor prefactor is absorbed
/// into the Sigma convention).
struct ChannelAmplitudes {
  Chirality incidence = Chirality::Left;
  int b = 0;
  BoundaryVector amplitudes;
  double fluxSum = 0.0;  ///< sum over channels of |amplitude|^2, = 1 by unitarity
};

inline ChannelAmplitudes channel_amplitudes(SMatrixBlock const& block, int b, Chirality p) {
  if (std::abs(b) > block.transverseRange)
    throw std::invalid_argument("channel_amplitudes: incidence row outside the transverse range");
  ChannelAmplitudes table{p, b, BoundaryVector(block.theta, block.transverseRange), 0.0};
  int const j = block.index(p, b);
  for (Chirality out : all_chiralities)
    for (int t = -block.transverseRange; t <= block.transverseRange; ++t)
      table.amplitudes.at(out, t) = block.sigma(block.index(out, t), j);
  double const n = h_norm(table.amplitudes);
  table.fluxSum = n * n;
  return table;
}

inline ChannelAmplitudes channel_amplitudes(CoinField const& c, double theta, int b,
                                            Chirality p) {
  return channel_amplitudes(compute_A(c, theta), b, p);
}

}  // namespace qws
