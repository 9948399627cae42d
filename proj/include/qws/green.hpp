#pragma once

// Free boundary resolvents.
//
// The free walk U0 = S decouples the four chiralities into one-dimensional
// one-way shifts, so the resolvent boundary values R0(theta +- i0) =
// lim (U0 - e^{i kappa})^{-1} have an explicit convolution kernel G0, diagonal
// in chirality and supported on a single row (Left/Right) or column (Down/Up):
//
//   +i0:  r_L(x) =  [x2=0] F(x1-1)  e^{i theta (x1-1)}
//         r_R(x) =  [x2=0] F(-x1-1) e^{-i theta (x1+1)}
//         r_D(x) =  [x1=0] F(x2-1)  e^{i theta (x2-1)}
//         r_U(x) =  [x1=0] F(-x2-1) e^{-i theta (x2+1)}
//   -i0:  r_L(x) = -[x2=0] F(-x1)   e^{i theta (x1-1)}
//         r_R(x) = -[x2=0] F(x1)    e^{-i theta (x1+1)}
//         r_D(x) = -[x1=0] F(-x2)   e^{i theta (x2-1)}
//         r_U(x) = -[x1=0] F(x2)    e^{-i theta (x2+1)}
//
// with F the indicator of {s >= 0}.  Both tables satisfy the fundamental
// identity (U0 - e^{i theta}) G0 = delta_0 exactly; they differ in which
// half-line carries the wave, i.e. from which side of the unit circle the
// limit was taken.  (The Down/Up kernels carry the [x1=0] factor: the
// column-supported mirror of the Left/Right rows.)
//
// Applying R0 to a finitely supported source f amounts to one-sided
// transverse sums; these are evaluated exactly at any site of Z^2, which is
// what makes corridor identities testable without truncation artifacts.

#include <memory>
#include <utility>
#include <vector>

#include "qws/lattice.hpp"

namespace qws {

/// One diagonal entry of G0(x; theta +- i0).
inline cplx green0_entry(Site x, Chirality p, double theta, Side side) {
  bool const plus = side == Side::PlusI0;
  int const u = axis_of(p) == 0 ? x.x1 : x.x2;   // propagation coordinate
  int const t = axis_of(p) == 0 ? x.x2 : x.x1;   // transverse coordinate
  if (t != 0) return {0.0, 0.0};
  bool const positiveChirality = shift_sign(p) > 0;  // Left or Down
  // Phase exponent: +theta(u-1) for Left/Down, -theta(u+1) for Right/Up.
  double const arg = positiveChirality ? theta * (u - 1) : -theta * (u + 1);
  double indicator;
  if (plus)
    indicator = positiveChirality ? heaviside(u - 1) : heaviside(-u - 1);
  else
    indicator = -(positiveChirality ? heaviside(-u) : heaviside(u));
  return indicator == 0.0 ? cplx(0.0, 0.0) : indicator * std::polar(1.0, arg);
}

/// All four diagonal entries of G0(x; theta +- i0).
inline Vec4 green0(Site x, double theta, Side side) {
  Vec4 g;
  for (Chirality p : all_chiralities) g(index_of(p)) = green0_entry(x, p, theta, side);
  return g;
}

// ---------------------------------------------------------------------------
// Sparse sources
// ---------------------------------------------------------------------------

/// A finitely supported field as an explicit list of nonzero amplitudes;
/// the natural shape for boundary-system solutions and point sources.
struct SparseEntry {
  Site x;
  Chirality p = Chirality::Left;
  cplx v;
};
using SparseField = std::vector<SparseEntry>;

inline SparseField to_sparse(const GridField& f, double dropTol = 0.0) {
  SparseField out;
  f.for_each_site([&](Site x) {
    for (Chirality p : all_chiralities) {
      cplx const v = f.at(x, p);
      if (std::abs(v) > dropTol) out.push_back({x, p, v});
    }
  });
  return out;
}

inline GridField materialize(const SparseField& f, Window w) {
  GridField out(w);
  for (const SparseEntry& e : f)
    if (w.contains(e.x)) out.at(e.x, e.p) += e.v;
  return out;
}

// ---------------------------------------------------------------------------
// R0 applied to finitely supported sources
// ---------------------------------------------------------------------------

/// Exact evaluator for R0(theta +- i0) f with window-supported f.  Component
/// p at x is a one-sided sum along the propagation axis of p over the part of
/// f's support on the near side:
///
///   +i0, Left at x:  e^{i theta (x1-1)} sum_{y1 <= x1-1} e^{-i theta y1} f_L(y1, x2)
///   -i0, Left at x: -e^{i theta (x1-1)} sum_{y1 >= x1}   e^{-i theta y1} f_L(y1, x2)
///
/// and the chirality-symmetric siblings.  Cost per evaluation is O(window
/// side length); values are exact at every site of Z^2.
inline FieldEvaluator apply_R0(const GridField& f, double theta, Side side) {
  auto src = std::make_shared<GridField>(f);
  bool const plus = side == Side::PlusI0;
  int const L = f.window().L;
  auto fn = [src, theta, plus, L](Site x) -> Vec4 {
    Vec4 out = Vec4::Zero();
    for (Chirality p : all_chiralities) {
      int const u = axis_of(p) == 0 ? x.x1 : x.x2;
      int const t = axis_of(p) == 0 ? x.x2 : x.x1;
      if (t < -L || t > L) continue;  // off the source's rows/columns
      bool const positive = shift_sign(p) > 0;  // Left or Down
      // Summation range along the propagation axis, intersected with the
      // window: +i0 keeps the strictly-behind side for positive chiralities
      // (y <= u-1) and strictly-ahead for negative ones; -i0 keeps the
      // complements (y >= u resp. y <= u).
      int lo, hi;
      if (plus == positive) {
        lo = -L;
        hi = std::min(L, positive ? u - 1 : u);
      } else {
        lo = std::max(-L, positive ? u : u + 1);
        hi = L;
      }
      if (lo > hi) continue;
      // Transverse-frozen one-sided sum of e^{-sigma i theta y} f_p, where
      // sigma = +1 for Left/Down and -1 for Right/Up.
      cplx sum(0.0, 0.0);
      for (int y = lo; y <= hi; ++y) {
        Site const ySite = axis_of(p) == 0 ? Site{y, t} : Site{t, y};
        cplx const fv = src->at(ySite, p);
        if (fv != cplx(0.0)) sum += std::polar(1.0, (positive ? -theta : theta) * y) * fv;
      }
      double const arg = positive ? theta * (u - 1) : -theta * (u + 1);
      cplx const prefactor = std::polar(1.0, arg);
      out(index_of(p)) = (plus ? prefactor : -prefactor) * sum;
    }
    return out;
  };
  return FieldEvaluator{std::move(fn), "all of Z^2 (exact one-sided sums)"};
}

/// Exact evaluator for R0(theta +- i0) g with a sparse source: the kernel
/// superposition sum_k G0(x - x_k) g_k, costing O(#entries) per evaluation.
inline FieldEvaluator apply_R0(const SparseField& g, double theta, Side side) {
  auto src = std::make_shared<SparseField>(g);
  auto fn = [src, theta, side](Site x) -> Vec4 {
    Vec4 out = Vec4::Zero();
    for (const SparseEntry& e : *src)
      out(index_of(e.p)) +=
          green0_entry(Site{x.x1 - e.x.x1, x.x2 - e.x.x2}, e.p, theta, side) * e.v;
    return out;
  };
  return FieldEvaluator{std::move(fn), "all of Z^2 (kernel superposition)"};
}

}  // namespace qws
