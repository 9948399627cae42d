#pragma once

// The walk operator algebra on window fields and on exact evaluators.
//
//   shift          (S f)_p(x)   = f_p(x + shift_sign(p) e_{axis(p)})
//   coin           (C f)(x)     = C(x) f(x)
//   walk           U  = S C          free walk   U0 = S
//   adjoints       U* = C* S^{-1}    U0* = S^{-1}
//   perturbation   V  = U - U0 = S (C - I)       V* = (C* - I) S^{-1}
//
// Window variants read 0 outside the window (truncation contract); evaluator
// variants are exact on all of Z^2 because they defer to the input closure.

#include <string>
#include <utility>

#include "qws/coin.hpp"
#include "qws/lattice.hpp"

namespace qws {

// ---------------------------------------------------------------------------
// Window-field variants
// ---------------------------------------------------------------------------

inline GridField apply_shift(const GridField& f) {
  GridField out(f.window());
  out.for_each_site([&](Site x) {
    for (Chirality p : all_chiralities)
      out.at(x, p) = f.value_or_zero(shift_source(x, p), p);
  });
  return out;
}

inline GridField apply_shift_inverse(const GridField& f) {
  GridField out(f.window());
  out.for_each_site([&](Site x) {
    for (Chirality p : all_chiralities)
      out.at(x, p) = f.value_or_zero(shift_inverse_source(x, p), p);
  });
  return out;
}

inline GridField apply_coin(const CoinField& c, const GridField& f) {
  GridField out(f.window());
  // C = I outside D, so only box sites need the matrix product.
  out.for_each_site([&](Site x) {
    out.set(x, c.in_box(x) ? Vec4(c.at(x) * f.value(x)) : f.value(x));
  });
  return out;
}

inline GridField apply_coin_adjoint(const CoinField& c, const GridField& f) {
  GridField out(f.window());
  out.for_each_site([&](Site x) {
    out.set(x, c.in_box(x) ? Vec4(c.at(x).adjoint() * f.value(x)) : f.value(x));
  });
  return out;
}

inline GridField apply_free_walk(const GridField& f) { return apply_shift(f); }

inline GridField apply_free_walk_adjoint(const GridField& f) {
  return apply_shift_inverse(f);
}

inline GridField apply_walk(const CoinField& c, const GridField& f) {
  return apply_shift(apply_coin(c, f));
}

inline GridField apply_walk_adjoint(const CoinField& c, const GridField& f) {
  return apply_coin_adjoint(c, apply_shift_inverse(f));
}

// ---------------------------------------------------------------------------
// Finite-rank perturbation V = U - U0
// ---------------------------------------------------------------------------

/// Closed bounding box [x1lo, x1hi] x [x2lo, x2hi]; empty when lo > hi.
struct SupportBox {
  int x1lo = 0, x1hi = -1, x2lo = 0, x2hi = -1;

  bool empty() const { return x1lo > x1hi || x2lo > x2hi; }
  bool contains(Site x) const {
    return !empty() && x.x1 >= x1lo && x.x1 <= x1hi && x.x2 >= x2lo && x.x2 <= x2hi;
  }
};

struct VApplication {
  GridField field;
  SupportBox support;  // a-priori bound on where the result can be nonzero
};

/// V f = S (C - I) f.  Component p of the result lives one shift-source step
/// off D, so the support box is D widened by one site in every direction
/// (chirality-dependent one-sided sets, reported as their union).
inline VApplication apply_V(const CoinField& c, const GridField& f) {
  int const n0 = c.n0();
  GridField out(f.window());
  out.for_each_site([&](Site x) {
    Vec4 v = Vec4::Zero();
    for (Chirality p : all_chiralities) {
      Site const z = shift_source(x, p);
      if (!c.in_box(z)) continue;  // (C - I) annihilates everything off D
      v(index_of(p)) = (c.deviation(z) * f.value(z))(index_of(p));
    }
    out.set(x, v);
  });
  return {std::move(out), SupportBox{-n0 - 1, n0 + 1, -n0 - 1, n0 + 1}};
}

/// V* f = (C* - I) S^{-1} f; the result is supported in D itself.
inline VApplication apply_V_adjoint(const CoinField& c, const GridField& f) {
  int const n0 = c.n0();
  GridField out(f.window());
  out.for_each_site([&](Site x) {
    if (!c.in_box(x)) return;  // leaves the zero initialization in place
    Vec4 pre;
    for (Chirality p : all_chiralities)
      pre(index_of(p)) = f.value_or_zero(shift_inverse_source(x, p), p);
    out.set(x, (c.at(x).adjoint() - Mat4::Identity()) * pre);
  });
  return {std::move(out), SupportBox{-n0, n0, -n0, n0}};
}

// ---------------------------------------------------------------------------
// Evaluator variants (exact on Z^2)
// ---------------------------------------------------------------------------

inline FieldEvaluator apply_free_walk(FieldEvaluator u) {
  auto fn = std::move(u.fn);
  return FieldEvaluator{
      [fn](Site x) {
        Vec4 v;
        for (Chirality p : all_chiralities)
          v(index_of(p)) = fn(shift_source(x, p))(index_of(p));
        return v;
      },
      u.analyticRegion};
}

inline FieldEvaluator apply_walk(const CoinField& c, FieldEvaluator u) {
  auto fn = std::move(u.fn);
  return FieldEvaluator{
      [c, fn](Site x) {
        Vec4 v;
        for (Chirality p : all_chiralities) {
          Site const z = shift_source(x, p);
          // (U u)_p(x) = (C(z) u(z))_p with z the shift source of x.
          v(index_of(p)) =
              c.in_box(z) ? cplx((c.at(z) * fn(z))(index_of(p))) : fn(z)(index_of(p));
        }
        return v;
      },
      u.analyticRegion};
}

// ---------------------------------------------------------------------------
// Time evolution
// ---------------------------------------------------------------------------

struct EvolutionResult {
  GridField field;
  /// Sites with box_radius <= validityRadius hold the exact infinite-lattice
  /// values: one step of truncation error creeps inward per application, so
  /// validityRadius = L - t (negative when nothing is guaranteed).
  int validityRadius = 0;
};

inline EvolutionResult evolve(const CoinField& c, GridField f, int t) {
  if (t < 0) throw std::invalid_argument("evolution step count must be nonnegative");
  int const validity = f.window().L - t;
  for (int k = 0; k < t; ++k) f = apply_walk(c, f);
  return {std::move(f), validity};
}

}  // namespace qws
