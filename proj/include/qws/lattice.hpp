#pragma once

// Core state representation for position-dependent quantum walks on Z^2.
//
// A walker state assigns to every lattice site x = (x1, x2) a C^4 amplitude
// vector indexed by chirality (Left, Right, Down, Up).  The chirality order is
// fixed globally as (Left, Right, Down, Up) = (0, 1, 2, 3); every matrix in
// this library uses that order, so there is exactly one layout convention to
// get wrong.  Left/Right components propagate along axis 1, Down/Up along
// axis 2.  Left and Down are the "+" chiralities: one step of the shift S
// reads them from x + e_j.  Right and Up are read from x - e_j.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qws {

using cplx = std::complex<double>;
using Vec4 = Eigen::Vector4cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr double pi = std::numbers::pi_v<double>;

// ---------------------------------------------------------------------------
// Chirality
// ---------------------------------------------------------------------------

enum class Chirality : int { Left = 0, Right = 1, Down = 2, Up = 3 };

inline constexpr std::array<Chirality, 4> all_chiralities{
    Chirality::Left, Chirality::Right, Chirality::Down, Chirality::Up};

constexpr int index_of(Chirality p) { return static_cast<int>(p); }

/// Axis a component propagates along: 0 for Left/Right, 1 for Down/Up.
constexpr int axis_of(Chirality p) { return index_of(p) / 2; }

/// Source offset of the shift: (S psi)_p(x) = psi_p(x + shift_sign(p) * e_axis).
constexpr int shift_sign(Chirality p) {
  return (p == Chirality::Left || p == Chirality::Down) ? +1 : -1;
}

constexpr char chirality_label(Chirality p) {
  constexpr std::array<char, 4> labels{'L', 'R', 'D', 'U'};
  return labels[static_cast<std::size_t>(index_of(p))];
}

inline Chirality chirality_from_label(char c) {
  switch (c) {
    case 'L': return Chirality::Left;
    case 'R': return Chirality::Right;
    case 'D': return Chirality::Down;
    case 'U': return Chirality::Up;
    default:
      throw std::invalid_argument(std::string("unknown chirality label '") + c +
                                  "' (expected one of L, R, D, U)");
  }
}

// ---------------------------------------------------------------------------
// Site and Window
// ---------------------------------------------------------------------------

struct Site {
  int x1 = 0;
  int x2 = 0;

  friend constexpr bool operator==(Site a, Site b) {
    return a.x1 == b.x1 && a.x2 == b.x2;
  }
  friend constexpr bool operator!=(Site a, Site b) { return !(a == b); }
};

constexpr int iabs(int v) { return v < 0 ? -v : v; }

/// F(s) = 1 for s >= 0, else 0: the half-line indicator that shapes both the
/// Green kernels and the radiation-condition truncations.
constexpr double heaviside(int s) { return s >= 0 ? 1.0 : 0.0; }

/// Chebyshev (sup) distance from the origin; the natural radius for square
/// boxes and corridors.
constexpr int box_radius(Site x) { return std::max(iabs(x.x1), iabs(x.x2)); }

/// The site one shift-source step from x for chirality p:
/// x + shift_sign(p) * e_{axis(p)}.
constexpr Site shift_source(Site x, Chirality p) {
  int const s = shift_sign(p);
  return axis_of(p) == 0 ? Site{x.x1 + s, x.x2} : Site{x.x1, x.x2 + s};
}

/// Inverse-shift source: x - shift_sign(p) * e_{axis(p)}.
constexpr Site shift_inverse_source(Site x, Chirality p) {
  int const s = shift_sign(p);
  return axis_of(p) == 0 ? Site{x.x1 - s, x.x2} : Site{x.x1, x.x2 - s};
}

/// Square observation window {|x1| <= L, |x2| <= L}.  Pure truncation device:
/// operators acting on window data read 0 outside; exact infinite-lattice
/// values are carried by FieldEvaluator closures instead.
struct Window {
  int L = 0;

  explicit constexpr Window(int halfWidth) : L(halfWidth) {
    if (halfWidth <= 0) throw std::invalid_argument("Window half-width must be positive");
  }

  constexpr int side() const { return 2 * L + 1; }
  constexpr std::size_t site_count() const {
    return static_cast<std::size_t>(side()) * static_cast<std::size_t>(side());
  }
  constexpr bool contains(Site x) const { return box_radius(x) <= L; }
};

// ---------------------------------------------------------------------------
// GridField
// ---------------------------------------------------------------------------

/// Dense C^4-valued field on a window.  Layout is site-major with chirality
/// fastest-varying: index = 4 * ((x1 + L) * (2L+1) + (x2 + L)) + chirality.
class GridField {
 public:
  explicit GridField(Window w)
      : win_(w), a_(4 * w.site_count(), cplx(0.0, 0.0)) {}

  Window window() const { return win_; }

  cplx& at(Site x, Chirality p) { return a_[idx(x, p)]; }
  cplx at(Site x, Chirality p) const { return a_[idx(x, p)]; }

  /// Value with the truncation contract applied: 0 outside the window.
  cplx value_or_zero(Site x, Chirality p) const {
    return win_.contains(x) ? a_[idx(x, p)] : cplx(0.0, 0.0);
  }

  Vec4 value(Site x) const {
    if (!win_.contains(x)) return Vec4::Zero();
    std::size_t const base = idx(x, Chirality::Left);
    return Vec4(a_[base], a_[base + 1], a_[base + 2], a_[base + 3]);
  }

  void set(Site x, const Vec4& v) {
    std::size_t const base = idx(x, Chirality::Left);
    for (int k = 0; k < 4; ++k) a_[base + static_cast<std::size_t>(k)] = v(k);
  }

  /// Visit every site of the window (x1-major, then x2, matching the layout).
  template <typename Fn>
  void for_each_site(Fn&& fn) const {
    for (int x1 = -win_.L; x1 <= win_.L; ++x1)
      for (int x2 = -win_.L; x2 <= win_.L; ++x2) fn(Site{x1, x2});
  }

  bool all_finite() const {
    for (const cplx& v : a_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  const std::vector<cplx>& raw() const { return a_; }

 private:
  std::size_t idx(Site x, Chirality p) const {
    if (!win_.contains(x)) throw std::out_of_range("site outside window");
    auto const row = static_cast<std::size_t>(x.x1 + win_.L);
    auto const col = static_cast<std::size_t>(x.x2 + win_.L);
    return 4 * (row * static_cast<std::size_t>(win_.side()) + col) +
           static_cast<std::size_t>(index_of(p));
  }

  Window win_;
  std::vector<cplx> a_;
};

/// Single-site unit impulse: delta at x in chirality p.
inline GridField delta_field(Window w, Site x, Chirality p, cplx amplitude = 1.0) {
  GridField f(w);
  f.at(x, p) = amplitude;
  return f;
}

// ---------------------------------------------------------------------------
// SpectralPoint
// ---------------------------------------------------------------------------

/// Which side of the unit circle a boundary resolvent is the limit from.
/// PlusI0 is the limit from inside the disk (|e^{i kappa}| < 1 upstairs),
/// MinusI0 from outside.
enum class Side { PlusI0, MinusI0 };

inline Side opposite(Side s) { return s == Side::PlusI0 ? Side::MinusI0 : Side::PlusI0; }

/// Quasi-energy theta in [0, 2pi) together with the boundary side theta +- i0.
/// Off-axis spectral parameters are intentionally not represented.
struct SpectralPoint {
  double theta = 0.0;
  Side side = Side::PlusI0;

  SpectralPoint(double th, Side s) : theta(canonical(th)), side(s) {}

  static double canonical(double th) {
    double t = std::fmod(th, 2.0 * pi);
    if (t < 0.0) t += 2.0 * pi;
    return t;
  }

  cplx eitheta() const { return std::polar(1.0, theta); }
};

// ---------------------------------------------------------------------------
// FieldEvaluator
// ---------------------------------------------------------------------------

/// Exact-evaluation closure: the field value at any site of Z^2, with a prose
/// descriptor of the region where the closed form is exact.  Evaluation must
/// be a pure function of the site so repeated calls are bit-identical.
struct FieldEvaluator {
  std::function<Vec4(Site)> fn;
  std::string analyticRegion = "all of Z^2";

  Vec4 operator()(Site x) const { return fn(x); }

  GridField materialize(Window w) const {
    GridField out(w);
    out.for_each_site([&](Site x) { out.set(x, fn(x)); });
    return out;
  }
};

/// Evaluator view of a window field (0 outside -- the truncation contract).
inline FieldEvaluator as_evaluator(GridField f) {
  auto shared = std::make_shared<GridField>(std::move(f));
  return FieldEvaluator{
      [shared](Site x) { return shared->value(x); },
      "window |x_j| <= " + std::to_string(shared->window().L) + ", zero outside"};
}

}  // namespace qws
