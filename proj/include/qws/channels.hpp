#pragma once

// Channel data on the spectral fiber: a BoundaryVector holds four finitely
// supported transverse sequences (one per chirality; Left/Right indexed by
// x2, Down/Up by x1) with the plain l^2 inner product, conjugate-linear in
// the second slot.  The free trace operators map lattice fields to channel
// data (f0) and channel data to exact plane-wave superpositions (f0_star).

#include <qws/lattice.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace qws {

class BoundaryVector {
public:
  BoundaryVector(double theta, int trange) : theta_(theta), m_(trange) {
    if (trange < 0) throw std::invalid_argument("BoundaryVector: negative transverse range");
    for (auto& s : seq_) s = Eigen::VectorXcd::Zero(2 * trange + 1);
  }

  double theta() const { return theta_; }
  /// Sequences are indexed by t in [-trange, trange].
  int trange() const { return m_; }

  cplx& at(Chirality p, int t) { return seq_[static_cast<std::size_t>(index_of(p))](t + m_); }
  cplx at(Chirality p, int t) const {
    return seq_[static_cast<std::size_t>(index_of(p))](t + m_);
  }
  cplx value_or_zero(Chirality p, int t) const {
    if (t < -m_ || t > m_) return cplx{0.0, 0.0};
    return at(p, t);
  }

  Eigen::VectorXcd const& sequence(Chirality p) const {
    return seq_[static_cast<std::size_t>(index_of(p))];
  }

  BoundaryVector& operator*=(cplx s) {
    for (auto& v : seq_) v *= s;
    return *this;
  }

  friend BoundaryVector operator*(cplx s, BoundaryVector v) {
    v *= s;
    return v;
  }

  friend BoundaryVector operator+(BoundaryVector const& a, BoundaryVector const& b) {
    return combined(a, b, 1.0);
  }
  friend BoundaryVector operator-(BoundaryVector const& a, BoundaryVector const& b) {
    return combined(a, b, -1.0);
  }

private:
  static BoundaryVector combined(BoundaryVector const& a, BoundaryVector const& b, cplx sign) {
    BoundaryVector out(a.theta_, std::max(a.m_, b.m_));
    for (Chirality p : all_chiralities)
      for (int t = -out.m_; t <= out.m_; ++t)
        out.at(p, t) = a.value_or_zero(p, t) + sign * b.value_or_zero(p, t);
    return out;
  }

  double theta_;
  int m_;
  std::array<Eigen::VectorXcd, 4> seq_;
};

/// Channel point mass: amplitude at transverse index t in chirality p.
inline BoundaryVector delta_channel(double theta, int trange, Chirality p, int t,
                                    cplx amplitude = cplx{1.0, 0.0}) {
  BoundaryVector phi(theta, trange);
  phi.at(p, t) = amplitude;
  return phi;
}

/// Fiber inner product: plain l^2 over the four sequences, conjugating the
/// second argument.
inline cplx h_inner(BoundaryVector const& a, BoundaryVector const& b) {
  cplx sum{0.0, 0.0};
  int const m = std::max(a.trange(), b.trange());
  for (Chirality p : all_chiralities)
    for (int t = -m; t <= m; ++t)
      sum += a.value_or_zero(p, t) * std::conj(b.value_or_zero(p, t));
  return sum;
}

inline double h_norm(BoundaryVector const& a) { return std::sqrt(std::real(h_inner(a, a))); }

/// Free trace operator: four one-dimensional Fourier sums at frequency theta.
/// Left/Down use e^{-i theta y}, Right/Up use e^{+i theta y}; Left/Right sum
/// along axis 1 at fixed x2, Down/Up along axis 2 at fixed x1.
inline BoundaryVector f0(GridField const& f, double theta) {
  int const L = f.window().L;
  BoundaryVector phi(theta, L);
  double const scale = 1.0 / std::sqrt(2.0 * pi);
  for (int t = -L; t <= L; ++t) {
    for (int y = -L; y <= L; ++y) {
      phi.at(Chirality::Left, t) += std::polar(scale, -theta * y) * f.at(Site{y, t}, Chirality::Left);
      phi.at(Chirality::Right, t) += std::polar(scale, theta * y) * f.at(Site{y, t}, Chirality::Right);
      phi.at(Chirality::Down, t) += std::polar(scale, -theta * y) * f.at(Site{t, y}, Chirality::Down);
      phi.at(Chirality::Up, t) += std::polar(scale, theta * y) * f.at(Site{t, y}, Chirality::Up);
    }
  }
  return phi;
}

/// Adjoint trace operator: the exact plane-wave superposition
///   (1/sqrt(2 pi)) [e^{+i theta x1} phi_L(x2), e^{-i theta x1} phi_R(x2),
///                   e^{+i theta x2} phi_D(x1), e^{-i theta x2} phi_U(x1)].
/// Satisfies the free eigen-equation at every site for any channel data.
inline FieldEvaluator f0_star(BoundaryVector const& phi) {
  auto const held = std::make_shared<BoundaryVector>(phi);
  double const theta = phi.theta();
  double const scale = 1.0 / std::sqrt(2.0 * pi);
  return FieldEvaluator{
      [held, theta, scale](Site x) -> Vec4 {
        Vec4 v;
        v(0) = std::polar(scale, theta * x.x1) * held->value_or_zero(Chirality::Left, x.x2);
        v(1) = std::polar(scale, -theta * x.x1) * held->value_or_zero(Chirality::Right, x.x2);
        v(2) = std::polar(scale, theta * x.x2) * held->value_or_zero(Chirality::Down, x.x1);
        v(3) = std::polar(scale, -theta * x.x2) * held->value_or_zero(Chirality::Up, x.x1);
        return v;
      },
      "exact on all of Z^2"};
}

}  // namespace qws
