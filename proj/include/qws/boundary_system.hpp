#pragma once

// Finite boundary reduction of the perturbed resolvent.  The defect operator
// V = S(C - I) has finite-rank range, so the resolvent equation
//   R = R0 - R0 V R
// closes on the (site, chirality) pairs where V can be nonzero.  Assembling
// M = I + V R0 on that basis and solving M g = V R0 f yields g = V R f, and
// then R f = R0 f - R0 g is exact at every lattice site.

#include <qws/coin.hpp>
#include <qws/green.hpp>
#include <qws/lattice.hpp>
#include <qws/linsolve.hpp>
#include <qws/walk.hpp>

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace qws {

class BoundarySystem {
public:
  BoundarySystem(CoinField coin, double theta, Side side)
      : coin_(std::move(coin)), point_{theta, side} {
    int const n0 = coin_.n0();
    // Basis: all (x, p) with shift source inside the coin box, ordered
    // lexicographically by (x1, x2, chirality) for reproducible matrices.
    for (int x1 = -(n0 + 1); x1 <= n0 + 1; ++x1)
      for (int x2 = -(n0 + 1); x2 <= n0 + 1; ++x2)
        for (Chirality p : all_chiralities) {
          Site const x{x1, x2};
          if (coin_.in_box(shift_source(x, p))) support_.push_back({x, p});
        }

    int const dim = static_cast<int>(support_.size());
    matrix_ = Eigen::MatrixXcd::Identity(dim, dim);
    for (int col = 0; col < dim; ++col) {
      auto const& [y, q] = support_[static_cast<std::size_t>(col)];
      for (int row = 0; row < dim; ++row) {
        auto const& [x, p] = support_[static_cast<std::size_t>(row)];
        Site const z = shift_source(x, p);
        cplx const dev = coin_.deviation(z)(index_of(p), index_of(q));
        if (dev == cplx{0.0, 0.0}) continue;
        // (V R0 delta_{y,q})_p(x) = (C(z)-I)_{pq} * r_q(z - y).
        matrix_(row, col) += dev * green0_entry(Site{z.x1 - y.x1, z.x2 - y.x2}, q,
                                                point_.theta, point_.side);
      }
    }

    lu_.compute(matrix_);
    double const minPivot = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (minPivot < kPivotFloor)
      throw SingularSystem("boundary system pivot " + std::to_string(minPivot) +
                           " below floor; coin assumptions violated?");
    double const rcond = lu_.rcond();
    conditionEstimate_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  }

  double theta() const { return point_.theta; }
  Side side() const { return point_.side; }
  SpectralPoint spectral_point() const { return point_; }
  CoinField const& coin() const { return coin_; }
  std::vector<std::pair<Site, Chirality>> const& supportSites() const { return support_; }
  Eigen::MatrixXcd const& matrix() const { return matrix_; }
  int dimension() const { return static_cast<int>(support_.size()); }
  double conditionEstimate() const { return conditionEstimate_; }

  // Solves (I + V R0) g = rhs for a right-hand side sampled on the support basis.
  Eigen::VectorXcd solve(Eigen::VectorXcd const& rhs) const { return lu_.solve(rhs); }

  // Samples V u on the support basis, reading u at the shift sources.
  Eigen::VectorXcd sample_V(FieldEvaluator const& u) const {
    int const n0 = coin_.n0();
    GridField const cached = u.materialize(Window(n0));
    Eigen::VectorXcd out(dimension());
    for (int i = 0; i < dimension(); ++i) {
      auto const& [x, p] = support_[static_cast<std::size_t>(i)];
      Site const z = shift_source(x, p);
      out(i) = (coin_.deviation(z) * cached.value(z))(index_of(p));
    }
    return out;
  }

  // g = V R f, represented sparsely on the support basis: the unique solution
  // of (I + V R0) g = V R0 f.
  SparseField boundary_source(GridField const& f) const {
    Eigen::VectorXcd const rhs = sample_V(apply_R0(f, point_.theta, point_.side));
    Eigen::VectorXcd const g = solve(rhs);
    SparseField out;
    out.reserve(support_.size());
    for (int i = 0; i < dimension(); ++i) {
      auto const& [x, p] = support_[static_cast<std::size_t>(i)];
      if (g(i) != cplx{0.0, 0.0}) out.push_back({x, p, g(i)});
    }
    return out;
  }

private:
  CoinField coin_;
  SpectralPoint point_;
  std::vector<std::pair<Site, Chirality>> support_;
  Eigen::MatrixXcd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  double conditionEstimate_ = 0.0;
};

inline BoundarySystem assemble_boundary_system(CoinField const& c, double theta, Side side) {
  return BoundarySystem(c, theta, side);
}

// Perturbed boundary resolvent R(theta +/- i0) applied to a finitely
// supported field, via R f = R0 f - R0 g with g = V R f from the boundary
// solve.  The result is exact at arbitrary sites (no truncation radius).
inline FieldEvaluator apply_R(BoundarySystem const& system, GridField const& f) {
  FieldEvaluator const r0f = apply_R0(f, system.theta(), system.side());
  SparseField const g = system.boundary_source(f);
  FieldEvaluator const r0g = apply_R0(g, system.theta(), system.side());
  return FieldEvaluator{
      [r0f, r0g](Site x) -> Vec4 { return r0f(x) - r0g(x); },
      "exact on all of Z^2"};
}

inline FieldEvaluator apply_R(CoinField const& c, GridField const& f, double theta, Side side) {
  return apply_R(BoundarySystem(c, theta, side), f);
}

}  // namespace qws
