#pragma once

// Dense complex linear algebra used by the boundary reduction: LU with
// partial pivoting, a pivot floor that converts near-singularity into a
// typed error, and a solve report carrying residual and conditioning data.

#include <qws/lattice.hpp>

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace qws {

// Thrown when a dense system is singular to working precision (an LU pivot
// falls below the floor).  For boundary systems this signals a violated
// assumption (invalid coin) rather than a recoverable condition.
struct SingularSystem : std::runtime_error {
  explicit SingularSystem(std::string const& what) : std::runtime_error(what) {}
};

struct DenseSolveReport {
  Eigen::MatrixXcd solution;       // one column per right-hand side
  double relativeResidual = 0.0;   // ||A x - b|| / ||b|| (Frobenius), 0 for b = 0
  double conditionEstimate = 0.0;  // 1-norm condition estimate from the LU factors
  bool illConditioned = false;     // condition estimate worse than 1e12
};

inline constexpr double kPivotFloor = 1e-13;
inline constexpr double kConditionWarningThreshold = 1e12;

// Solves A x = b column-wise by LU with partial pivoting.  Throws
// SingularSystem when the smallest pivot modulus drops below pivotFloor.
inline DenseSolveReport solve_complex_dense(Eigen::MatrixXcd const& A,
                                            Eigen::MatrixXcd const& b,
                                            double pivotFloor = kPivotFloor) {
  if (A.rows() != A.cols()) throw std::invalid_argument("solve_complex_dense: matrix must be square");
  if (A.rows() != b.rows()) throw std::invalid_argument("solve_complex_dense: dimension mismatch");

  DenseSolveReport report;
  if (A.rows() == 0) {
    report.solution = Eigen::MatrixXcd(0, b.cols());
    return report;
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  double const minPivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (minPivot < pivotFloor)
    throw SingularSystem("solve_complex_dense: pivot " + std::to_string(minPivot) +
                         " below floor " + std::to_string(pivotFloor));

  double const rcond = lu.rcond();
  report.conditionEstimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  report.illConditioned = report.conditionEstimate > kConditionWarningThreshold;

  report.solution = lu.solve(b);
  double const bNorm = b.norm();
  report.relativeResidual = bNorm > 0.0 ? (A * report.solution - b).norm() / bNorm : 0.0;
  return report;
}

}  // namespace qws
