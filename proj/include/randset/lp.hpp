#pragma once

#include <Eigen/Dense>

#include "randset/solve_report.hpp"

namespace randset {

// min objective . x  s.t.  ineq_matrix x <= ineq_rhs, eq_matrix x = eq_rhs,
// x free. Equality blocks may be empty (0 rows).
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd ineq_matrix;
  Eigen::VectorXd ineq_rhs;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;

  int num_vars() const { return static_cast<int>(objective.size()); }
  void validate() const;
};

// Dense two-phase primal simplex (free variables split into positive parts).
// Intended for the small fitting subproblems in this library.
SolveReport solve_lp(const LinearProgram& problem, double tol = 1e-9);

}  // namespace randset
