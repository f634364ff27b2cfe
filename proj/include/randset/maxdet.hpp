#pragma once

#include <Eigen/Dense>
#include <vector>

#include "randset/solve_report.hpp"

namespace randset {

// min  -log det P(theta) + linear_cost . theta
// s.t. ineq_matrix theta <= ineq_rhs
// where P(theta) = base + sum_k theta_k basis[k] is symmetric and the barrier
// keeps it positive definite. Callers supply a strictly feasible start.
struct MaxdetProblem {
  int matrix_dim = 0;
  Eigen::MatrixXd base;                 // constant part of P(theta)
  std::vector<Eigen::MatrixXd> basis;   // symmetric, one per variable
  Eigen::VectorXd linear_cost;          // may be zero
  Eigen::MatrixXd ineq_matrix;
  Eigen::VectorXd ineq_rhs;
  Eigen::VectorXd start;                // strictly feasible theta

  int num_vars() const { return static_cast<int>(basis.size()); }
  Eigen::MatrixXd matrix_at(const Eigen::VectorXd& theta) const;
  void validate() const;
};

// Path-following barrier Newton method. The report's solution is theta*;
// duality_gap is the log-barrier bound m/t at exit.
SolveReport solve_maxdet(const MaxdetProblem& problem, double tol = 1e-9);

}  // namespace randset
