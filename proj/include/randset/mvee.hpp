#pragma once

#include <Eigen/Dense>
#include <vector>

#include "randset/solve_report.hpp"

namespace randset {

struct MveeResult {
  Eigen::VectorXd center;
  // Symmetric square root of the quadratic-form matrix M, so
  // ||P (x - c)||_2 <= 1  <=>  (x - c)^T M (x - c) <= 1.
  Eigen::MatrixXd shape;
  SolveStatus status = SolveStatus::numerical_failure;
  int iterations = 0;
};

// Minimum-volume enclosing ellipsoid of a finite point set by the
// Khachiyan / Frank-Wolfe weight-update scheme with Wolfe-Atwood away steps.
// Stops when the lifted core-set optimality measure satisfies
// max_i q_i^T Lambda(u)^{-1} q_i <= (1 + tol)(n + 1); the quadratic form is
// rescaled afterwards so every input point is contained. With stopping
// parameter tol the fitted volume is within (1 + tol)^n of optimal.
//
// Requires n + 1 affinely independent points; throws DegenerateDataError
// otherwise.
MveeResult mvee(const std::vector<Eigen::VectorXd>& points, double tol = 1e-9,
                long long max_iterations = 2000000);

}  // namespace randset
