#pragma once

#include <Eigen/Dense>
#include <string>

namespace randset {

enum class SolveStatus {
  optimal,
  infeasible,
  unbounded,
  max_iterations,
  numerical_failure,
};

std::string to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = 0.0;
  Eigen::VectorXd solution;
  double feasibility_residual = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
};

}  // namespace randset
