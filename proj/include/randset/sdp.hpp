#pragma once

#include <Eigen/Dense>
#include <vector>

#include "randset/solve_report.hpp"

namespace randset {

// One matrix-valued affine constraint: constant + sum_k x_k coeff[k] must be
// positive semidefinite. Scalar affine inequalities are 1x1 blocks.
struct SdpBlock {
  int dim = 0;
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> coeff;  // one (possibly zero) matrix per variable

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;
};

// min objective . x  s.t. every block is PSD.
struct SdpProblem {
  Eigen::VectorXd objective;
  std::vector<SdpBlock> blocks;

  int num_vars() const { return static_cast<int>(objective.size()); }
  void add_block(Eigen::MatrixXd constant, std::vector<Eigen::MatrixXd> coeff);
  // Appends the 1x1 block rhs - gradient . x >= 0.
  void add_scalar_inequality(const Eigen::VectorXd& gradient, double rhs);
  void validate() const;
};

struct SdpOptions {
  double tol = 1e-7;
  int max_iterations = 200;
  double step_fraction = 0.98;
};

// Primal-dual interior-point method (Nesterov-Todd scaling, Mehrotra-style
// predictor-corrector). Infeasibility and unboundedness are detected from
// diverging iterates via approximate Farkas certificates and reported as
// statuses.
SolveReport solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

}  // namespace randset
