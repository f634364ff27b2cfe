#include "randset/maxdet.hpp"

#include <cmath>

#include "randset/errors.hpp"

namespace randset {

Eigen::MatrixXd MaxdetProblem::matrix_at(const Eigen::VectorXd& theta) const {
  Eigen::MatrixXd P = base;
  for (int k = 0; k < num_vars(); ++k) P += theta[k] * basis[k];
  return P;
}

void MaxdetProblem::validate() const {
  if (matrix_dim < 1) throw ConfigError("MaxdetProblem: matrix_dim");
  if (base.rows() != matrix_dim || base.cols() != matrix_dim)
    throw DimensionError("MaxdetProblem: base size");
  if (basis.empty()) throw ConfigError("MaxdetProblem: no variables");
  for (const auto& B : basis) {
    if (B.rows() != matrix_dim || B.cols() != matrix_dim)
      throw DimensionError("MaxdetProblem: basis size");
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError("MaxdetProblem: basis must be symmetric");
  }
  if (linear_cost.size() != num_vars())
    throw DimensionError("MaxdetProblem: linear_cost size");
  if (ineq_matrix.rows() != ineq_rhs.size())
    throw DimensionError("MaxdetProblem: inequality rows/rhs mismatch");
  if (ineq_matrix.rows() > 0 && ineq_matrix.cols() != num_vars())
    throw DimensionError("MaxdetProblem: inequality column count");
  if (start.size() != num_vars())
    throw DimensionError("MaxdetProblem: start size");
}

namespace {

struct Objective {
  double value = 0.0;          // -log det P + c.theta (no barrier)
  bool in_domain = false;
};

Objective evaluate_objective(const MaxdetProblem& prob, const Eigen::VectorXd& theta) {
  Objective out;
  Eigen::MatrixXd P = prob.matrix_at(theta);
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) return out;
  double logdet = 0.0;
  for (int i = 0; i < prob.matrix_dim; ++i)
    logdet += std::log(llt.matrixL()(i, i));
  out.value = -2.0 * logdet + prob.linear_cost.dot(theta);
  out.in_domain = true;
  return out;
}

}  // namespace

SolveReport solve_maxdet(const MaxdetProblem& prob, double tol) {
  prob.validate();
  const int nv = prob.num_vars();
  const int m = static_cast<int>(prob.ineq_rhs.size());

  SolveReport report;
  Eigen::VectorXd theta = prob.start;
  {
    Eigen::VectorXd slack = prob.ineq_rhs - prob.ineq_matrix * theta;
    if (m > 0 && slack.minCoeff() <= 0.0)
      throw ConfigError("solve_maxdet: start violates an inequality");
    if (!evaluate_objective(prob, theta).in_domain)
      throw ConfigError("solve_maxdet: start is not positive definite");
  }

  // F_t(theta) = t (-log det P + c.theta) - sum log slack.
  double t = 1.0;
  const double mu = 20.0;
  int total_newton = 0;
  const int max_newton = 2000;

  while (true) {
    for (int inner = 0; inner < 200; ++inner) {
      if (++total_newton > max_newton) {
        report.status = SolveStatus::max_iterations;
        report.solution = theta;
        report.objective = evaluate_objective(prob, theta).value;
        report.iterations = total_newton;
        return report;
      }
      Eigen::MatrixXd P = prob.matrix_at(theta);
      Eigen::LLT<Eigen::MatrixXd> llt(P);
      if (llt.info() != Eigen::Success) {
        report.status = SolveStatus::numerical_failure;
        report.iterations = total_newton;
        return report;
      }
      Eigen::MatrixXd P_inv =
          llt.solve(Eigen::MatrixXd::Identity(prob.matrix_dim, prob.matrix_dim));

      // grad/hess of -log det P: -tr(P^-1 B_k), tr(P^-1 B_k P^-1 B_l).
      Eigen::VectorXd grad = t * prob.linear_cost;
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(nv, nv);
      std::vector<Eigen::MatrixXd> pb(nv);
      for (int k = 0; k < nv; ++k) {
        pb[k] = P_inv * prob.basis[k];
        grad[k] -= t * pb[k].trace();
      }
      for (int k = 0; k < nv; ++k)
        for (int l = k; l < nv; ++l) {
          double v = t * (pb[k] * pb[l]).trace();
          hess(k, l) = v;
          hess(l, k) = v;
        }

      Eigen::VectorXd slack(m);
      if (m > 0) {
        slack = prob.ineq_rhs - prob.ineq_matrix * theta;
        Eigen::VectorXd inv_s = slack.cwiseInverse();
        grad += prob.ineq_matrix.transpose() * inv_s;
        hess += prob.ineq_matrix.transpose() *
                inv_s.array().square().matrix().asDiagonal() * prob.ineq_matrix;
      }

      Eigen::LDLT<Eigen::MatrixXd> hs(hess);
      Eigen::VectorXd step = hs.solve(-grad);
      double decrement2 = -grad.dot(step);
      if (!(decrement2 > 0) || hs.info() != Eigen::Success) {
        // Hessian lost definiteness; fall back to gradient descent direction.
        step = -grad / std::max(1.0, grad.norm());
        decrement2 = grad.squaredNorm();
      }
      // Newton decrement: gradient norm in the Hessian metric, affine
      // invariant. lambda <= ~4e-7 bounds the centering error at this t by
      // 1e-13, far below the outer gap threshold.
      if (decrement2 * 0.5 < 1e-13) break;

      // Unbounded objectives walk theta off to infinity along a feasible ray.
      if (theta.cwiseAbs().maxCoeff() >
          1e12 * (1.0 + prob.start.cwiseAbs().maxCoeff())) {
        report.status = SolveStatus::unbounded;
        report.solution = theta;
        report.iterations = total_newton;
        return report;
      }

      // Backtracking line search staying in the domain.
      double current = t * evaluate_objective(prob, theta).value;
      if (m > 0) current -= slack.array().log().sum();
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        Eigen::VectorXd cand = theta + alpha * step;
        Objective obj = evaluate_objective(prob, cand);
        if (obj.in_domain) {
          bool slack_ok = true;
          double barrier = 0.0;
          if (m > 0) {
            Eigen::VectorXd s = prob.ineq_rhs - prob.ineq_matrix * cand;
            if (s.minCoeff() <= 0.0)
              slack_ok = false;
            else
              barrier = -s.array().log().sum();
          }
          if (slack_ok) {
            double value = t * obj.value + barrier;
            if (value <= current - 1e-4 * alpha * decrement2) {
              theta = cand;
              moved = true;
              break;
            }
          }
        }
        alpha *= 0.5;
      }
      if (!moved) break;  // no further progress at this t
    }

    double gap = (m + prob.matrix_dim) / t;
    double scale = 1.0 + std::abs(evaluate_objective(prob, theta).value);
    if (gap <= tol * scale) break;
    t *= mu;
    if (t > 1e18) break;
  }

  Objective final_obj = evaluate_objective(prob, theta);
  report.status = SolveStatus::optimal;
  report.solution = theta;
  report.objective = final_obj.value;
  report.duality_gap = (m + prob.matrix_dim) / t;
  report.iterations = total_newton;
  if (m > 0) {
    Eigen::VectorXd slack = prob.ineq_rhs - prob.ineq_matrix * theta;
    report.feasibility_residual = std::max(0.0, -slack.minCoeff());
  }
  return report;
}

}  // namespace randset
