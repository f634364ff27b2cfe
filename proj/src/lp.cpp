#include "randset/lp.hpp"

#include <cmath>
#include <vector>

#include "randset/errors.hpp"

namespace randset {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::max_iterations: return "max-iterations";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

void LinearProgram::validate() const {
  const int n = num_vars();
  if (n < 1) throw ConfigError("LinearProgram: no variables");
  if (!objective.allFinite()) throw ConfigError("LinearProgram: objective not finite");
  if (ineq_matrix.rows() != ineq_rhs.size())
    throw DimensionError("LinearProgram: inequality rows/rhs mismatch");
  if (ineq_matrix.rows() > 0 && ineq_matrix.cols() != n)
    throw DimensionError("LinearProgram: inequality column count");
  if (eq_matrix.rows() != eq_rhs.size())
    throw DimensionError("LinearProgram: equality rows/rhs mismatch");
  if (eq_matrix.rows() > 0 && eq_matrix.cols() != n)
    throw DimensionError("LinearProgram: equality column count");
  if (ineq_matrix.size() > 0 && !ineq_matrix.allFinite())
    throw ConfigError("LinearProgram: inequality data not finite");
  if (eq_matrix.size() > 0 && !eq_matrix.allFinite())
    throw ConfigError("LinearProgram: equality data not finite");
}

namespace {

// Tableau simplex over standard form min c.y s.t. T y = rhs, y >= 0.
// Columns at index >= blocked_from never enter the basis.
class Tableau {
 public:
  Tableau(Eigen::MatrixXd body, Eigen::VectorXd rhs, Eigen::VectorXd cost)
      : body_(std::move(body)), rhs_(std::move(rhs)), cost_(std::move(cost)) {
    m_ = static_cast<int>(body_.rows());
    n_ = static_cast<int>(body_.cols());
    basis_.assign(m_, -1);
  }

  int rows() const { return m_; }
  std::vector<int>& basis() { return basis_; }
  double entry(int r, int j) const { return body_(r, j); }

  void price_out() {
    for (int r = 0; r < m_; ++r) {
      int j = basis_[r];
      double cj = cost_[j];
      if (cj == 0.0) continue;
      objective_shift_ += cj * rhs_[r];
      cost_ -= cj * body_.row(r).transpose();
    }
  }

  SolveStatus iterate(double tol, int max_pivots, int blocked_from) {
    int stall = 0;
    double last_obj = current_objective();
    for (int pivot = 0; pivot < max_pivots; ++pivot) {
      // Dantzig rule, falling back to Bland's rule after long stalls.
      bool bland = stall > 2 * (m_ + n_);
      int enter = -1;
      double best = -tol;
      for (int j = 0; j < blocked_from; ++j) {
        if (cost_[j] < (bland ? -tol : best)) {
          best = cost_[j];
          enter = j;
          if (bland) break;
        }
      }
      if (enter < 0) return SolveStatus::optimal;

      int leave = -1;
      double best_ratio = 0.0;
      for (int r = 0; r < m_; ++r) {
        double a = body_(r, enter);
        if (a > tol) {
          double ratio = rhs_[r] / a;
          if (leave < 0 || ratio < best_ratio - 1e-12 ||
              (ratio <= best_ratio + 1e-12 && basis_[r] < basis_[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return SolveStatus::unbounded;

      pivot_at(leave, enter);
      double obj = current_objective();
      stall = obj < last_obj - 1e-13 * (1.0 + std::abs(last_obj)) ? 0 : stall + 1;
      last_obj = obj;
    }
    return SolveStatus::max_iterations;
  }

  double current_objective() const { return objective_shift_; }

  Eigen::VectorXd solution(int take) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (int r = 0; r < m_; ++r) y[basis_[r]] = rhs_[r];
    return y.segment(0, take);
  }

  void replace_cost(const Eigen::VectorXd& cost) {
    cost_ = cost;
    objective_shift_ = 0.0;
    price_out();
  }

  void pivot_at(int r, int j) {
    double piv = body_(r, j);
    body_.row(r) /= piv;
    rhs_[r] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double f = body_(i, j);
      if (f != 0.0) {
        body_.row(i) -= f * body_.row(r);
        rhs_[i] -= f * rhs_[r];
      }
    }
    double cf = cost_[j];
    if (cf != 0.0) {
      objective_shift_ += cf * rhs_[r];
      cost_ -= cf * body_.row(r).transpose();
    }
    basis_[r] = j;
    for (int i = 0; i < m_; ++i)
      if (rhs_[i] < 0.0 && rhs_[i] > -1e-11) rhs_[i] = 0.0;
  }

 private:
  Eigen::MatrixXd body_;
  Eigen::VectorXd rhs_;
  Eigen::VectorXd cost_;
  std::vector<int> basis_;
  double objective_shift_ = 0.0;
  int m_ = 0, n_ = 0;
};

}  // namespace

SolveReport solve_lp(const LinearProgram& problem, double tol) {
  problem.validate();
  const int n = problem.num_vars();
  const int m_ineq = static_cast<int>(problem.ineq_matrix.rows());
  const int m_eq = static_cast<int>(problem.eq_matrix.rows());
  const int m = m_ineq + m_eq;

  SolveReport report;
  if (m == 0) {
    // Unconstrained: bounded only for a zero objective.
    report.status = problem.objective.isZero(0.0) ? SolveStatus::optimal
                                                  : SolveStatus::unbounded;
    report.solution = Eigen::VectorXd::Zero(n);
    report.objective = 0.0;
    return report;
  }

  // Standard-form columns: [x+ (n) | x- (n) | slack (m_ineq) | artificial (m)].
  const int structural = 2 * n + m_ineq;
  const int cols = structural + m;
  Eigen::MatrixXd body = Eigen::MatrixXd::Zero(m, cols);
  Eigen::VectorXd rhs(m);
  for (int r = 0; r < m_ineq; ++r) {
    body.row(r).segment(0, n) = problem.ineq_matrix.row(r);
    body.row(r).segment(n, n) = -problem.ineq_matrix.row(r);
    body(r, 2 * n + r) = 1.0;
    rhs[r] = problem.ineq_rhs[r];
  }
  for (int r = 0; r < m_eq; ++r) {
    body.row(m_ineq + r).segment(0, n) = problem.eq_matrix.row(r);
    body.row(m_ineq + r).segment(n, n) = -problem.eq_matrix.row(r);
    rhs[m_ineq + r] = problem.eq_rhs[r];
  }
  for (int r = 0; r < m; ++r) {
    if (rhs[r] < 0.0) {
      body.row(r) = -body.row(r);
      rhs[r] = -rhs[r];
    }
    body(r, structural + r) = 1.0;
  }

  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(cols);
  phase1_cost.segment(structural, m).setOnes();

  Tableau tab(std::move(body), std::move(rhs), phase1_cost);
  for (int r = 0; r < m; ++r) tab.basis()[r] = structural + r;
  tab.price_out();

  const int max_pivots = 200 * (m + cols + 10);
  SolveStatus s1 = tab.iterate(tol, max_pivots, cols);
  if (s1 != SolveStatus::optimal) {
    report.status = s1 == SolveStatus::unbounded ? SolveStatus::numerical_failure : s1;
    return report;
  }
  if (tab.current_objective() > 1e-7) {
    report.status = SolveStatus::infeasible;
    return report;
  }

  // Pivot leftover zero-valued artificials out on any structural entry; rows
  // whose structural part vanished are redundant and inert.
  for (int r = 0; r < tab.rows(); ++r) {
    if (tab.basis()[r] >= structural) {
      for (int j = 0; j < structural; ++j) {
        if (std::abs(tab.entry(r, j)) > 1e-8) {
          tab.pivot_at(r, j);
          break;
        }
      }
    }
  }

  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(cols);
  phase2_cost.segment(0, n) = problem.objective;
  phase2_cost.segment(n, n) = -problem.objective;
  tab.replace_cost(phase2_cost);

  SolveStatus s2 = tab.iterate(tol, max_pivots, structural);
  report.status = s2;
  if (s2 == SolveStatus::optimal) {
    Eigen::VectorXd y = tab.solution(2 * n);
    Eigen::VectorXd x = y.segment(0, n) - y.segment(n, n);
    report.solution = x;
    report.objective = problem.objective.dot(x);
    double resid = 0.0;
    if (m_ineq > 0)
      resid = std::max(resid, (problem.ineq_matrix * x - problem.ineq_rhs)
                                  .cwiseMax(0.0)
                                  .maxCoeff());
    if (m_eq > 0)
      resid = std::max(
          resid, (problem.eq_matrix * x - problem.eq_rhs).cwiseAbs().maxCoeff());
    report.feasibility_residual = resid;
  }
  return report;
}

}  // namespace randset
