#include "randset/mvee.hpp"

#include <cmath>

#include "randset/errors.hpp"

namespace randset {

MveeResult mvee(const std::vector<Eigen::VectorXd>& points, double tol,
                long long max_iterations) {
  const long long num = static_cast<long long>(points.size());
  if (num == 0) throw ConfigError("mvee: empty point list");
  const int n = static_cast<int>(points.front().size());
  if (num < n + 1)
    throw DegenerateDataError("mvee: need at least n+1 points");
  for (const auto& p : points) {
    if (p.size() != n) throw DimensionError("mvee: inconsistent point dimension");
    if (!p.allFinite()) throw ConfigError("mvee: nonfinite point");
  }

  // Lifted points q_i = (x_i; 1); maximize log det sum u_i q_i q_i^T over the
  // simplex.
  const int d = n + 1;
  Eigen::MatrixXd Q(d, num);
  for (long long i = 0; i < num; ++i) {
    Q.col(i).head(n) = points[i];
    Q(n, i) = 1.0;
  }

  Eigen::VectorXd u = Eigen::VectorXd::Constant(num, 1.0 / num);
  Eigen::MatrixXd lambda = Q * u.asDiagonal() * Q.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(lambda);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0).any())
    throw DegenerateDataError("mvee: points are affinely dependent");
  Eigen::MatrixXd lambda_inv = ldlt.solve(Eigen::MatrixXd::Identity(d, d));

  // kappa_i = q_i^T Lambda^{-1} q_i, refreshed by rank-one updates.
  Eigen::VectorXd kappa(num);
  for (long long i = 0; i < num; ++i)
    kappa[i] = Q.col(i).dot(lambda_inv * Q.col(i));

  const double target = (1.0 + tol) * d;
  MveeResult result;
  long long it = 0;
  long long refresh_counter = 0;
  for (; it < max_iterations; ++it) {
    // Frank-Wolfe step toward the worst point, or an away step from the
    // most over-weighted support point when that violates optimality more.
    long long j_max = 0;
    double k_max = kappa.maxCoeff(&j_max);
    long long j_min = -1;
    double k_min = 2.0 * d;
    for (long long i = 0; i < num; ++i) {
      if (u[i] > 1e-14 && kappa[i] < k_min) {
        k_min = kappa[i];
        j_min = i;
      }
    }
    bool away = j_min >= 0 && (d - k_min) > (k_max - d);
    if (k_max <= target) break;

    long long j = away ? j_min : j_max;
    double kj = kappa[j];
    double beta = (kj - d) / (d * (kj - 1.0));
    if (away) beta = std::max(beta, -u[j] / (1.0 - u[j]));
    if (!std::isfinite(beta) || std::abs(beta) < 1e-18) break;

    // u <- (1 - beta) u + beta e_j
    u *= (1.0 - beta);
    u[j] += beta;

    // Sherman-Morrison update of Lambda^{-1} for
    // Lambda <- (1-beta) Lambda + beta q_j q_j^T.
    Eigen::VectorXd w = lambda_inv * Q.col(j);
    double denom = 1.0 - beta + beta * kj;
    lambda_inv = (lambda_inv - (beta / denom) * (w * w.transpose())) / (1.0 - beta);
    Eigen::VectorXd qw = Q.transpose() * w;
    kappa = (kappa - (beta / denom) * qw.array().square().matrix()) / (1.0 - beta);

    // Periodic refresh against rank-one drift.
    if (++refresh_counter == 4096) {
      refresh_counter = 0;
      lambda = Q * u.asDiagonal() * Q.transpose();
      Eigen::LDLT<Eigen::MatrixXd> re(lambda);
      if (re.info() != Eigen::Success)
        throw DegenerateDataError("mvee: factorization lost positive definiteness");
      lambda_inv = re.solve(Eigen::MatrixXd::Identity(d, d));
      for (long long i = 0; i < num; ++i)
        kappa[i] = Q.col(i).dot(lambda_inv * Q.col(i));
    }
  }

  // Recover the x-space form: center c = sum u_i x_i, second-moment matrix
  // Xi = sum u_i x_i x_i^T - c c^T, central form M0 = Xi^{-1} / n, rescaled so
  // the farthest point sits exactly on the boundary.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (long long i = 0; i < num; ++i) c += u[i] * points[i];
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(n, n);
  for (long long i = 0; i < num; ++i)
    xi += u[i] * (points[i] - c) * (points[i] - c).transpose();
  xi = 0.5 * (xi + xi.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xi);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw DegenerateDataError("mvee: degenerate second-moment matrix");
  Eigen::MatrixXd xi_inv = es.operatorInverseSqrt() * es.operatorInverseSqrt();

  double worst = 0.0;
  for (long long i = 0; i < num; ++i) {
    Eigen::VectorXd dlt = points[i] - c;
    worst = std::max(worst, dlt.dot(xi_inv * dlt) / n);
  }
  Eigen::MatrixXd quad_form = xi_inv / (n * worst);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esq(quad_form);
  MveeResult out;
  out.center = c;
  out.shape = esq.operatorSqrt();
  out.status = it < max_iterations ? SolveStatus::optimal : SolveStatus::max_iterations;
  out.iterations = static_cast<int>(std::min<long long>(it, 1LL << 30));
  return out;
}

}  // namespace randset
