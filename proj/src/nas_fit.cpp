#include "randset/nas_fit.hpp"

#include <algorithm>
#include <cmath>

#include "randset/errors.hpp"
#include "randset/lp.hpp"
#include "randset/maxdet.hpp"
#include "randset/mvee.hpp"

namespace randset {

namespace {

void check_points(const std::vector<Eigen::VectorXd>& points) {
  if (points.empty()) throw ConfigError("fit: empty point cloud");
  const int n = static_cast<int>(points.front().size());
  for (const auto& p : points) {
    if (p.size() != n) throw DimensionError("fit: inconsistent point dimension");
    if (!p.allFinite()) throw ConfigError("fit: nonfinite point");
  }
}

double cloud_scale(const std::vector<Eigen::VectorXd>& points) {
  Box bb = Box::bounding(points);
  return std::max({1.0, bb.widths().maxCoeff(),
                   bb.center().cwiseAbs().maxCoeff()});
}

// Appends 2n axis offsets around the centroid; enough to restore affine
// independence while leaving the original points untouched.
std::vector<Eigen::VectorXd> with_jitter_ball(
    const std::vector<Eigen::VectorXd>& points, double radius) {
  const int n = static_cast<int>(points.front().size());
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  std::vector<Eigen::VectorXd> out = points;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = radius;
    out.push_back(centroid + e);
    out.push_back(centroid - e);
  }
  return out;
}

bool cloud_degenerate(const std::vector<Eigen::VectorXd>& points) {
  const int n = static_cast<int>(points.front().size());
  if (static_cast<long long>(points.size()) < n + 1) return true;
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  for (const auto& p : points)
    cov += (p - centroid) * (p - centroid).transpose();
  cov /= static_cast<double>(points.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  double scale = cloud_scale(points);
  return es.eigenvalues().minCoeff() <= 1e-20 * scale * scale;
}

// Symmetric basis element E_ab (unit diagonal or mirrored pair).
Eigen::MatrixXd sym_basis(int n, int a, int b) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
  E(a, b) = 1.0;
  E(b, a) = 1.0;
  return E;
}

}  // namespace

NasSet fit_ellipsoid(const std::vector<Eigen::VectorXd>& points, double tol,
                     NasFitInfo* info) {
  check_points(points);
  const int n = static_cast<int>(points.front().size());
  std::vector<Eigen::VectorXd> cloud = points;
  if (cloud_degenerate(cloud)) {
    double radius = 1e-9 * cloud_scale(points);
    cloud = with_jitter_ball(points, radius);
    if (info) {
      info->regularized = true;
      info->jitter_points = 2 * n;
    }
  }

  // Whiten with the symmetric inverse square root of the (floored) cloud
  // covariance; the MVEE is affine equivariant and the floored directions
  // would otherwise make the lifted system numerically singular.
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
  for (const auto& p : cloud) centroid += p;
  centroid /= static_cast<double>(cloud.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  for (const auto& p : cloud)
    cov += (p - centroid) * (p - centroid).transpose();
  cov /= static_cast<double>(cloud.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  double scale = cloud_scale(cloud);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(1e-20 * scale * scale);
  Eigen::MatrixXd whiten = es.eigenvectors() *
                           lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                           es.eigenvectors().transpose();
  Eigen::MatrixXd unwhiten = es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                             es.eigenvectors().transpose();

  std::vector<Eigen::VectorXd> whitened;
  whitened.reserve(cloud.size());
  for (const auto& p : cloud) whitened.push_back(whiten * (p - centroid));

  MveeResult r;
  try {
    r = mvee(whitened, tol);
  } catch (const DegenerateDataError& e) {
    throw DegenerateDataError(std::string("fit_ellipsoid: cloud degenerate "
                                          "after regularization: ") +
                              e.what());
  }
  if (r.status != SolveStatus::optimal && r.status != SolveStatus::max_iterations)
    throw SolverError("fit_ellipsoid: mvee failed");

  // Map back: quadratic form M = W M~ W, center c = centroid + W^{-1} c~.
  Eigen::MatrixXd m_white = r.shape * r.shape;
  Eigen::MatrixXd m_orig = whiten * m_white * whiten;
  Eigen::VectorXd center = centroid + unwhiten * r.center;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esm(0.5 * (m_orig + m_orig.transpose()));
  if (esm.eigenvalues().minCoeff() <= 0.0)
    throw DegenerateDataError("fit_ellipsoid: unwhitened form lost definiteness");
  return NasSet(center, esm.operatorSqrt(), NormP::l2);
}

NasSet fit_hyperrectangle(const std::vector<Eigen::VectorXd>& points,
                          NasFitInfo* info) {
  check_points(points);
  const int n = static_cast<int>(points.front().size());
  Box bb = Box::bounding(points);
  Eigen::VectorXd center = bb.center();
  Eigen::VectorXd widths = bb.widths();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double w = widths[j];
    if (w <= 0.0) {
      w = 1e-9 * std::max(1.0, std::abs(center[j]));
      if (info) info->regularized = true;
    }
    P(j, j) = 2.0 / w;
  }
  return NasSet(center, P, NormP::linf);
}

NasSet fit_parallelotope(const std::vector<Eigen::VectorXd>& points, double tol,
                         NasFitInfo* info) {
  check_points(points);
  const int n = static_cast<int>(points.front().size());
  std::vector<Eigen::VectorXd> cloud = points;
  if (cloud_degenerate(cloud)) {
    cloud = with_jitter_ball(points, 1e-9 * cloud_scale(points));
    if (info) {
      info->regularized = true;
      info->jitter_points = 2 * n;
    }
  }

  // Variables: upper-triangle of P (a <= b, graded row-major), then ct = P c.
  const int np = n * (n + 1) / 2;
  const int nv = np + n;
  MaxdetProblem prob;
  prob.matrix_dim = n;
  prob.base = Eigen::MatrixXd::Zero(n, n);
  prob.basis.reserve(nv);
  std::vector<std::pair<int, int>> entries;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      prob.basis.push_back(sym_basis(n, a, b));
      entries.emplace_back(a, b);
    }
  for (int k = 0; k < n; ++k)
    prob.basis.push_back(Eigen::MatrixXd::Zero(n, n));
  prob.linear_cost = Eigen::VectorXd::Zero(nv);

  const long long num = static_cast<long long>(cloud.size());
  prob.ineq_matrix = Eigen::MatrixXd::Zero(2 * num * n, nv);
  prob.ineq_rhs = Eigen::VectorXd::Ones(2 * num * n);
  long long row = 0;
  for (long long i = 0; i < num; ++i) {
    for (int j = 0; j < n; ++j) {
      // (P x - ct)_j = sum_{a<=b} theta_ab (E_ab x)_j - ct_j.
      Eigen::VectorXd coeff = Eigen::VectorXd::Zero(nv);
      for (int v = 0; v < np; ++v) {
        auto [a, b] = entries[v];
        double val = 0.0;
        if (a == j) val += cloud[i][b];
        if (b == j && b != a) val += cloud[i][a];
        coeff[v] = val;
      }
      coeff[np + j] = -1.0;
      prob.ineq_matrix.row(row++) = coeff;   //  (P x - ct)_j <= 1
      prob.ineq_matrix.row(row++) = -coeff;  // -(P x - ct)_j <= 1
    }
  }

  // Strictly feasible start from the inflated bounding box.
  Box bb = Box::bounding(cloud);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(nv);
  {
    Eigen::VectorXd widths = bb.widths();
    Eigen::VectorXd center = bb.center();
    int v = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b, ++v)
        if (a == b) {
          double w = std::max(widths[a], 1e-9 * cloud_scale(cloud));
          start[v] = 2.0 / (1.5 * w);
        }
    for (int j = 0; j < n; ++j) {
      double w = std::max(widths[j], 1e-9 * cloud_scale(cloud));
      start[np + j] = 2.0 / (1.5 * w) * center[j];
    }
  }
  prob.start = start;

  auto r = solve_maxdet(prob, tol);
  if (r.status != SolveStatus::optimal)
    throw SolverError("fit_parallelotope: maxdet solve failed (" +
                      to_string(r.status) + ")");

  Eigen::MatrixXd P = prob.matrix_at(r.solution);
  Eigen::VectorXd ct = r.solution.segment(np, n);
  Eigen::VectorXd center = P.ldlt().solve(ct);
  return NasSet(center, P, NormP::linf);
}

NasSet fit_l1_diag(const std::vector<Eigen::VectorXd>& points, double tol,
                   NasFitInfo* info) {
  check_points(points);
  const int n = static_cast<int>(points.front().size());
  const long long num = static_cast<long long>(points.size());

  Box bb = Box::bounding(points);
  Eigen::VectorXd center = bb.center();
  Eigen::VectorXd widths = bb.widths();
  for (int j = 0; j < n; ++j)
    widths[j] = std::max(widths[j], 1e-9 * std::max(1.0, std::abs(center[j])));
  if ((bb.widths().array() <= 0.0).any() && info) info->regularized = true;

  // Sign-enumerated rows: sum_j s_j (p_j x_j - ct_j) <= 1 for s in {-1,1}^n.
  const int nv = 2 * n;  // (p_1..p_n, ct_1..ct_n)
  const long long patterns = 1LL << n;
  Eigen::MatrixXd rows(num * patterns, nv);
  for (long long i = 0; i < num; ++i) {
    for (long long s = 0; s < patterns; ++s) {
      Eigen::VectorXd coeff(nv);
      for (int j = 0; j < n; ++j) {
        double sj = (s >> j) & 1 ? 1.0 : -1.0;
        coeff[j] = sj * points[i][j];
        coeff[n + j] = -sj;
      }
      rows.row(i * patterns + s) = coeff;
    }
  }

  // LP initialization: maximize the margin over a generated subset of rows.
  // Variables (p, ct, s); rows enter as row.theta + s <= 1.
  Eigen::VectorXd theta(nv);
  for (int j = 0; j < n; ++j) {
    theta[j] = 2.0 / (1.5 * n * widths[j]);
    theta[n + j] = theta[j] * center[j];
  }
  {
    std::vector<long long> active;
    for (long long i = 0; i < num; ++i) {
      // Most binding pattern at the analytic start.
      long long s = 0;
      for (int j = 0; j < n; ++j)
        if (theta[j] * points[i][j] - theta[n + j] >= 0) s |= 1LL << j;
      active.push_back(i * patterns + s);
    }
    for (int round = 0; round < 6; ++round) {
      LinearProgram lp;
      lp.objective = Eigen::VectorXd::Zero(nv + 1);
      lp.objective[nv] = -1.0;  // max margin
      const long long m = static_cast<long long>(active.size());
      lp.ineq_matrix = Eigen::MatrixXd::Zero(m + 2 * n + 1, nv + 1);
      lp.ineq_rhs.resize(m + 2 * n + 1);
      for (long long r = 0; r < m; ++r) {
        lp.ineq_matrix.row(r).segment(0, nv) = rows.row(active[r]);
        lp.ineq_matrix(r, nv) = 1.0;
        lp.ineq_rhs[r] = 1.0;
      }
      for (int j = 0; j < n; ++j) {
        lp.ineq_matrix(m + j, j) = -1.0;  // p_j >= tiny floor
        lp.ineq_rhs[m + j] = -1e-12 * theta[j];
        lp.ineq_matrix(m + n + j, j) = 1.0;  // p_j <= generous cap
        lp.ineq_rhs[m + n + j] = 8.0 * n / widths[j];
      }
      lp.ineq_matrix(m + 2 * n, nv) = -1.0;  // margin >= 0 not required; cap below
      lp.ineq_rhs[m + 2 * n] = 2.0;
      auto lr = solve_lp(lp);
      if (lr.status != SolveStatus::optimal) break;
      Eigen::VectorXd cand = lr.solution.segment(0, nv);
      // Add the most violated pattern per point at the candidate.
      bool added = false;
      for (long long i = 0; i < num; ++i) {
        double worst = -1.0;
        long long worst_row = -1;
        for (long long s = 0; s < patterns; ++s) {
          double v = rows.row(i * patterns + s).dot(cand);
          if (v > worst) {
            worst = v;
            worst_row = i * patterns + s;
          }
        }
        if (worst > 1.0 - 1e-9 &&
            std::find(active.begin(), active.end(), worst_row) == active.end()) {
          active.push_back(worst_row);
          added = true;
        }
      }
      if (lr.solution[nv] > 1e-9) {
        // Move to the margin point scaled slightly inward.
        bool feasible = ((rows * cand).array() <= 1.0 - 1e-12).all();
        if (feasible && (cand.segment(0, n).array() > 0.0).all()) theta = cand;
      }
      if (!added) break;
    }
  }
  if (!((rows * theta).array() < 1.0).all() ||
      !((theta.segment(0, n).array()) > 0.0).all())
    throw SolverError("fit_l1_diag: no strictly feasible start found");

  MaxdetProblem prob;
  prob.matrix_dim = n;
  prob.base = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) prob.basis.push_back(sym_basis(n, j, j));
  for (int j = 0; j < n; ++j) prob.basis.push_back(Eigen::MatrixXd::Zero(n, n));
  prob.linear_cost = Eigen::VectorXd::Zero(nv);
  prob.ineq_matrix = rows;
  prob.ineq_rhs = Eigen::VectorXd::Ones(rows.rows());
  prob.start = theta;
  auto r = solve_maxdet(prob, tol);
  if (r.status != SolveStatus::optimal)
    throw SolverError("fit_l1_diag: maxdet solve failed (" +
                      to_string(r.status) + ")");

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd c(n);
  for (int j = 0; j < n; ++j) {
    P(j, j) = r.solution[j];
    c[j] = r.solution[n + j] / r.solution[j];
  }
  return NasSet(c, P, NormP::l1);
}

NasSet fit_nas(SetFamily family, const std::vector<Eigen::VectorXd>& points,
               double tol, NasFitInfo* info) {
  switch (family) {
    case SetFamily::ellipsoid: return fit_ellipsoid(points, tol, info);
    case SetFamily::hyperrectangle: return fit_hyperrectangle(points, info);
    case SetFamily::parallelotope: return fit_parallelotope(points, tol, info);
    case SetFamily::l1_diag: return fit_l1_diag(points, tol, info);
    case SetFamily::pas:
      throw ConfigError("fit_nas: PAS fits live in pas_fit");
  }
  throw ConfigError("fit_nas: bad family");
}

}  // namespace randset
