#include "randset/sdp.hpp"

#include <cmath>

#include "randset/errors.hpp"

namespace randset {

Eigen::MatrixXd SdpBlock::evaluate(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd S = constant;
  for (int k = 0; k < static_cast<int>(coeff.size()); ++k)
    if (coeff[k].size() > 0) S += x[k] * coeff[k];
  return S;
}

void SdpProblem::add_block(Eigen::MatrixXd constant,
                           std::vector<Eigen::MatrixXd> coeff) {
  SdpBlock block;
  block.dim = static_cast<int>(constant.rows());
  block.constant = std::move(constant);
  block.coeff = std::move(coeff);
  blocks.push_back(std::move(block));
}

void SdpProblem::add_scalar_inequality(const Eigen::VectorXd& gradient,
                                       double rhs) {
  SdpBlock block;
  block.dim = 1;
  block.constant = Eigen::MatrixXd::Constant(1, 1, rhs);
  block.coeff.resize(num_vars());
  for (int k = 0; k < num_vars(); ++k) {
    if (gradient[k] != 0.0)
      block.coeff[k] = Eigen::MatrixXd::Constant(1, 1, -gradient[k]);
  }
  blocks.push_back(std::move(block));
}

void SdpProblem::validate() const {
  if (num_vars() < 1) throw ConfigError("SdpProblem: no variables");
  if (blocks.empty()) throw ConfigError("SdpProblem: no constraints");
  for (const auto& b : blocks) {
    if (b.dim < 1 || b.constant.rows() != b.dim || b.constant.cols() != b.dim)
      throw DimensionError("SdpProblem: block size");
    if (static_cast<int>(b.coeff.size()) != num_vars())
      throw DimensionError("SdpProblem: coefficient count per block");
    for (const auto& F : b.coeff) {
      if (F.size() == 0) continue;
      if (F.rows() != b.dim || F.cols() != b.dim)
        throw DimensionError("SdpProblem: coefficient matrix size");
      if ((F - F.transpose()).cwiseAbs().maxCoeff() >
          1e-12 * (1.0 + F.cwiseAbs().maxCoeff()))
        throw ConfigError("SdpProblem: coefficient matrix must be symmetric");
    }
  }
}

namespace {

struct BlockScaling {
  Eigen::MatrixXd r;        // W = r r^T, NT scaling point
  Eigen::MatrixXd r_inv;
  Eigen::MatrixXd w_inv;
  Eigen::VectorXd lambda;   // scaled spectrum, R^{-1} S R^{-T} = R^T Z R = diag
};

// Rounding can push a nearly singular iterate marginally outside the PD
// cone; clamp its spectrum so the NT scaling factorizations stay valid. The
// floor sits far below the duality gaps this solver targets.
void floor_spectrum(Eigen::MatrixXd& M) {
  if (M.rows() == 1) {
    M(0, 0) = std::max(M(0, 0), 1e-14 * (1.0 + std::abs(M(0, 0))));
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  double floor = 1e-14 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() >= floor) return;
  M = es.eigenvectors() * es.eigenvalues().cwiseMax(floor).asDiagonal() *
      es.eigenvectors().transpose();
  M = 0.5 * (M + M.transpose()).eval();
}

// Largest alpha <= cap with M + alpha dM >= 0, via the spectrum of
// L^{-1} dM L^{-T}.
double max_psd_step(const Eigen::MatrixXd& M, const Eigen::MatrixXd& dM,
                    double cap) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd A = L.triangularView<Eigen::Lower>().solve(dM);
  A = L.triangularView<Eigen::Lower>().solve(A.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return cap;
  return std::min(cap, -1.0 / lmin);
}

}  // namespace

SolveReport solve_sdp(const SdpProblem& prob, const SdpOptions& options) {
  prob.validate();
  const int nv = prob.num_vars();
  const int nb = static_cast<int>(prob.blocks.size());
  const Eigen::VectorXd& c = prob.objective;

  double total_dim = 0.0;
  for (const auto& b : prob.blocks) total_dim += b.dim;

  // Infeasible start: x = 0, S and Z proportional to the identity at the
  // scale of the data.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nv);
  std::vector<Eigen::MatrixXd> S(nb), Z(nb);
  for (int j = 0; j < nb; ++j) {
    const auto& b = prob.blocks[j];
    double scale = std::max(1.0, b.constant.cwiseAbs().maxCoeff());
    for (const auto& F : b.coeff)
      if (F.size() > 0) scale = std::max(scale, F.cwiseAbs().maxCoeff());
    S[j] = scale * Eigen::MatrixXd::Identity(b.dim, b.dim);
    Z[j] = std::max(1.0, c.cwiseAbs().maxCoeff()) *
           Eigen::MatrixXd::Identity(b.dim, b.dim);
  }

  SolveReport report;
  double norm_f0 = 1.0;
  for (const auto& b : prob.blocks)
    norm_f0 = std::max(norm_f0, b.constant.cwiseAbs().maxCoeff());
  const double norm_c = 1.0 + c.cwiseAbs().maxCoeff();

  int stalls = 0;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // Residuals.
    std::vector<Eigen::MatrixXd> r_p(nb);
    double p_res = 0.0;
    for (int j = 0; j < nb; ++j) {
      r_p[j] = prob.blocks[j].evaluate(x) - S[j];
      p_res = std::max(p_res, r_p[j].cwiseAbs().maxCoeff());
    }
    Eigen::VectorXd r_d = c;
    for (int j = 0; j < nb; ++j) {
      const auto& b = prob.blocks[j];
      for (int k = 0; k < nv; ++k)
        if (b.coeff[k].size() > 0)
          r_d[k] -= (b.coeff[k].cwiseProduct(Z[j])).sum();
    }

    double gap = 0.0;
    for (int j = 0; j < nb; ++j) gap += (S[j].cwiseProduct(Z[j])).sum();
    double mu = gap / total_dim;
    double objective = c.dot(x);

    report.iterations = iter;
    report.objective = objective;
    report.solution = x;
    report.feasibility_residual = p_res;
    report.duality_gap = gap;

    bool p_ok = p_res <= options.tol * (1.0 + norm_f0);
    bool d_ok = r_d.cwiseAbs().maxCoeff() <= options.tol * norm_c;
    bool g_ok = gap <= options.tol * (1.0 + std::abs(objective));
    if (p_ok && d_ok && g_ok) {
      report.status = SolveStatus::optimal;
      return report;
    }

    // Farkas-style divergence checks.
    double z_norm = 0.0;
    for (int j = 0; j < nb; ++j) z_norm += Z[j].cwiseAbs().maxCoeff();
    if (z_norm > 1e8) {
      double atz = 0.0, f0z = 0.0;
      for (int j = 0; j < nb; ++j)
        f0z += (prob.blocks[j].constant.cwiseProduct(Z[j])).sum() / z_norm;
      Eigen::VectorXd az = Eigen::VectorXd::Zero(nv);
      for (int j = 0; j < nb; ++j)
        for (int k = 0; k < nv; ++k)
          if (prob.blocks[j].coeff[k].size() > 0)
            az[k] += (prob.blocks[j].coeff[k].cwiseProduct(Z[j])).sum() / z_norm;
      atz = az.cwiseAbs().maxCoeff();
      if (atz <= 1e-7 && f0z < -1e-9) {
        report.status = SolveStatus::infeasible;
        return report;
      }
    }
    if (x.cwiseAbs().maxCoeff() > 1e8) {
      Eigen::VectorXd xh = x / x.cwiseAbs().maxCoeff();
      bool ray = c.dot(xh) < -1e-9;
      for (int j = 0; j < nb && ray; ++j) {
        Eigen::MatrixXd dir = Eigen::MatrixXd::Zero(prob.blocks[j].dim,
                                                    prob.blocks[j].dim);
        for (int k = 0; k < nv; ++k)
          if (prob.blocks[j].coeff[k].size() > 0)
            dir += xh[k] * prob.blocks[j].coeff[k];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dir);
        if (es.eigenvalues().minCoeff() < -1e-7) ray = false;
      }
      if (ray) {
        report.status = SolveStatus::unbounded;
        return report;
      }
    }

    // NT scaling per block. Factors S = F F^T come from eigendecompositions
    // (with floored spectra), which stay valid arbitrarily close to the
    // boundary of the cone; only symmetry of the factorized matrix matters
    // for the scaling identities.
    std::vector<BlockScaling> scal(nb);
    bool scaling_ok = true;
    auto psd_factor = [](const Eigen::MatrixXd& M, Eigen::MatrixXd& factor,
                         Eigen::MatrixXd& factor_inv) {
      if (M.rows() == 1) {
        double v = std::sqrt(std::max(M(0, 0), 1e-300));
        factor = Eigen::MatrixXd::Constant(1, 1, v);
        factor_inv = Eigen::MatrixXd::Constant(1, 1, 1.0 / v);
        return true;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
      if (es.info() != Eigen::Success) return false;
      double floor = 1e-14 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff());
      Eigen::VectorXd sqrt_lam = es.eigenvalues().cwiseMax(floor).cwiseSqrt();
      factor = es.eigenvectors() * sqrt_lam.asDiagonal();
      factor_inv = sqrt_lam.cwiseInverse().asDiagonal() *
                   es.eigenvectors().transpose();
      return true;
    };
    for (int j = 0; j < nb; ++j) {
      Eigen::MatrixXd fs, fs_inv, fz, fz_inv;
      if (!psd_factor(S[j], fs, fs_inv) || !psd_factor(Z[j], fz, fz_inv)) {
        scaling_ok = false;
        break;
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(fz.transpose() * fs,
                                            Eigen::ComputeFullU |
                                                Eigen::ComputeFullV);
      Eigen::VectorXd sv = svd.singularValues();
      if (!(sv.minCoeff() > 0.0)) {
        scaling_ok = false;
        break;
      }
      Eigen::VectorXd sqrt_sv = sv.cwiseSqrt();
      BlockScaling bs;
      bs.lambda = sv;
      bs.r = fs * svd.matrixV() * sqrt_sv.cwiseInverse().asDiagonal();
      bs.r_inv = sqrt_sv.asDiagonal() * svd.matrixV().transpose() * fs_inv;
      bs.w_inv = bs.r_inv.transpose() * bs.r_inv;
      scal[j] = std::move(bs);
    }
    if (!scaling_ok) {
      report.status = SolveStatus::numerical_failure;
      return report;
    }

    // Schur complement M_kl = sum_j <F_jk, W^{-1} F_jl W^{-1}>.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nv, nv);
    // Cache W^{-1} F_jl W^{-1} per block.
    for (int j = 0; j < nb; ++j) {
      const auto& b = prob.blocks[j];
      std::vector<Eigen::MatrixXd> wfw(nv);
      for (int l = 0; l < nv; ++l)
        if (b.coeff[l].size() > 0)
          wfw[l] = scal[j].w_inv * b.coeff[l] * scal[j].w_inv;
      for (int k = 0; k < nv; ++k) {
        if (b.coeff[k].size() == 0) continue;
        for (int l = k; l < nv; ++l) {
          if (b.coeff[l].size() == 0) continue;
          M(k, l) += (b.coeff[k].cwiseProduct(wfw[l])).sum();
        }
      }
    }
    M = M.selfadjointView<Eigen::Upper>();
    // Tikhonov ridge escalation: near convergence the Schur complement is
    // extremely ill conditioned; the direction only needs to be descent-like,
    // so a tiny ridge is preferable to aborting.
    Eigen::LDLT<Eigen::MatrixXd> m_fact(M);
    double ridge = 1e-14 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
    for (int tries = 0; m_fact.info() != Eigen::Success && tries < 6; ++tries) {
      M.diagonal().array() += ridge;
      ridge *= 100.0;
      m_fact.compute(M);
    }
    if (m_fact.info() != Eigen::Success) {
      report.status = SolveStatus::numerical_failure;
      return report;
    }

    // Direction solve for a given scaled complementarity target E per block.
    auto solve_direction = [&](const std::vector<Eigen::MatrixXd>& E,
                               Eigen::VectorXd& dx,
                               std::vector<Eigen::MatrixXd>& dS,
                               std::vector<Eigen::MatrixXd>& dZ) {
      Eigen::VectorXd rhs = -r_d;
      for (int j = 0; j < nb; ++j) {
        const auto& b = prob.blocks[j];
        Eigen::MatrixXd t1 = scal[j].r_inv.transpose() * E[j] * scal[j].r_inv;
        Eigen::MatrixXd t2 = scal[j].w_inv * r_p[j] * scal[j].w_inv;
        for (int k = 0; k < nv; ++k)
          if (b.coeff[k].size() > 0)
            rhs[k] += (b.coeff[k].cwiseProduct(t1 - t2)).sum();
      }
      dx = m_fact.solve(rhs);
      dS.resize(nb);
      dZ.resize(nb);
      for (int j = 0; j < nb; ++j) {
        const auto& b = prob.blocks[j];
        dS[j] = r_p[j];
        for (int k = 0; k < nv; ++k)
          if (b.coeff[k].size() > 0) dS[j] += dx[k] * b.coeff[k];
        Eigen::MatrixXd dz = scal[j].r_inv.transpose() * E[j] * scal[j].r_inv -
                             scal[j].w_inv * dS[j] * scal[j].w_inv;
        dZ[j] = 0.5 * (dz + dz.transpose());
      }
    };

    // Predictor: target 0, i.e. D = -Lambda^2, E = -Lambda.
    std::vector<Eigen::MatrixXd> E(nb);
    for (int j = 0; j < nb; ++j) {
      int dim = prob.blocks[j].dim;
      E[j] = Eigen::MatrixXd::Zero(dim, dim);
      E[j].diagonal() = -scal[j].lambda;
    }
    Eigen::VectorXd dx_a;
    std::vector<Eigen::MatrixXd> dS_a, dZ_a;
    solve_direction(E, dx_a, dS_a, dZ_a);

    double alpha_s = 1.0, alpha_z = 1.0;
    for (int j = 0; j < nb; ++j) {
      alpha_s = std::min(alpha_s, max_psd_step(S[j], dS_a[j], 1.0));
      alpha_z = std::min(alpha_z, max_psd_step(Z[j], dZ_a[j], 1.0));
    }
    double gap_aff = 0.0;
    for (int j = 0; j < nb; ++j)
      gap_aff += ((S[j] + alpha_s * dS_a[j]).cwiseProduct(Z[j] + alpha_z * dZ_a[j]))
                     .sum();
    double sigma = std::pow(std::max(0.0, gap_aff / gap), 3.0);
    sigma = std::min(1.0, std::max(1e-8, sigma));

    // Corrector: D = sigma mu I - Lambda^2 - sym(Shat Zhat).
    for (int j = 0; j < nb; ++j) {
      const auto& sc = scal[j];
      Eigen::MatrixXd s_hat = sc.r_inv * dS_a[j] * sc.r_inv.transpose();
      Eigen::MatrixXd z_hat = sc.r.transpose() * dZ_a[j] * sc.r;
      Eigen::MatrixXd cross = 0.5 * (s_hat * z_hat + z_hat * s_hat);
      int dim = prob.blocks[j].dim;
      Eigen::MatrixXd D = -cross;
      for (int a = 0; a < dim; ++a)
        D(a, a) += sigma * mu - sc.lambda[a] * sc.lambda[a];
      Eigen::MatrixXd Ej(dim, dim);
      for (int a = 0; a < dim; ++a)
        for (int bcol = 0; bcol < dim; ++bcol)
          Ej(a, bcol) = 2.0 * D(a, bcol) / (sc.lambda[a] + sc.lambda[bcol]);
      E[j] = Ej;
    }
    Eigen::VectorXd dx;
    std::vector<Eigen::MatrixXd> dS, dZ;
    solve_direction(E, dx, dS, dZ);

    alpha_s = options.step_fraction;
    alpha_z = options.step_fraction;
    for (int j = 0; j < nb; ++j) {
      alpha_s = std::min(alpha_s,
                         options.step_fraction * max_psd_step(S[j], dS[j], 10.0));
      alpha_z = std::min(alpha_z,
                         options.step_fraction * max_psd_step(Z[j], dZ[j], 10.0));
    }
    alpha_s = std::min(alpha_s, 1.0);
    alpha_z = std::min(alpha_z, 1.0);

    if (alpha_s < 1e-10 && alpha_z < 1e-10) {
      if (++stalls >= 3) {
        report.status = SolveStatus::numerical_failure;
        return report;
      }
    } else {
      stalls = 0;
    }

    x += alpha_s * dx;
    for (int j = 0; j < nb; ++j) {
      S[j] += alpha_s * dS[j];
      S[j] = 0.5 * (S[j] + S[j].transpose()).eval();
      floor_spectrum(S[j]);
      Z[j] += alpha_z * dZ[j];
      Z[j] = 0.5 * (Z[j] + Z[j].transpose()).eval();
      floor_spectrum(Z[j]);
    }
  }

  report.status = SolveStatus::max_iterations;
  return report;
}

}  // namespace randset
