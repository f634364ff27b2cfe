#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "randset/geometry.hpp"
#include "randset/scenario.hpp"

namespace randset {

// Diagnostics shared by the NAS fitters.
struct NasFitInfo {
  bool regularized = false;   // jitter points were added for degenerate data
  int jitter_points = 0;
  std::string warning;
};

// Minimum-volume ellipsoid (p = 2) around the points. Degenerate clouds are
// regularized by an isotropic jitter ball of radius 1e-9 * data scale before
// failing.
NasSet fit_ellipsoid(const std::vector<Eigen::VectorXd>& points,
                     double tol = 1e-9, NasFitInfo* info = nullptr);

// Componentwise min/max box (diagonal P, p = inf); zero-width coordinates get
// the degeneracy floor 1e-9 * max(1, |coordinate|).
NasSet fit_hyperrectangle(const std::vector<Eigen::VectorXd>& points,
                          NasFitInfo* info = nullptr);

// Minimum-volume elementary parallelotope (full symmetric P, p = inf) via the
// barrier maxdet path over -1 <= (P x^(i) - Pc)_j <= 1.
NasSet fit_parallelotope(const std::vector<Eigen::VectorXd>& points,
                         double tol = 1e-9, NasFitInfo* info = nullptr);

// Minimum-volume diagonal cross-polytope (diagonal P, p = 1). The feasible
// set is polyhedral (sign-enumerated rows); an LP margin maximization seeds
// the barrier Newton solve of the exact log-volume objective.
NasSet fit_l1_diag(const std::vector<Eigen::VectorXd>& points,
                   double tol = 1e-9, NasFitInfo* info = nullptr);

// Dispatch on family (PAS excluded; see pas_fit.hpp).
NasSet fit_nas(SetFamily family, const std::vector<Eigen::VectorXd>& points,
               double tol = 1e-9, NasFitInfo* info = nullptr);

}  // namespace randset
