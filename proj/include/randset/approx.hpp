#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "randset/geometry.hpp"
#include "randset/model.hpp"
#include "randset/nas_fit.hpp"
#include "randset/pas_fit.hpp"
#include "randset/scenario.hpp"
#include "randset/stream.hpp"

namespace randset {

// A sampler override: index -> point. Defaults draw uniformly from the
// model's boxes; callers with a different measure substitute their own.
using PointSampler = std::function<Eigen::VectorXd(long long index)>;

struct ApproxOptions {
  SetFamily family = SetFamily::ellipsoid;
  double epsilon = 0.1;
  double delta = 1e-3;
  int sigma = 4;                                 // PAS only
  std::optional<long long> fixed_num_samples;    // override the N rule
  std::optional<Box> pas_domain;                 // PAS only; default: sample
                                                 // bounding box inflated 1.1x
  std::uint64_t seed = 0;
  int threads = 1;
  double fit_tol = 1e-9;
  double sdp_tol = 1e-7;
  PointSampler state_sampler;                    // optional measure override
  PointSampler noise_sampler;
};

// Output of the randomized image-set approximation: the fitted set of the
// requested family with its a-priori scenario certificate and the
// construction cloud.
struct ApproximationResult {
  SetFamily family = SetFamily::ellipsoid;
  std::optional<NasSet> nas;
  std::optional<PasSet> pas;
  ScenarioCertificate certificate;
  std::vector<Eigen::VectorXd> cloud;
  std::optional<double> empirical_violation;
  std::optional<double> violation_std_error;
  std::optional<SolveReport> solver_report;  // PAS fits only
  double fit_seconds = 0.0;

  bool contains(const Eigen::VectorXd& x, double tol = kMembershipTol) const;
  double volume_or_estimate(std::uint64_t seed, long long mc_samples) const;
};

// Algorithm: draw N (x, w) pairs, map them through the dynamics, fit the
// minimum-volume set of the requested family, attach the certificate.
// Domain errors during construction abort with the failing sample index.
ApproximationResult approximate_image_set(const Model& model,
                                          const ApproxOptions& options);

struct ViolationEstimate {
  double fraction = 0.0;
  double standard_error = 0.0;
  long long domain_errors = 0;
};

// Fraction of M fresh mapped samples landing outside the set (plus binomial
// standard error). Samples whose dynamics evaluation fails count as
// violations.
ViolationEstimate estimate_violation(
    const std::function<bool(const Eigen::VectorXd&)>& member,
    const Model& model, long long num_samples, std::uint64_t seed,
    std::int64_t epoch = 1, int threads = 1);

ViolationEstimate estimate_violation(const ApproximationResult& result,
                                     const Model& model, long long num_samples,
                                     std::uint64_t seed, std::int64_t epoch = 1,
                                     int threads = 1);

}  // namespace randset
