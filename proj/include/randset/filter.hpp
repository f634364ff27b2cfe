#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "randset/geometry.hpp"
#include "randset/model.hpp"
#include "randset/nas_fit.hpp"
#include "randset/scenario.hpp"
#include "randset/stream.hpp"

namespace randset {

struct FilterConfig {
  SetFamily family = SetFamily::ellipsoid;
  double epsilon = 0.1;
  double delta = 1e-3;
  // Exactly one N policy: fixed count when set, otherwise the exact tail
  // inversion at (epsilon, delta, d).
  std::optional<long long> fixed_num_samples;
  double meas_tolerance = 1e-9;  // closed box test on z = y - g(x)
  bool resample = true;          // redraw rejected samples up to the cap
  bool reuse = false;            // carry surviving points into the next step
  int max_resample_attempts = 100;
  bool continue_on_inconsistent = false;
  int threads = 1;
  double fit_tol = 1e-9;
  // Optional per-step measurement-noise boxes overriding the model's V.
  std::vector<Box> meas_noise_schedule;

  long long num_samples(int state_dim) const;
};

struct StepRecord {
  int step = 0;                  // index k+1 of the fitted set
  long long drawn = 0;           // candidates processed (carried + fresh)
  long long fresh_drawn = 0;
  long long carried = 0;
  long long rejected = 0;        // measurement-inconsistent + domain errors
  long long domain_errors = 0;
  long long resampled = 0;       // fresh draws beyond the nominal N
  long long used = 0;            // survivors the fit was built on
  double volume = 0.0;
  double log_volume = 0.0;
  Eigen::VectorXd span_low, span_high;  // exact axis spans of the fitted set
  std::string status = "ok";            // or "measurement-inconsistent"
  double seconds = 0.0;
};

struct RpcfStepResult {
  std::optional<NasSet> set;  // absent when the measurement was inconsistent
  StepRecord record;
  std::vector<Eigen::VectorXd> survivors;  // for the re-use policy
};

// One prediction step: draw N points from the current set and N noise
// samples, map them, fit the configured family.
NasSet predict(const NasSet& current, const Model& model, long long num_samples,
               std::uint64_t seed, std::int64_t epoch,
               SetFamily family = SetFamily::ellipsoid, int threads = 1,
               double fit_tol = 1e-9);

// m-step ahead prediction in one shot: N state samples, m*N noise samples,
// one fit at the end.
NasSet predict_m_steps(const NasSet& current, const Model& model,
                       long long num_samples, int horizon, std::uint64_t seed,
                       std::int64_t epoch,
                       SetFamily family = SetFamily::ellipsoid, int threads = 1,
                       double fit_tol = 1e-9);

// One prediction-correction step against the measurement y_{k+1}.
RpcfStepResult rpcf_step(const NasSet& current, const Eigen::VectorXd& y_next,
                         const Model& model, const FilterConfig& config,
                         std::uint64_t seed, std::int64_t epoch,
                         const std::vector<Eigen::VectorXd>& carried = {});

struct FilterTrace {
  NasSet initial;
  ScenarioCertificate certificate;
  std::vector<StepRecord> steps;
  std::vector<NasSet> sets;  // fitted set per completed step
  bool completed = true;

  long long num_steps() const { return static_cast<long long>(steps.size()); }
};

// Runs rpcf_step over the measurement sequence. On "measurement
// inconsistent" the trace is returned partially unless the config says to
// continue (the step then keeps every propagated sample).
FilterTrace run_filter(const Model& model, const NasSet& initial,
                       const std::vector<Eigen::VectorXd>& measurements,
                       const FilterConfig& config, std::uint64_t seed);

struct TruthTrajectory {
  std::vector<Eigen::VectorXd> states;        // x_0 .. x_K
  std::vector<Eigen::VectorXd> measurements;  // y_1 .. y_K
};

// Simulates a realized trajectory with uniform process and measurement noise
// under dedicated substreams of the same seed.
TruthTrajectory simulate_truth(const Model& model, const Eigen::VectorXd& x0,
                               int horizon, std::uint64_t seed);

}  // namespace randset
