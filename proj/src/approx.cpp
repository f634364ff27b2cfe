#include "randset/approx.hpp"

#include <atomic>
#include <chrono>

#include "randset/errors.hpp"
#include "randset/parallel.hpp"
#include "randset/sampling.hpp"

namespace randset {

bool ApproximationResult::contains(const Eigen::VectorXd& x, double tol) const {
  if (nas) return nas->contains(x, tol);
  if (pas) return pas->contains(x, tol);
  throw ConfigError("ApproximationResult: empty");
}

double ApproximationResult::volume_or_estimate(std::uint64_t seed,
                                               long long mc_samples) const {
  if (nas) return nas->volume();
  if (pas)
    return pas_volume_estimate(*pas, SampleStream{seed, 0, Purpose::pas_reject},
                               mc_samples)
        .volume;
  throw ConfigError("ApproximationResult: empty");
}

ApproximationResult approximate_image_set(const Model& model,
                                          const ApproxOptions& options) {
  if (!(options.epsilon > 0.0 && options.epsilon < 1.0))
    throw ConfigError("approximate_image_set: epsilon must lie in (0,1)");
  if (!(options.delta > 0.0 && options.delta < 1.0))
    throw ConfigError("approximate_image_set: delta must lie in (0,1)");

  const int n = model.state_dim();
  const int dim = design_dimension(options.family, n,
                                   options.family == SetFamily::pas
                                       ? options.sigma
                                       : -1);
  long long num_samples = options.fixed_num_samples
                              ? *options.fixed_num_samples
                              : required_samples_exact(options.epsilon,
                                                       options.delta, dim);
  if (num_samples < 1)
    throw ConfigError("approximate_image_set: sample count must be >= 1");

  SampleStream state_stream{options.seed, 0, Purpose::state_draw};
  SampleStream noise_stream{options.seed, 0, Purpose::noise_draw};

  std::vector<Eigen::VectorXd> mapped(num_samples);
  std::atomic<long long> first_failure{-1};
  std::string failure_message;
  std::mutex failure_mutex;
  parallel_for(0, num_samples, options.threads, [&](long long i) {
    Eigen::VectorXd x = options.state_sampler
                            ? options.state_sampler(i)
                            : sample_box_one(model.initial_box(), state_stream, i);
    Eigen::VectorXd w =
        model.noise_dim() == 0
            ? Eigen::VectorXd(0)
            : (options.noise_sampler
                   ? options.noise_sampler(i)
                   : sample_box_one(model.noise_box(), noise_stream, i));
    try {
      mapped[i] = model.eval_dynamics(x, w);
    } catch (const DomainError& e) {
      long long expected = -1;
      if (first_failure.compare_exchange_strong(expected, i)) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure_message = e.what();
      }
    }
  });
  if (first_failure.load() >= 0)
    throw DomainError("approximate_image_set: dynamics domain error at sample " +
                      std::to_string(first_failure.load()) + ": " +
                      failure_message);

  ApproximationResult result;
  result.family = options.family;
  result.cloud = mapped;
  result.certificate =
      certificate_for(options.epsilon, options.delta, dim, num_samples,
                      options.fixed_num_samples.has_value());

  auto t0 = std::chrono::steady_clock::now();
  if (options.family == SetFamily::pas) {
    Box domain = options.pas_domain ? *options.pas_domain
                                    : Box::bounding(mapped).inflated(1.1);
    PasFitResult fit = fit_pas(mapped, domain, options.sigma, options.sdp_tol);
    result.pas = std::move(fit.set);
    result.solver_report = fit.report;
  } else {
    result.nas = fit_nas(options.family, mapped, options.fit_tol);
  }
  result.fit_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

ViolationEstimate estimate_violation(
    const std::function<bool(const Eigen::VectorXd&)>& member,
    const Model& model, long long num_samples, std::uint64_t seed,
    std::int64_t epoch, int threads) {
  if (num_samples < 1)
    throw ConfigError("estimate_violation: need at least one sample");
  SampleStream state_stream{seed, epoch, Purpose::validate_state};
  SampleStream noise_stream{seed, epoch, Purpose::validate_noise};
  std::atomic<long long> violations{0};
  std::atomic<long long> domain_errors{0};
  parallel_for(0, num_samples, threads, [&](long long i) {
    Eigen::VectorXd x = sample_box_one(model.initial_box(), state_stream, i);
    Eigen::VectorXd w = model.noise_dim() == 0
                            ? Eigen::VectorXd(0)
                            : sample_box_one(model.noise_box(), noise_stream, i);
    try {
      Eigen::VectorXd mapped = model.eval_dynamics(x, w);
      if (!member(mapped)) violations.fetch_add(1);
    } catch (const DomainError&) {
      // Conservative: a sample the dynamics cannot map counts as violating.
      violations.fetch_add(1);
      domain_errors.fetch_add(1);
    }
  });
  double p = static_cast<double>(violations.load()) /
             static_cast<double>(num_samples);
  ViolationEstimate est;
  est.fraction = p;
  est.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(num_samples));
  est.domain_errors = domain_errors.load();
  return est;
}

ViolationEstimate estimate_violation(const ApproximationResult& result,
                                     const Model& model, long long num_samples,
                                     std::uint64_t seed, std::int64_t epoch,
                                     int threads) {
  return estimate_violation(
      [&result](const Eigen::VectorXd& x) { return result.contains(x); }, model,
      num_samples, seed, epoch, threads);
}

}  // namespace randset
