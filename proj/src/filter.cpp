#include "randset/filter.hpp"

#include <atomic>
#include <chrono>

#include "randset/errors.hpp"
#include "randset/parallel.hpp"
#include "randset/sampling.hpp"

namespace randset {

long long FilterConfig::num_samples(int state_dim) const {
  if (fixed_num_samples) {
    if (*fixed_num_samples < 1)
      throw ConfigError("FilterConfig: fixed sample count must be >= 1");
    return *fixed_num_samples;
  }
  int d = design_dimension(family, state_dim);
  return required_samples_exact(epsilon, delta, d);
}

namespace {

struct Propagated {
  Eigen::VectorXd state;     // x_{k+1}
  bool domain_error = false;
  bool rejected = false;
};

// Maps candidate points through the dynamics and tests the measurement slab.
// Candidates with index < carried.size() reuse the carried points; the rest
// draw fresh samples from the current set. Deterministic per index.
void propagate_batch(const NasSet& current, const Model& model,
                     const std::vector<Eigen::VectorXd>& carried,
                     const Eigen::VectorXd* y_next, const Box* meas_box,
                     double meas_tol, std::uint64_t seed, std::int64_t epoch,
                     long long index_begin, long long index_end, int threads,
                     std::vector<Propagated>& out) {
  SampleStream state_stream{seed, epoch, Purpose::state_draw};
  SampleStream noise_stream{seed, epoch, Purpose::noise_draw};
  const long long carried_count = static_cast<long long>(carried.size());
  out.resize(index_end - index_begin);
  parallel_for(index_begin, index_end, threads, [&](long long i) {
    Propagated& slot = out[i - index_begin];
    Eigen::VectorXd x = i < carried_count
                            ? carried[i]
                            : sample_nas_one(current, state_stream, i);
    Eigen::VectorXd w = model.noise_dim() == 0
                            ? Eigen::VectorXd(0)
                            : sample_box_one(model.noise_box(), noise_stream, i);
    try {
      slot.state = model.eval_dynamics(x, w);
      if (y_next != nullptr) {
        Eigen::VectorXd z = *y_next - model.eval_measurement(slot.state);
        slot.rejected = !meas_box->contains(z, meas_tol);
      }
    } catch (const DomainError&) {
      slot.domain_error = true;
      slot.rejected = true;
    }
  });
}

}  // namespace

NasSet predict(const NasSet& current, const Model& model, long long num_samples,
               std::uint64_t seed, std::int64_t epoch, SetFamily family,
               int threads, double fit_tol) {
  if (num_samples < 1) throw ConfigError("predict: need at least one sample");
  std::vector<Propagated> propagated;
  propagate_batch(current, model, {}, nullptr, nullptr, 0.0, seed, epoch, 0,
                  num_samples, threads, propagated);
  std::vector<Eigen::VectorXd> mapped;
  mapped.reserve(propagated.size());
  for (const auto& p : propagated)
    if (!p.domain_error) mapped.push_back(p.state);
  if (mapped.empty())
    throw DomainError("predict: every propagated sample hit a domain error");
  return fit_nas(family, mapped, fit_tol);
}

NasSet predict_m_steps(const NasSet& current, const Model& model,
                       long long num_samples, int horizon, std::uint64_t seed,
                       std::int64_t epoch, SetFamily family, int threads,
                       double fit_tol) {
  if (horizon < 1) throw ConfigError("predict_m_steps: horizon must be >= 1");
  if (num_samples < 1)
    throw ConfigError("predict_m_steps: need at least one sample");
  SampleStream state_stream{seed, epoch, Purpose::state_draw};
  SampleStream noise_stream{seed, epoch, Purpose::noise_draw};
  std::vector<Eigen::VectorXd> mapped(num_samples);
  std::vector<char> ok(num_samples, 1);
  parallel_for(0, num_samples, threads, [&](long long i) {
    Eigen::VectorXd x = sample_nas_one(current, state_stream, i);
    try {
      for (int j = 0; j < horizon; ++j) {
        // Noise sample (i, j) uses the flat index i * m + j: m N draws total.
        Eigen::VectorXd w =
            model.noise_dim() == 0
                ? Eigen::VectorXd(0)
                : sample_box_one(model.noise_box(), noise_stream,
                                 i * static_cast<long long>(horizon) + j);
        x = model.eval_dynamics(x, w);
      }
      mapped[i] = x;
    } catch (const DomainError&) {
      ok[i] = 0;
    }
  });
  std::vector<Eigen::VectorXd> kept;
  kept.reserve(num_samples);
  for (long long i = 0; i < num_samples; ++i)
    if (ok[i]) kept.push_back(mapped[i]);
  if (kept.empty())
    throw DomainError("predict_m_steps: every sample hit a domain error");
  return fit_nas(family, kept, fit_tol);
}

RpcfStepResult rpcf_step(const NasSet& current, const Eigen::VectorXd& y_next,
                         const Model& model, const FilterConfig& config,
                         std::uint64_t seed, std::int64_t epoch,
                         const std::vector<Eigen::VectorXd>& carried) {
  if (!model.has_measurement())
    throw ConfigError("rpcf_step: model has no measurement map");
  if (y_next.size() != model.meas_dim())
    throw DimensionError("rpcf_step: measurement dimension");
  if (config.max_resample_attempts < 1)
    throw ConfigError("rpcf_step: attempt cap must be >= 1");

  auto t0 = std::chrono::steady_clock::now();
  const long long nominal = config.num_samples(model.state_dim());
  const Box& meas_box =
      epoch < static_cast<std::int64_t>(config.meas_noise_schedule.size())
          ? config.meas_noise_schedule[epoch]
          : model.meas_noise_box();

  RpcfStepResult result;
  StepRecord& rec = result.record;
  rec.step = static_cast<int>(epoch) + 1;
  rec.carried = std::min<long long>(static_cast<long long>(carried.size()),
                                    nominal);

  std::vector<Eigen::VectorXd> survivors;
  survivors.reserve(nominal);
  long long next_index = 0;
  const long long budget =
      static_cast<long long>(config.max_resample_attempts) * nominal;
  while (true) {
    long long deficit = nominal - static_cast<long long>(survivors.size());
    if (deficit <= 0) break;
    // Redraw batches sized by the observed acceptance rate so the survivor
    // count reaches N in a few rounds even when rejection is heavy. Entries
    // are consumed in index order and the tail of an over-sized batch is
    // dropped as if never drawn, keeping the counters exact.
    long long batch_size = deficit;
    if (next_index > 0) {
      double rate = static_cast<double>(survivors.size()) /
                    static_cast<double>(next_index);
      rate = std::max(rate,
                      1.0 / static_cast<double>(config.max_resample_attempts));
      batch_size = static_cast<long long>(std::ceil(1.2 * deficit / rate)) + 8;
    }
    batch_size = std::min(batch_size, budget - next_index);
    if (batch_size <= 0) break;
    std::vector<Propagated> batch;
    propagate_batch(current, model, carried, &y_next, &meas_box,
                    config.meas_tolerance, seed, epoch, next_index,
                    next_index + batch_size, config.threads, batch);
    for (auto& p : batch) {
      ++next_index;
      if (p.domain_error) {
        ++rec.domain_errors;
        ++rec.rejected;
      } else if (p.rejected) {
        ++rec.rejected;
      } else {
        survivors.push_back(std::move(p.state));
        if (static_cast<long long>(survivors.size()) == nominal) break;
      }
    }
    if (!config.resample) break;
  }

  rec.drawn = next_index;
  rec.fresh_drawn = next_index - rec.carried;
  rec.resampled = std::max<long long>(0, next_index - nominal);
  rec.used = static_cast<long long>(survivors.size());

  if (survivors.empty()) {
    rec.status = "measurement-inconsistent";
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return result;
  }

  NasSet fitted = fit_nas(config.family, survivors, config.fit_tol);
  rec.volume = fitted.volume();
  rec.log_volume = fitted.log_volume();
  rec.span_low.resize(model.state_dim());
  rec.span_high.resize(model.state_dim());
  for (int j = 0; j < model.state_dim(); ++j) {
    double extent = fitted.axis_extent(j);
    rec.span_low[j] = fitted.center()[j] - extent;
    rec.span_high[j] = fitted.center()[j] + extent;
  }
  rec.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  result.set = std::move(fitted);
  result.survivors = std::move(survivors);
  return result;
}

FilterTrace run_filter(const Model& model, const NasSet& initial,
                       const std::vector<Eigen::VectorXd>& measurements,
                       const FilterConfig& config, std::uint64_t seed) {
  if (measurements.empty())
    throw ConfigError("run_filter: need at least one measurement");
  if (initial.dim() != model.state_dim())
    throw DimensionError("run_filter: initial set dimension");

  FilterTrace trace;
  trace.initial = initial;
  trace.certificate = certificate_for(
      config.epsilon, config.delta,
      design_dimension(config.family, model.state_dim()),
      config.num_samples(model.state_dim()), config.fixed_num_samples.has_value());

  NasSet current = initial;
  std::vector<Eigen::VectorXd> carried;
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    RpcfStepResult step =
        rpcf_step(current, measurements[k], model, config, seed,
                  static_cast<std::int64_t>(k), config.reuse ? carried
                                                             : std::vector<Eigen::VectorXd>{});
    trace.steps.push_back(step.record);
    if (!step.set) {
      if (!config.continue_on_inconsistent) {
        trace.completed = false;
        return trace;
      }
      // Keep the prior set and carry on; the step record documents the gap.
      trace.sets.push_back(current);
      carried.clear();
      continue;
    }
    current = *step.set;
    trace.sets.push_back(current);
    carried = std::move(step.survivors);
  }
  return trace;
}

TruthTrajectory simulate_truth(const Model& model, const Eigen::VectorXd& x0,
                               int horizon, std::uint64_t seed) {
  if (horizon < 1) throw ConfigError("simulate_truth: horizon must be >= 1");
  if (x0.size() != model.state_dim())
    throw DimensionError("simulate_truth: initial state dimension");
  if (!model.initial_box().contains(x0, kMembershipTol))
    throw ConfigError("simulate_truth: x0 outside the initial box");
  if (!model.has_measurement())
    throw ConfigError("simulate_truth: model has no measurement map");

  TruthTrajectory out;
  out.states.push_back(x0);
  Eigen::VectorXd x = x0;
  for (int k = 0; k < horizon; ++k) {
    Eigen::VectorXd w =
        model.noise_dim() == 0
            ? Eigen::VectorXd(0)
            : sample_box_one(model.noise_box(),
                             SampleStream{seed, k, Purpose::truth_noise}, 0);
    try {
      x = model.eval_dynamics(x, w);
    } catch (const DomainError& e) {
      throw DomainError("simulate_truth: step " + std::to_string(k + 1) + ": " +
                        e.what());
    }
    out.states.push_back(x);
    Eigen::VectorXd v = sample_box_one(
        model.meas_noise_box(), SampleStream{seed, k + 1, Purpose::meas_noise_draw},
        0);
    out.measurements.push_back(model.eval_measurement(x) + v);
  }
  return out;
}

}  // namespace randset
