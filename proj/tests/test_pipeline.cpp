#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "randset/approx.hpp"
#include "randset/errors.hpp"
#include "randset/filter.hpp"
#include "randset/sampling.hpp"

using namespace randset;

namespace {

Box box2(double lo, double hi) {
  return Box(Eigen::VectorXd::Constant(2, lo), Eigen::VectorXd::Constant(2, hi));
}

Model identity_model() {
  std::vector<Expression> f = {parse_expression("x1"), parse_expression("x2")};
  return Model(2, 0, 0, std::move(f), {}, box2(0, 1),
               Box(Eigen::VectorXd(0), Eigen::VectorXd(0)),
               Box(Eigen::VectorXd(0), Eigen::VectorXd(0)), "identity");
}

Model shift_model() {
  // x+ = x + w with a degenerate (point-mass) noise box at the origin.
  std::vector<Expression> f = {parse_expression("x1 + w1"),
                               parse_expression("x2 + w2")};
  return Model(2, 2, 0, std::move(f), {}, box2(0, 1), box2(0, 0),
               Box(Eigen::VectorXd(0), Eigen::VectorXd(0)), "shift");
}

Model double_model() {
  std::vector<Expression> f = {parse_expression("2*x1"), parse_expression("2*x2")};
  return Model(2, 0, 0, std::move(f), {}, box2(-3, 3),
               Box(Eigen::VectorXd(0), Eigen::VectorXd(0)),
               Box(Eigen::VectorXd(0), Eigen::VectorXd(0)), "double");
}

Model random_walk_model() {
  std::vector<Expression> f = {parse_expression("x1 + w1"),
                               parse_expression("x2 + w2")};
  return Model(2, 2, 0, std::move(f), {}, box2(-0.1, 0.1), box2(-1, 1),
               Box(Eigen::VectorXd(0), Eigen::VectorXd(0)), "walk");
}

}  // namespace

TEST_CASE("approximate_image_set: identity map with a box fit") {
  Model m = identity_model();
  ApproxOptions opt;
  opt.family = SetFamily::hyperrectangle;
  opt.epsilon = 0.1;
  opt.delta = 1e-3;
  opt.seed = 5;
  auto result = approximate_image_set(m, opt);
  REQUIRE(result.nas.has_value());
  // Fitted box is the sample min/max: inside the unit square.
  for (const auto& p : result.cloud) CHECK(result.contains(p, 1e-9));
  Box unit = box2(0, 1);
  CHECK(unit.contains(result.nas->center(), 1e-9));
  CHECK(result.nas->volume() <= 1.0 + 1e-9);

  auto violation = estimate_violation(result, m, 100000, opt.seed);
  CHECK(violation.fraction <= opt.epsilon);

  // Certificate stores the exact-inversion N.
  CHECK(result.certificate.num_samples ==
        required_samples_exact(0.1, 1e-3, 4));
  CHECK(result.certificate.epsilon == 0.1);
}

TEST_CASE("approximate_image_set: degenerate noise equals the identity run") {
  ApproxOptions opt;
  opt.family = SetFamily::hyperrectangle;
  opt.seed = 17;
  auto a = approximate_image_set(identity_model(), opt);
  auto b = approximate_image_set(shift_model(), opt);
  CHECK((a.nas->center() - b.nas->center()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.nas->shape() - b.nas->shape()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("approximate_image_set: determinism and thread independence") {
  Model m = builtin_model("sysF");
  ApproxOptions opt;
  opt.family = SetFamily::ellipsoid;
  opt.fixed_num_samples = 200;
  opt.seed = 7;
  opt.threads = 1;
  auto a = approximate_image_set(m, opt);
  opt.threads = 4;
  auto b = approximate_image_set(m, opt);
  CHECK((a.nas->center() - b.nas->center()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.nas->shape() - b.nas->shape()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.cloud.size() == 200);
  for (size_t i = 0; i < a.cloud.size(); ++i)
    CHECK((a.cloud[i] - b.cloud[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("approximate_image_set: sysF ellipsoid with N = 200") {
  Model m = builtin_model("sysF");
  ApproxOptions opt;
  opt.family = SetFamily::ellipsoid;
  opt.fixed_num_samples = 200;
  opt.seed = 3;
  auto result = approximate_image_set(m, opt);
  REQUIRE(result.nas.has_value());
  for (const auto& p : result.cloud) CHECK(result.contains(p, 1e-6));
  // The fixed-N certificate reports the implied risk at delta = 1e-3.
  CHECK(result.certificate.num_samples == 200);
  CHECK(violation_tail(result.certificate.epsilon, 200, 5) <= 1e-3);
  // Fresh-sample violation comfortably below the implied epsilon.
  auto violation = estimate_violation(result, m, 200000, opt.seed);
  CHECK(violation.fraction < result.certificate.epsilon);
}

TEST_CASE("approximate_image_set: user-supplied sampler overrides the measure") {
  // A custom sampler concentrating x on the box diagonal.
  Model m = identity_model();
  ApproxOptions opt;
  opt.family = SetFamily::hyperrectangle;
  opt.fixed_num_samples = 64;
  opt.seed = 23;
  opt.state_sampler = [&](long long index) {
    CounterRng rng(opt.seed, 0, index, Purpose::state_draw);
    double t = rng.uniform01();
    return Eigen::VectorXd::Constant(2, t).eval();
  };
  auto result = approximate_image_set(m, opt);
  // Every mapped point sits on the diagonal, so the fitted box does too.
  for (const auto& p : result.cloud) CHECK(p[0] == p[1]);
  CHECK(result.nas->center()[0] == doctest::Approx(result.nas->center()[1]));
}

TEST_CASE("approximate_image_set: fixed N below d degrades the certificate") {
  Model m = identity_model();
  ApproxOptions opt;
  opt.family = SetFamily::hyperrectangle;  // d = 4
  opt.fixed_num_samples = 3;
  opt.seed = 8;
  auto result = approximate_image_set(m, opt);
  CHECK(result.certificate.method ==
        ScenarioCertificate::Method::explicit_bound);
  CHECK(result.certificate.dimension == 3);  // capped at N
  CHECK(result.certificate.epsilon == 1.0);  // vacuous, flagged by the method
}

TEST_CASE("approximate_image_set: construction domain error aborts with index") {
  // log(x1 - 0.5) fails for half of X; construction must abort (validation
  // would instead count such samples as violations).
  std::vector<Expression> f = {parse_expression("log(x1 - 0.5)"),
                               parse_expression("x2")};
  Model m(2, 0, 0, std::move(f), {}, box2(0.4, 1),
          Box(Eigen::VectorXd(0), Eigen::VectorXd(0)),
          Box(Eigen::VectorXd(0), Eigen::VectorXd(0)), "partial");
  ApproxOptions opt;
  opt.family = SetFamily::hyperrectangle;
  opt.fixed_num_samples = 50;
  opt.seed = 2;
  try {
    approximate_image_set(m, opt);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("sample") != std::string::npos);
    CHECK(std::string(e.what()).find("log") != std::string::npos);
  }
}

TEST_CASE("estimate_violation: trivial set memberships") {
  Model m = identity_model();
  auto everything = estimate_violation(
      [](const Eigen::VectorXd&) { return true; }, m, 5000, 1);
  CHECK(everything.fraction == 0.0);
  auto nothing = estimate_violation(
      [](const Eigen::VectorXd&) { return false; }, m, 5000, 1);
  CHECK(nothing.fraction == 1.0);
  // Same seed twice: identical fraction.
  auto again = estimate_violation(
      [](const Eigen::VectorXd&) { return false; }, m, 5000, 1);
  CHECK(again.fraction == nothing.fraction);
}

TEST_CASE("predict: identity dynamics roughly preserves the set") {
  Model m = identity_model();
  NasSet disc(Eigen::VectorXd::Constant(2, 0.5),
              4.0 * Eigen::MatrixXd::Identity(2, 2), NormP::l2);
  NasSet next = predict(disc, m, 200, 11, 0);
  // Containment of most fresh samples from the source set.
  SampleStream stream{999, 0, Purpose::validate_state};
  long long inside = 0;
  const long long total = 100000;
  for (const auto& x : sample_nas(disc, stream, total))
    if (next.contains(x, 1e-9)) ++inside;
  CHECK(static_cast<double>(inside) / total >= 0.9);
}

TEST_CASE("predict: linear doubling map scales the fitted volume by 4") {
  Model m = double_model();
  NasSet disc(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2),
              NormP::l2);
  NasSet next = predict(disc, m, 400, 21, 0);
  CHECK(next.volume() == doctest::Approx(4.0 * M_PI).epsilon(0.10));
}

TEST_CASE("predict_m_steps: one step equals predict, spans grow with m") {
  Model m = random_walk_model();
  NasSet start(Eigen::VectorXd::Zero(2), 20.0 * Eigen::MatrixXd::Identity(2, 2),
               NormP::l2);
  NasSet one = predict(start, m, 150, 5, 0, SetFamily::hyperrectangle);
  NasSet one_via_m = predict_m_steps(start, m, 150, 1, 5, 0,
                                     SetFamily::hyperrectangle);
  CHECK((one.center() - one_via_m.center()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((one.shape() - one_via_m.shape()).cwiseAbs().maxCoeff() == 0.0);

  // Random-walk support grows linearly in the horizon.
  double extent3 = predict_m_steps(start, m, 400, 3, 5, 0,
                                   SetFamily::hyperrectangle)
                       .axis_extent(0);
  double extent6 = predict_m_steps(start, m, 400, 6, 5, 0,
                                   SetFamily::hyperrectangle)
                       .axis_extent(0);
  CHECK(extent6 / extent3 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("rpcf_step: vacuous measurement keeps all samples") {
  Model m = builtin_model("abrc08");
  NasSet start(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2),
               NormP::l2);
  FilterConfig cfg;
  cfg.fixed_num_samples = 120;
  // A huge measurement-noise box makes rejection vacuous.
  cfg.meas_noise_schedule = {Box(Eigen::VectorXd::Constant(1, -1e9),
                                 Eigen::VectorXd::Constant(1, 1e9))};
  Eigen::VectorXd y(1);
  y << 0.0;
  auto step = rpcf_step(start, y, m, cfg, 31, 0);
  REQUIRE(step.set.has_value());
  CHECK(step.record.rejected == 0);
  CHECK(step.record.used == 120);
  CHECK(step.record.drawn == 120);
  CHECK(step.record.resampled == 0);

  // Identical to predict under the same stream.
  NasSet pred = predict(start, m, 120, 31, 0);
  CHECK((pred.center() - step.set->center()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pred.shape() - step.set->shape()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rpcf_step: survivors satisfy the measurement slab") {
  Model m = builtin_model("abrc08");
  Eigen::VectorXd x0(2);
  x0 << 0.6, 0.07;
  auto truth = simulate_truth(m, x0, 1, 99);
  NasSet start(x0, Eigen::MatrixXd::Identity(2, 2) / 2.0, NormP::l2);
  FilterConfig cfg;
  cfg.fixed_num_samples = 150;
  auto step = rpcf_step(start, truth.measurements[0], m, cfg, 42, 0);
  REQUIRE(step.set.has_value());
  CHECK(step.record.used > 0);
  double y = truth.measurements[0][0];
  for (const auto& s : step.survivors)
    CHECK(std::abs(y - s[0] - s[1]) <= 0.2 + 1e-9);

  // A wildly inconsistent measurement forces total rejection.
  Eigen::VectorXd absurd(1);
  absurd << 1e6;
  auto bad = rpcf_step(start, absurd, m, cfg, 42, 0);
  CHECK_FALSE(bad.set.has_value());
  CHECK(bad.record.status == "measurement-inconsistent");
  CHECK(bad.record.used == 0);
}

TEST_CASE("rpcf_step: resampling tops survivors up to N") {
  Model m = builtin_model("abrc08");
  Eigen::VectorXd x0(2);
  x0 << 0.6, 0.07;
  auto truth = simulate_truth(m, x0, 1, 7);
  // Large initial set: plenty of rejections at step one.
  NasSet start(x0, Eigen::MatrixXd::Identity(2, 2) / 6.8, NormP::l2);
  FilterConfig cfg;
  cfg.fixed_num_samples = 150;
  cfg.resample = true;
  auto with = rpcf_step(start, truth.measurements[0], m, cfg, 13, 0);
  REQUIRE(with.set.has_value());
  CHECK(with.record.used == 150);
  CHECK(with.record.resampled == with.record.drawn - 150);
  CHECK(with.record.rejected > 0);

  cfg.resample = false;
  auto without = rpcf_step(start, truth.measurements[0], m, cfg, 13, 0);
  CHECK(without.record.drawn == 150);
  CHECK(without.record.used == 150 - without.record.rejected);
}

TEST_CASE("re-use: fresh draws equal N minus carried survivors") {
  Model m = builtin_model("abrc08");
  Eigen::VectorXd x0(2);
  x0 << 0.6, 0.07;
  auto truth = simulate_truth(m, x0, 3, 70);
  NasSet start(x0, Eigen::MatrixXd::Identity(2, 2) / 2.0, NormP::l2);
  FilterConfig cfg;
  cfg.fixed_num_samples = 100;
  cfg.reuse = true;
  FilterTrace trace = run_filter(m, start, truth.measurements, cfg, 70);
  REQUIRE(trace.completed);
  REQUIRE(trace.num_steps() == 3);
  // After the first step, carried survivors reduce the fresh draws.
  for (int k = 1; k < 3; ++k) {
    const StepRecord& prev = trace.steps[k - 1];
    const StepRecord& rec = trace.steps[k];
    long long carried = std::min<long long>(prev.used, 100);
    CHECK(rec.carried == carried);
    // Initial batch draws only the deficit; resampling may add more.
    CHECK(rec.fresh_drawn >= 100 - carried);
    CHECK(rec.drawn - rec.rejected == rec.used);
  }
}

TEST_CASE("run_filter: trace bookkeeping and determinism") {
  Model m = builtin_model("abrc08");
  Eigen::VectorXd x0(2);
  x0 << 0.6, 0.07;
  auto truth = simulate_truth(m, x0, 5, 123);
  NasSet start(x0, Eigen::MatrixXd::Identity(2, 2) / 6.8, NormP::l2);
  FilterConfig cfg;
  cfg.epsilon = 0.1;
  cfg.delta = 1e-3;
  FilterTrace trace = run_filter(m, start, truth.measurements, cfg, 9);
  REQUIRE(trace.completed);
  REQUIRE(trace.num_steps() == 5);
  for (const auto& rec : trace.steps) {
    CHECK(rec.used == rec.drawn - rec.rejected);
    CHECK(std::isfinite(rec.log_volume));
    CHECK(rec.span_low.size() == 2);
  }
  // Determinism, including under a different worker count.
  FilterConfig cfg4 = cfg;
  cfg4.threads = 4;
  FilterTrace again = run_filter(m, start, truth.measurements, cfg4, 9);
  REQUIRE(again.num_steps() == trace.num_steps());
  for (int k = 0; k < 5; ++k) {
    CHECK(again.steps[k].log_volume == trace.steps[k].log_volume);
    CHECK((again.sets[k].center() - trace.sets[k].center())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("run_filter: exact measurements shrink spans") {
  // Noise-free rotation with a tight scalar measurement: every step observes
  // a new direction of the state, so the set contracts toward the truth.
  std::vector<Expression> f = {
      parse_expression("0.8660254037844387*x1 - 0.5*x2"),
      parse_expression("0.5*x1 + 0.8660254037844387*x2")};
  std::vector<Expression> g = {parse_expression("x1")};
  Model m(2, 0, 1, std::move(f), std::move(g), box2(-5, 5),
          Box(Eigen::VectorXd(0), Eigen::VectorXd(0)),
          Box(Eigen::VectorXd::Constant(1, -0.05),
              Eigen::VectorXd::Constant(1, 0.05)));
  Eigen::VectorXd x0(2);
  x0 << 1.0, -0.5;
  auto truth = simulate_truth(m, x0, 11, 55);
  NasSet start(Eigen::VectorXd::Zero(2),
               Eigen::MatrixXd::Identity(2, 2) / 4.0, NormP::l2);
  FilterConfig cfg;
  cfg.fixed_num_samples = 300;
  FilterTrace trace = run_filter(m, start, truth.measurements, cfg, 66);
  REQUIRE(trace.completed);
  double span0 = trace.steps[0].span_high[0] - trace.steps[0].span_low[0];
  double span10 = trace.steps[10].span_high[0] - trace.steps[10].span_low[0];
  CHECK(span10 < span0);
  // The realized state stays inside the filtered sets.
  long long contained = 0;
  for (int k = 0; k < 11; ++k)
    if (trace.sets[k].contains(truth.states[k + 1], 1e-9)) ++contained;
  CHECK(contained >= 9);
}

TEST_CASE("simulate_truth: zero-noise hand evaluation and determinism") {
  Model m = builtin_model("abrc08");
  // Zero-width noise boxes reproduce the deterministic map.
  std::vector<Expression> f = {
      parse_expression("-0.7*x2 + 0.1*x2^2 + 0.1*x1*x2 + 0.1*exp(x1) + w1"),
      parse_expression("x1 + x2 - 0.1*x1^2 + 0.2*x1*x2 + w2")};
  std::vector<Expression> g = {parse_expression("x1 + x2")};
  Model noiseless(2, 2, 1, std::move(f), std::move(g), box2(-3, 3), box2(0, 0),
                  Box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)));
  Eigen::VectorXd x0(2);
  x0 << 0.6, 0.07;
  auto truth = simulate_truth(noiseless, x0, 1, 1);
  double f1 = -0.7 * 0.07 + 0.1 * 0.07 * 0.07 + 0.1 * 0.6 * 0.07 +
              0.1 * std::exp(0.6);
  double f2 = 0.6 + 0.07 - 0.1 * 0.36 + 0.2 * 0.6 * 0.07;
  CHECK(truth.states[1][0] == doctest::Approx(f1).epsilon(1e-12));
  CHECK(truth.states[1][1] == doctest::Approx(f2).epsilon(1e-12));
  CHECK(truth.measurements[0][0] ==
        doctest::Approx(truth.states[1].sum()).epsilon(1e-12));

  auto a = simulate_truth(m, x0, 10, 5);
  auto b = simulate_truth(m, x0, 10, 5);
  for (int k = 0; k <= 10; ++k)
    CHECK((a.states[k] - b.states[k]).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd outside(2);
  outside << 9.0, 0.0;
  CHECK_THROWS_AS(simulate_truth(m, outside, 3, 1), ConfigError);
}
