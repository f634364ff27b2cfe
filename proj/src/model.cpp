#include "randset/model.hpp"

#include "randset/errors.hpp"

namespace randset {

Model::Model(int state_dim, int noise_dim, int meas_dim,
             std::vector<Expression> dynamics,
             std::vector<Expression> measurement, Box initial_box,
             Box noise_box, Box meas_noise_box, std::string name)
    : state_dim_(state_dim),
      noise_dim_(noise_dim),
      meas_dim_(meas_dim),
      dynamics_(std::move(dynamics)),
      measurement_(std::move(measurement)),
      initial_box_(std::move(initial_box)),
      noise_box_(std::move(noise_box)),
      meas_noise_box_(std::move(meas_noise_box)),
      name_(std::move(name)) {
  if (state_dim_ < 1) throw ConfigError("Model: state dimension must be >= 1");
  if (noise_dim_ < 0 || meas_dim_ < 0) throw ConfigError("Model: bad dimensions");
  if (static_cast<int>(dynamics_.size()) != state_dim_)
    throw ConfigError("Model: one dynamics expression per state component");
  if (static_cast<int>(measurement_.size()) != meas_dim_)
    throw ConfigError("Model: one measurement expression per output");
  if (initial_box_.dim() != state_dim_)
    throw DimensionError("Model: initial box dimension");
  if (noise_box_.dim() != noise_dim_)
    throw DimensionError("Model: noise box dimension");
  if (meas_noise_box_.dim() != meas_dim_)
    throw DimensionError("Model: measurement-noise box dimension");
  for (const auto& e : dynamics_) {
    if (e.state_arity() > state_dim_)
      throw ConfigError("Model: dynamics reference x beyond the state dimension");
    if (e.noise_arity() > noise_dim_)
      throw ConfigError("Model: dynamics reference w beyond the noise dimension");
  }
  for (const auto& e : measurement_) {
    if (e.state_arity() > state_dim_)
      throw ConfigError("Model: measurement references x beyond the state dimension");
    if (e.noise_arity() > 0)
      throw ConfigError("Model: measurement expressions may only use x");
  }
  // Evaluation at the box centers must be finite.
  Eigen::VectorXd xc = initial_box_.center();
  Eigen::VectorXd wc = noise_box_.center();
  (void)eval_dynamics(xc, wc);
  if (meas_dim_ > 0) (void)eval_measurement(xc);
}

Eigen::VectorXd Model::eval_dynamics(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& w) const {
  if (x.size() != state_dim_) throw DimensionError("eval_dynamics: state size");
  if (w.size() != noise_dim_) throw DimensionError("eval_dynamics: noise size");
  Eigen::VectorXd out(state_dim_);
  for (int i = 0; i < state_dim_; ++i) {
    try {
      out[i] = dynamics_[i].evaluate(x, w);
    } catch (const DomainError& e) {
      throw DomainError("dynamics component " + std::to_string(i + 1) + ": " +
                        e.what());
    }
  }
  return out;
}

Eigen::VectorXd Model::eval_measurement(const Eigen::VectorXd& x) const {
  if (x.size() != state_dim_) throw DimensionError("eval_measurement: state size");
  static const Eigen::VectorXd kNoNoise;
  Eigen::VectorXd out(meas_dim_);
  for (int i = 0; i < meas_dim_; ++i) {
    try {
      out[i] = measurement_[i].evaluate(x, kNoNoise);
    } catch (const DomainError& e) {
      throw DomainError("measurement component " + std::to_string(i + 1) +
                        ": " + e.what());
    }
  }
  return out;
}

Model builtin_model(const std::string& name) {
  auto box2 = [](double lo, double hi) {
    return Box(Eigen::VectorXd::Constant(2, lo), Eigen::VectorXd::Constant(2, hi));
  };
  if (name == "sysF") {
    std::vector<Expression> f = {
        parse_expression("sin(x2) + 3*cos(x2) + w1"),
        parse_expression("3*x1 - 20*log(1 + x2) + w2"),
    };
    return Model(2, 2, 0, std::move(f), {}, box2(0.0, 1.0), box2(-0.2, 0.2),
                 Box(Eigen::VectorXd(0), Eigen::VectorXd(0)), "sysF");
  }
  if (name == "abrc08") {
    std::vector<Expression> f = {
        parse_expression(
            "-0.7*x2 + 0.1*x2^2 + 0.1*x1*x2 + 0.1*exp(x1) + w1"),
        parse_expression("x1 + x2 - 0.1*x1^2 + 0.2*x1*x2 + w2"),
    };
    std::vector<Expression> g = {parse_expression("x1 + x2")};
    return Model(2, 2, 1, std::move(f), std::move(g), box2(-3.0, 3.0),
                 box2(-0.1, 0.1),
                 Box(Eigen::VectorXd::Constant(1, -0.2),
                     Eigen::VectorXd::Constant(1, 0.2)),
                 "abrc08");
  }
  throw ConfigError("unknown builtin model: " + name);
}

}  // namespace randset
