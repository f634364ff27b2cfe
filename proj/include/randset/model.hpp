#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "randset/expression.hpp"
#include "randset/geometry.hpp"

namespace randset {

// Discrete-time system description: dynamics x+ = f(x, w), measurement
// y = g(x) + v, with box supports for the initial state, process noise, and
// measurement noise. Immutable after construction; evaluation is reentrant.
class Model {
 public:
  Model() = default;
  Model(int state_dim, int noise_dim, int meas_dim,
        std::vector<Expression> dynamics, std::vector<Expression> measurement,
        Box initial_box, Box noise_box, Box meas_noise_box,
        std::string name = "");

  int state_dim() const { return state_dim_; }
  int noise_dim() const { return noise_dim_; }
  int meas_dim() const { return meas_dim_; }
  const std::string& name() const { return name_; }

  const Box& initial_box() const { return initial_box_; }
  const Box& noise_box() const { return noise_box_; }
  const Box& meas_noise_box() const { return meas_noise_box_; }

  const std::vector<Expression>& dynamics() const { return dynamics_; }
  const std::vector<Expression>& measurement() const { return measurement_; }

  // x+ = f(x, w); throws DomainError naming the failing component.
  Eigen::VectorXd eval_dynamics(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& w) const;
  // Noise-free measurement g(x).
  Eigen::VectorXd eval_measurement(const Eigen::VectorXd& x) const;

  bool has_measurement() const { return meas_dim_ > 0; }

 private:
  int state_dim_ = 0;
  int noise_dim_ = 0;
  int meas_dim_ = 0;
  std::vector<Expression> dynamics_;
  std::vector<Expression> measurement_;
  Box initial_box_;
  Box noise_box_;
  Box meas_noise_box_;
  std::string name_;
};

// Built-in models.
//
// "sysF": the planar benchmark map
//   x+(1) = sin(x2) + 3 cos(x2) + w1
//   x+(2) = 3 x1 - 20 log(1 + x2) + w2
// over X = [0,1]^2, W = [-0.2, 0.2]^2, no measurement.
//
// "abrc08": the planar filtering benchmark
//   x+(1) = -0.7 x2 + 0.1 x2^2 + 0.1 x1 x2 + 0.1 e^{x1} + w1
//   x+(2) = x1 + x2 - 0.1 x1^2 + 0.2 x1 x2 + w2
//   y = x1 + x2 + v
// with |w|inf <= 0.1, |v| <= 0.2, X0 = [-3, 3]^2.
Model builtin_model(const std::string& name);

}  // namespace randset
