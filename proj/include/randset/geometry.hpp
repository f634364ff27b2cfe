#pragma once

#include <Eigen/Dense>
#include <vector>

#include "randset/monomial.hpp"

namespace randset {

// Default absolute tolerance for membership tests: solver-level feasibility
// noise must not flip a membership decision.
inline constexpr double kMembershipTol = 1e-9;

enum class NormP { l1 = 1, l2 = 2, linf = 0 };

// Axis-aligned box [l, u]. Zero-width coordinates are allowed (degenerate
// noise supports show up in practice); callers that need an interior, such as
// the PAS domain, check positive_volume().
class Box {
 public:
  Box() = default;
  Box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::VectorXd widths() const { return upper_ - lower_; }
  Eigen::VectorXd center() const { return 0.5 * (lower_ + upper_); }

  double volume() const;
  bool positive_volume() const;

  bool contains(const Eigen::VectorXd& x, double tol = kMembershipTol) const;

  // The smallest box containing both this box and the given points.
  static Box bounding(const std::vector<Eigen::VectorXd>& points);
  // Scaled about its center by the given factor (> 0).
  Box inflated(double factor) const;

 private:
  Eigen::VectorXd lower_, upper_;
};

// Norm-based approximating set {x : ||P (x - c)||_p <= 1} with a symmetric
// positive-definite shape matrix P. Ellipsoid for p=2, elementary
// parallelotope for p=inf (hyperrectangle when P is diagonal), cross-polytope
// for p=1.
class NasSet {
 public:
  NasSet() = default;
  NasSet(Eigen::VectorXd center, Eigen::MatrixXd shape, NormP p);

  int dim() const { return static_cast<int>(center_.size()); }
  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& shape() const { return shape_; }
  NormP p() const { return p_; }

  bool contains(const Eigen::VectorXd& x, double tol = kMembershipTol) const;
  double volume() const;
  double log_volume() const;

  // Inverse shape matrix (cached at construction; the set equals
  // {c + P^{-1} z : ||z||_p <= 1}).
  const Eigen::MatrixXd& shape_inverse() const { return shape_inverse_; }

  // Half-width of the set along coordinate axis j (exact support-function
  // value), so the axis-j span is [c_j - extent, c_j + extent].
  double axis_extent(int axis) const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
  Eigen::MatrixXd shape_inverse_;
  NormP p_ = NormP::l2;
};

double norm_p(const Eigen::VectorXd& z, NormP p);

// Volume of the unit p-ball in R^n.
double unit_ball_volume(int n, NormP p);

// Polynomial superlevel set {x in S : q(x) >= 1} for a polynomial q of
// degree <= sigma on a box S, together with the sum-of-squares certificate
// (one Gram matrix per Putinar multiplier) produced by the fit.
class PasSet {
 public:
  struct GramBlock {
    // Which face multiplier this Gram certifies: -1 for r_0, otherwise the
    // face index in [0, 2n) ordered (u_1 - x_1, x_1 - l_1, u_2 - x_2, ...).
    int face = -1;
    int basis_degree = 0;
    Eigen::MatrixXd gram;
  };

  PasSet() = default;
  PasSet(Box domain, int sigma, Eigen::VectorXd coefficients,
         std::vector<GramBlock> certificate);

  int dim() const { return domain_.dim(); }
  const Box& domain() const { return domain_; }
  int sigma() const { return sigma_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  const MonomialBasis& basis() const { return basis_; }
  const std::vector<GramBlock>& certificate() const { return certificate_; }

  double evaluate(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = kMembershipTol) const;

  // Coefficient vector of r_0 + sum_i r_i b_i rebuilt from the Gram blocks;
  // matches coefficients() to solver tolerance.
  Eigen::VectorXd coefficients_from_certificate() const;

 private:
  Box domain_;
  int sigma_ = 0;
  Eigen::VectorXd coefficients_;
  MonomialBasis basis_;
  std::vector<GramBlock> certificate_;
};

// The affine polynomial of the given box face, as coefficients over a basis
// of degree >= 1: face 2j is u_j - x_j, face 2j+1 is x_j - l_j.
Eigen::VectorXd box_face_polynomial(const Box& box, int face,
                                    const MonomialBasis& basis);

}  // namespace randset
