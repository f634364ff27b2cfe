#pragma once

#include <Eigen/Dense>
#include <vector>

namespace randset {

// Exponent tuples of all monomials of total degree <= degree in dim
// variables, in graded lexicographic order (by total degree, ties broken
// lexicographically with x1 ranked highest). The first tuple is always the
// constant monomial.
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  const std::vector<int>& exponent(int i) const { return exponents_[i]; }
  const std::vector<std::vector<int>>& exponents() const { return exponents_; }

  // Index of an exponent tuple, or -1 if its degree exceeds the basis degree.
  int index_of(const std::vector<int>& exponent) const;

  // Values of every basis monomial at a point.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

  static long long count(int dim, int degree);

 private:
  int dim_ = 0;
  int degree_ = 0;
  std::vector<std::vector<int>> exponents_;
};

// q(x) for a coefficient vector aligned with the basis.
double evaluate_polynomial(const MonomialBasis& basis,
                           const Eigen::VectorXd& coefficients,
                           const Eigen::VectorXd& x);

}  // namespace randset
