#include "randset/monomial.hpp"

#include <algorithm>
#include <map>

#include "randset/errors.hpp"

namespace randset {

namespace {

void enumerate_degree(int dim, int total, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
  if (dim == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  // Lexicographic with x1 highest: largest exponent on the first variable
  // first.
  for (int e = total; e >= 0; --e) {
    current.push_back(e);
    enumerate_degree(dim - 1, total - e, current, out);
    current.pop_back();
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1) throw ConfigError("MonomialBasis: dim must be >= 1");
  if (degree < 0) throw ConfigError("MonomialBasis: degree must be >= 0");
  std::vector<int> current;
  for (int total = 0; total <= degree; ++total)
    enumerate_degree(dim, total, current, exponents_);
}

int MonomialBasis::index_of(const std::vector<int>& exponent) const {
  auto it = std::find(exponents_.begin(), exponents_.end(), exponent);
  if (it == exponents_.end()) return -1;
  return static_cast<int>(it - exponents_.begin());
}

Eigen::VectorXd MonomialBasis::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw DimensionError("MonomialBasis: point dimension");
  // Power table: powers[j][e] = x_j^e.
  std::vector<std::vector<double>> powers(dim_);
  for (int j = 0; j < dim_; ++j) {
    powers[j].resize(degree_ + 1);
    powers[j][0] = 1.0;
    for (int e = 1; e <= degree_; ++e) powers[j][e] = powers[j][e - 1] * x[j];
  }
  Eigen::VectorXd values(size());
  for (int i = 0; i < size(); ++i) {
    double v = 1.0;
    for (int j = 0; j < dim_; ++j) v *= powers[j][exponents_[i][j]];
    values[i] = v;
  }
  return values;
}

long long MonomialBasis::count(int dim, int degree) {
  long long c = 1;
  for (int i = 1; i <= dim; ++i) c = c * (degree + i) / i;
  return c;
}

double evaluate_polynomial(const MonomialBasis& basis,
                           const Eigen::VectorXd& coefficients,
                           const Eigen::VectorXd& x) {
  if (coefficients.size() != basis.size())
    throw DimensionError("evaluate_polynomial: coefficient count");
  return coefficients.dot(basis.evaluate(x));
}

}  // namespace randset
