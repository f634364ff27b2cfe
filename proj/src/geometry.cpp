#include "randset/geometry.hpp"

#include <cmath>

#include "randset/errors.hpp"

namespace randset {

Box::Box(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size())
    throw DimensionError("Box: lower/upper dimensions differ");
  for (int j = 0; j < lower_.size(); ++j)
    if (!(lower_[j] <= upper_[j]) || !std::isfinite(lower_[j]) ||
        !std::isfinite(upper_[j]))
      throw ConfigError("Box: requires finite lower <= upper componentwise");
}

double Box::volume() const {
  double v = 1.0;
  for (int j = 0; j < dim(); ++j) v *= upper_[j] - lower_[j];
  return v;
}

bool Box::positive_volume() const {
  for (int j = 0; j < dim(); ++j)
    if (!(upper_[j] > lower_[j])) return false;
  return dim() > 0;
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower_.size()) throw DimensionError("Box::contains: dimension");
  for (int j = 0; j < dim(); ++j)
    if (x[j] < lower_[j] - tol || x[j] > upper_[j] + tol) return false;
  return true;
}

Box Box::bounding(const std::vector<Eigen::VectorXd>& points) {
  if (points.empty()) throw ConfigError("Box::bounding: empty point list");
  Eigen::VectorXd lo = points.front();
  Eigen::VectorXd hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return Box(lo, hi);
}

Box Box::inflated(double factor) const {
  if (!(factor > 0)) throw ConfigError("Box::inflated: factor must be > 0");
  Eigen::VectorXd c = center();
  Eigen::VectorXd half = 0.5 * factor * widths();
  return Box(c - half, c + half);
}

double norm_p(const Eigen::VectorXd& z, NormP p) {
  switch (p) {
    case NormP::l1: return z.lpNorm<1>();
    case NormP::l2: return z.norm();
    case NormP::linf: return z.lpNorm<Eigen::Infinity>();
  }
  throw ConfigError("norm_p: bad norm");
}

double unit_ball_volume(int n, NormP p) {
  switch (p) {
    case NormP::l2:
      return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    case NormP::linf:
      return std::pow(2.0, n);
    case NormP::l1:
      return std::pow(2.0, n) / std::tgamma(static_cast<double>(n) + 1.0);
  }
  throw ConfigError("unit_ball_volume: bad norm");
}

NasSet::NasSet(Eigen::VectorXd center, Eigen::MatrixXd shape, NormP p)
    : center_(std::move(center)), shape_(std::move(shape)), p_(p) {
  const int n = dim();
  if (shape_.rows() != n || shape_.cols() != n)
    throw DimensionError("NasSet: shape matrix size");
  double scale = shape_.cwiseAbs().maxCoeff();
  if ((shape_ - shape_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
    throw ConfigError("NasSet: shape matrix must be symmetric");
  shape_ = 0.5 * (shape_ + shape_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shape_);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw ConfigError("NasSet: shape matrix must be positive definite");
  shape_inverse_ = es.operatorInverseSqrt() * es.operatorInverseSqrt();
}

bool NasSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != center_.size())
    throw DimensionError("NasSet::contains: dimension");
  return norm_p(shape_ * (x - center_), p_) <= 1.0 + tol;
}

double NasSet::volume() const {
  return unit_ball_volume(dim(), p_) / shape_.determinant();
}

double NasSet::log_volume() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shape_);
  return std::log(unit_ball_volume(dim(), p_)) -
         es.eigenvalues().array().log().sum();
}

double NasSet::axis_extent(int axis) const {
  if (axis < 0 || axis >= dim()) throw DimensionError("NasSet::axis_extent");
  Eigen::VectorXd row = shape_inverse_.row(axis);
  // Support function of the unit p-ball along P^{-T} e_j uses the dual norm.
  switch (p_) {
    case NormP::l2: return row.norm();
    case NormP::linf: return row.lpNorm<1>();
    case NormP::l1: return row.lpNorm<Eigen::Infinity>();
  }
  throw ConfigError("NasSet::axis_extent: bad norm");
}

PasSet::PasSet(Box domain, int sigma, Eigen::VectorXd coefficients,
               std::vector<GramBlock> certificate)
    : domain_(std::move(domain)),
      sigma_(sigma),
      coefficients_(std::move(coefficients)),
      basis_(domain_.dim(), sigma),
      certificate_(std::move(certificate)) {
  if (!domain_.positive_volume())
    throw ConfigError("PasSet: domain must have positive volume");
  if (coefficients_.size() != basis_.size())
    throw DimensionError("PasSet: coefficient count does not match basis");
  for (const auto& block : certificate_) {
    double scale = block.gram.size() > 0 ? block.gram.cwiseAbs().maxCoeff() : 0.0;
    if ((block.gram - block.gram.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * (1.0 + scale))
      throw ConfigError("PasSet: Gram block must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block.gram);
    double floor = -1e-8 * (1.0 + block.gram.trace());
    if (es.eigenvalues().minCoeff() < floor)
      throw ConfigError("PasSet: Gram block is not PSD within tolerance");
  }
}

double PasSet::evaluate(const Eigen::VectorXd& x) const {
  return evaluate_polynomial(basis_, coefficients_, x);
}

bool PasSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != domain_.dim()) throw DimensionError("PasSet::contains");
  return domain_.contains(x, tol) && evaluate(x) >= 1.0 - tol;
}

Eigen::VectorXd box_face_polynomial(const Box& box, int face,
                                    const MonomialBasis& basis) {
  if (face < 0 || face >= 2 * box.dim())
    throw ConfigError("box_face_polynomial: face index");
  if (basis.degree() < 1)
    throw ConfigError("box_face_polynomial: basis degree must be >= 1");
  const int var = face / 2;
  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(basis.size());
  std::vector<int> linear(box.dim(), 0);
  linear[var] = 1;
  int idx = basis.index_of(linear);
  if (face % 2 == 0) {  // u_j - x_j
    coeff[0] = box.upper()[var];
    coeff[idx] = -1.0;
  } else {  // x_j - l_j
    coeff[0] = -box.lower()[var];
    coeff[idx] = 1.0;
  }
  return coeff;
}

Eigen::VectorXd PasSet::coefficients_from_certificate() const {
  // Coefficients of r_0 + sum_i r_i b_i projected onto P_sigma. Terms of
  // degree sigma+1 produced by the face products cancel across faces (the
  // fit enforces that), so dropping them per block loses nothing.
  Eigen::VectorXd total = Eigen::VectorXd::Zero(basis_.size());
  for (const auto& block : certificate_) {
    MonomialBasis gram_basis(dim(), block.basis_degree);
    for (int a = 0; a < gram_basis.size(); ++a) {
      for (int b = 0; b < gram_basis.size(); ++b) {
        std::vector<int> e(dim());
        for (int j = 0; j < dim(); ++j)
          e[j] = gram_basis.exponent(a)[j] + gram_basis.exponent(b)[j];
        if (block.face < 0) {
          int idx = basis_.index_of(e);
          if (idx >= 0) total[idx] += block.gram(a, b);
        } else {
          const int var = block.face / 2;
          const double sign = block.face % 2 == 0 ? -1.0 : 1.0;
          const double constant = block.face % 2 == 0 ? domain_.upper()[var]
                                                      : -domain_.lower()[var];
          int idx = basis_.index_of(e);
          if (idx >= 0) total[idx] += constant * block.gram(a, b);
          e[var] += 1;
          int idx2 = basis_.index_of(e);
          if (idx2 >= 0) total[idx2] += sign * block.gram(a, b);
        }
      }
    }
  }
  return total;
}

}  // namespace randset
