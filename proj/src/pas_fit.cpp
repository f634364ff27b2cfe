#include "randset/pas_fit.hpp"

#include <cmath>
#include <string>

#include "randset/errors.hpp"

namespace randset {

Eigen::VectorXd box_moments(const Box& domain, int sigma) {
  if (!domain.positive_volume())
    throw ConfigError("box_moments: domain must have positive volume");
  MonomialBasis basis(domain.dim(), sigma);
  Eigen::VectorXd moments(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    double m = 1.0;
    for (int j = 0; j < domain.dim(); ++j) {
      double k = basis.exponent(i)[j];
      m *= (std::pow(domain.upper()[j], k + 1.0) -
            std::pow(domain.lower()[j], k + 1.0)) /
           (k + 1.0);
    }
    moments[i] = m;
  }
  return moments;
}

namespace {

// Index of the (a, c) upper-triangle entry within a stacked block.
int triangle_index(int size, int a, int c) {
  // a <= c; row-major over the upper triangle.
  return a * size - a * (a - 1) / 2 + (c - a);
}

double binomial(int n, int k) {
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

// Change-of-basis A with pi(u) = A pi(x) for u_j = (x_j - m_j) / d_j:
// row alpha holds the x-monomial coefficients of u^alpha.
Eigen::MatrixXd monomial_change_of_basis(const MonomialBasis& basis,
                                         const Eigen::VectorXd& center,
                                         const Eigen::VectorXd& halfwidth) {
  const int n = basis.dim();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (int row = 0; row < basis.size(); ++row) {
    const std::vector<int>& alpha = basis.exponent(row);
    // Expand prod_j ((x_j - m_j)/d_j)^{alpha_j} term by term.
    std::vector<std::pair<std::vector<int>, double>> terms = {
        {std::vector<int>(n, 0), 1.0}};
    for (int j = 0; j < n; ++j) {
      if (alpha[j] == 0) continue;
      std::vector<std::pair<std::vector<int>, double>> next;
      for (const auto& [expo, coeff] : terms) {
        for (int k = 0; k <= alpha[j]; ++k) {
          std::vector<int> e = expo;
          e[j] += k;
          double c = coeff * binomial(alpha[j], k) *
                     std::pow(-center[j], alpha[j] - k) /
                     std::pow(halfwidth[j], alpha[j]);
          next.emplace_back(std::move(e), c);
        }
      }
      terms = std::move(next);
    }
    for (const auto& [expo, coeff] : terms)
      A(row, basis.index_of(expo)) += coeff;
  }
  return A;
}

}  // namespace

std::vector<Eigen::MatrixXd> PutinarTemplate::unpack_grams(
    const Eigen::VectorXd& raw) const {
  const int per_block = gram_size * (gram_size + 1) / 2;
  std::vector<Eigen::MatrixXd> grams(num_blocks);
  for (int b = 0; b < num_blocks; ++b) {
    Eigen::MatrixXd G(gram_size, gram_size);
    for (int a = 0; a < gram_size; ++a)
      for (int c = a; c < gram_size; ++c) {
        double v = raw[b * per_block + triangle_index(gram_size, a, c)];
        G(a, c) = v;
        G(c, a) = v;
      }
    grams[b] = G;
  }
  return grams;
}

Eigen::VectorXd PutinarTemplate::q_coefficients(const Eigen::VectorXd& raw) const {
  Eigen::VectorXd ext = coeff_map * raw;
  return ext.segment(0, basis.size());
}

SdpProblem PutinarTemplate::base_problem() const {
  const int per_block = gram_size * (gram_size + 1) / 2;
  const int nv = reduced_vars();
  SdpProblem prob;
  prob.objective = Eigen::VectorXd::Zero(nv);
  for (int b = 0; b < num_blocks; ++b) {
    std::vector<Eigen::MatrixXd> coeff(nv);
    for (int k = 0; k < nv; ++k) {
      Eigen::MatrixXd F = Eigen::MatrixXd::Zero(gram_size, gram_size);
      bool nonzero = false;
      for (int a = 0; a < gram_size; ++a)
        for (int c = a; c < gram_size; ++c) {
          double v = nullspace(b * per_block + triangle_index(gram_size, a, c), k);
          if (v != 0.0) {
            F(a, c) = v;
            F(c, a) = v;
            nonzero = true;
          }
        }
      if (nonzero) coeff[k] = F;
    }
    prob.add_block(Eigen::MatrixXd::Zero(gram_size, gram_size), std::move(coeff));
  }
  return prob;
}

PutinarTemplate assemble_putinar(const Box& domain, int sigma) {
  if (sigma < 0) throw ConfigError("assemble_putinar: sigma must be >= 0");
  if (!domain.positive_volume())
    throw ConfigError("assemble_putinar: domain must have positive volume");
  const int n = domain.dim();

  PutinarTemplate tpl;
  tpl.dim = n;
  tpl.sigma = sigma;
  tpl.gram_basis_degree = sigma / 2;
  tpl.domain = domain;
  tpl.basis = MonomialBasis(n, sigma);
  tpl.extended = MonomialBasis(n, sigma + 1);
  MonomialBasis gram_basis(n, tpl.gram_basis_degree);
  tpl.gram_size = gram_basis.size();
  tpl.num_blocks = 1 + 2 * n;
  const int per_block = tpl.gram_size * (tpl.gram_size + 1) / 2;
  tpl.raw_vars = tpl.num_blocks * per_block;

  // coeff_map: extended-basis coefficients of r0 + sum_i r_i b_i as a linear
  // map of the stacked upper-triangle Gram entries.
  tpl.coeff_map = Eigen::MatrixXd::Zero(tpl.extended.size(), tpl.raw_vars);
  for (int b = 0; b < tpl.num_blocks; ++b) {
    for (int a = 0; a < tpl.gram_size; ++a) {
      for (int c = a; c < tpl.gram_size; ++c) {
        const int var = b * per_block + triangle_index(tpl.gram_size, a, c);
        const double mult = a == c ? 1.0 : 2.0;  // off-diagonals appear twice
        std::vector<int> e(n);
        for (int j = 0; j < n; ++j)
          e[j] = gram_basis.exponent(a)[j] + gram_basis.exponent(c)[j];
        if (b == 0) {
          tpl.coeff_map(tpl.extended.index_of(e), var) += mult;
        } else {
          const int face = b - 1;
          const int var_j = face / 2;
          const double sign = face % 2 == 0 ? -1.0 : 1.0;
          const double constant = face % 2 == 0 ? domain.upper()[var_j]
                                                : -domain.lower()[var_j];
          tpl.coeff_map(tpl.extended.index_of(e), var) += mult * constant;
          std::vector<int> e2 = e;
          e2[var_j] += 1;
          tpl.coeff_map(tpl.extended.index_of(e2), var) += mult * sign;
        }
      }
    }
  }

  // Identification: coefficients above degree sigma vanish.
  const int excess = tpl.extended.size() - tpl.basis.size();
  if (excess > 0) {
    Eigen::MatrixXd eq = tpl.coeff_map.bottomRows(excess);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(eq);
    lu.setThreshold(1e-10);
    tpl.nullspace = lu.kernel();
  } else {
    tpl.nullspace = Eigen::MatrixXd::Identity(tpl.raw_vars, tpl.raw_vars);
  }
  return tpl;
}

PasFitResult fit_pas(const std::vector<Eigen::VectorXd>& points,
                     const Box& domain, int sigma, double tol) {
  if (points.empty()) throw ConfigError("fit_pas: empty point list");
  if (!domain.positive_volume())
    throw ConfigError("fit_pas: domain must have positive volume");
  for (const auto& p : points)
    if (p.size() != domain.dim())
      throw DimensionError("fit_pas: point dimension");

  std::string offenders;
  int offender_count = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    if (!domain.contains(points[i], 1e-12)) {
      if (++offender_count <= 5)
        offenders += " #" + std::to_string(i);
    }
  }
  if (offender_count > 0)
    throw ConfigError("fit_pas: " + std::to_string(offender_count) +
                      " point(s) outside the domain box (e.g." + offenders +
                      "); inflate the box to at least the sample bounding box");

  // Solve in the normalized domain [-1,1]^n: the SDP data stays O(1)
  // regardless of the box scale. The certificate maps back by congruence.
  const int n = domain.dim();
  Eigen::VectorXd center = domain.center();
  Eigen::VectorXd halfwidth = 0.5 * domain.widths();
  Box unit(Eigen::VectorXd::Constant(n, -1.0), Eigen::VectorXd::Constant(n, 1.0));
  std::vector<Eigen::VectorXd> normalized;
  normalized.reserve(points.size());
  for (const auto& p : points)
    normalized.push_back(((p - center).array() / halfwidth.array())
                             .cwiseMin(1.0)
                             .cwiseMax(-1.0)
                             .matrix());

  PutinarTemplate tpl = assemble_putinar(unit, sigma);
  SdpProblem prob = tpl.base_problem();

  // Objective: moments . q as a function of the reduced variables.
  Eigen::VectorXd moments = box_moments(unit, sigma);
  Eigen::MatrixXd q_map =
      tpl.coeff_map.topRows(tpl.basis.size()) * tpl.nullspace;
  prob.objective = q_map.transpose() * moments;

  // Scenario constraints: q(u^(i)) >= 1.
  for (const auto& p : normalized) {
    Eigen::VectorXd monovals = tpl.basis.evaluate(p);
    Eigen::VectorXd gradient = -(q_map.transpose() * monovals);
    prob.add_scalar_inequality(gradient, -1.0);
  }

  SdpOptions options;
  options.tol = tol;
  SolveReport report = solve_sdp(prob, options);
  if (report.status != SolveStatus::optimal)
    throw SolverError("fit_pas: SDP solve failed (" + to_string(report.status) +
                      ")");

  Eigen::VectorXd raw = tpl.nullspace * report.solution;
  std::vector<Eigen::MatrixXd> grams = tpl.unpack_grams(raw);

  // Back-transform: with u_j = (x_j - m_j)/d_j the normalized faces are
  // (1 -+ u_j) = face_j(x)/d_j, so r(u) G-blocks map to the original faces by
  // the basis congruence A^T G A (PSD preserved) and a 1/d_j face scale.
  MonomialBasis gram_basis(n, tpl.gram_basis_degree);
  Eigen::MatrixXd basis_change =
      monomial_change_of_basis(gram_basis, center, halfwidth);

  std::vector<PasSet::GramBlock> certificate;
  certificate.reserve(grams.size());
  for (int b = 0; b < tpl.num_blocks; ++b) {
    Eigen::MatrixXd g = basis_change.transpose() * grams[b] * basis_change;
    if (b > 0) g /= halfwidth[(b - 1) / 2];
    // Clear tiny interior-point infeasibility so the stored certificate
    // satisfies the PSD invariant exactly.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
    Eigen::MatrixXd psd = es.eigenvectors() *
                          es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                          es.eigenvectors().transpose();
    certificate.push_back(
        {b - 1, tpl.gram_basis_degree, 0.5 * (psd + psd.transpose())});
  }

  // Define q from the stored certificate so the two stay consistent to
  // machine precision, and report the objective in original units.
  PasSet staged(domain, sigma,
                Eigen::VectorXd::Zero(MonomialBasis(n, sigma).size()),
                certificate);
  Eigen::VectorXd q = staged.coefficients_from_certificate();
  report.objective *= halfwidth.prod();

  PasFitResult result{PasSet(domain, sigma, q, std::move(certificate)), report};
  return result;
}

VolumeEstimate pas_volume_estimate(const PasSet& set, const SampleStream& stream,
                                   long long num_samples) {
  if (num_samples < 1)
    throw ConfigError("pas_volume_estimate: need at least one sample");
  const Box& box = set.domain();
  long long accepted = 0;
  for (long long i = 0; i < num_samples; ++i) {
    CounterRng rng = stream.generator(i);
    Eigen::VectorXd x(box.dim());
    for (int j = 0; j < box.dim(); ++j)
      x[j] = rng.uniform(box.lower()[j], box.upper()[j]);
    if (set.evaluate(x) >= 1.0) ++accepted;
  }
  double p = static_cast<double>(accepted) / static_cast<double>(num_samples);
  VolumeEstimate est;
  est.volume = box.volume() * p;
  est.standard_error =
      box.volume() * std::sqrt(p * (1.0 - p) / static_cast<double>(num_samples));
  return est;
}

}  // namespace randset
