#include "randset/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "randset/errors.hpp"

namespace randset {

SetFamily family_from_string(const std::string& name) {
  if (name == "ellipsoid") return SetFamily::ellipsoid;
  if (name == "parallelotope") return SetFamily::parallelotope;
  if (name == "box" || name == "hyperrectangle") return SetFamily::hyperrectangle;
  if (name == "l1") return SetFamily::l1_diag;
  if (name == "pas") return SetFamily::pas;
  throw ConfigError("unknown set family: " + name);
}

std::string family_to_string(SetFamily family) {
  switch (family) {
    case SetFamily::ellipsoid: return "ellipsoid";
    case SetFamily::parallelotope: return "parallelotope";
    case SetFamily::hyperrectangle: return "box";
    case SetFamily::l1_diag: return "l1";
    case SetFamily::pas: return "pas";
  }
  return "?";
}

namespace {

double log_sum_exp(double acc, double term) {
  if (acc == -std::numeric_limits<double>::infinity()) return term;
  if (term == -std::numeric_limits<double>::infinity()) return acc;
  double hi = std::max(acc, term);
  return hi + std::log1p(std::exp(std::min(acc, term) - hi));
}

}  // namespace

double violation_tail(double epsilon, long long num_samples, int dimension) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw ConfigError("violation_tail: epsilon must lie in [0,1]");
  if (num_samples < 1) throw ConfigError("violation_tail: N must be >= 1");
  if (dimension < 1) throw ConfigError("violation_tail: d must be >= 1");

  const long long jmax = std::min<long long>(dimension - 1, num_samples);
  if (epsilon == 0.0) return 1.0;  // only the j=0 term survives, equal to 1
  if (epsilon == 1.0) return dimension > num_samples ? 1.0 : 0.0;
  if (dimension > num_samples) return 1.0;  // full binomial sum

  const double log_eps = std::log(epsilon);
  const double log_1m = std::log1p(-epsilon);
  double log_acc = -std::numeric_limits<double>::infinity();
  for (long long j = 0; j <= jmax; ++j) {
    double log_comb = std::lgamma(static_cast<double>(num_samples) + 1.0) -
                      std::lgamma(static_cast<double>(j) + 1.0) -
                      std::lgamma(static_cast<double>(num_samples - j) + 1.0);
    double term = log_comb + static_cast<double>(j) * log_eps +
                  static_cast<double>(num_samples - j) * log_1m;
    log_acc = log_sum_exp(log_acc, term);
  }
  return std::clamp(std::exp(log_acc), 0.0, 1.0);
}

long long required_samples_explicit(double epsilon, double delta, int dimension) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("required_samples_explicit: epsilon must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("required_samples_explicit: delta must lie in (0,1)");
  if (dimension < 1) throw ConfigError("required_samples_explicit: d must be >= 1");

  const double e = std::exp(1.0);
  double bound = e / (e - 1.0) / epsilon *
                 (static_cast<double>(dimension) + std::log(1.0 / delta));
  return static_cast<long long>(std::ceil(bound));
}

long long required_samples_exact(double epsilon, double delta, int dimension) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("required_samples_exact: epsilon must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("required_samples_exact: delta must lie in (0,1)");
  if (dimension < 1) throw ConfigError("required_samples_exact: d must be >= 1");

  // Phi = 1 whenever N < d, so start the search at d.
  long long lo = dimension;
  long long hi = lo;
  while (violation_tail(epsilon, hi, dimension) > delta) {
    lo = hi + 1;
    hi *= 2;
    if (hi > (1LL << 40))
      throw SolverError("required_samples_exact: bound search diverged");
  }
  while (lo < hi) {
    long long mid = lo + (hi - lo) / 2;
    if (violation_tail(epsilon, mid, dimension) <= delta)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

double implied_epsilon(long long num_samples, double delta, int dimension) {
  if (num_samples < 1) throw ConfigError("implied_epsilon: N must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("implied_epsilon: delta must lie in (0,1)");
  if (dimension < 1) throw ConfigError("implied_epsilon: d must be >= 1");
  if (dimension > num_samples)
    throw ConfigError("implied_epsilon: need N >= d for a nontrivial bound");

  double lo = 0.0, hi = 1.0;  // tail is nonincreasing in eps
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (violation_tail(mid, num_samples, dimension) <= delta)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

int design_dimension(SetFamily family, int state_dim, int sigma) {
  if (state_dim < 1) throw ConfigError("design_dimension: n must be >= 1");
  switch (family) {
    case SetFamily::ellipsoid:
    case SetFamily::parallelotope:
      return state_dim * (state_dim + 1) / 2 + state_dim;
    case SetFamily::hyperrectangle:
    case SetFamily::l1_diag:
      return 2 * state_dim;
    case SetFamily::pas: {
      if (sigma < 0)
        throw ConfigError("design_dimension: pas family requires a degree");
      // Monomials of degree <= sigma in state_dim variables.
      long long count = 1;
      for (int i = 1; i <= state_dim; ++i)
        count = count * (sigma + i) / i;
      return static_cast<int>(count);
    }
  }
  throw ConfigError("design_dimension: bad family");
}

ScenarioCertificate certificate_for(double epsilon, double delta, int dimension,
                                    long long num_samples, bool fixed_n) {
  if (!fixed_n)
    return ScenarioCertificate::checked(
        epsilon, delta, dimension, num_samples,
        ScenarioCertificate::Method::tail_inversion);
  if (num_samples >= dimension)
    return ScenarioCertificate::checked(
        implied_epsilon(num_samples, delta, dimension), delta, dimension,
        num_samples, ScenarioCertificate::Method::tail_inversion);
  return ScenarioCertificate::checked(
      1.0, delta, static_cast<int>(num_samples), num_samples,
      ScenarioCertificate::Method::explicit_bound);
}

ScenarioCertificate ScenarioCertificate::checked(double epsilon, double delta,
                                                 int dimension,
                                                 long long num_samples,
                                                 Method method) {
  double tail = violation_tail(epsilon, num_samples, dimension);
  if (tail > delta * (1.0 + 1e-9) + 1e-15)
    throw ConfigError("ScenarioCertificate: Phi(eps,N,d) exceeds delta");
  ScenarioCertificate cert;
  cert.epsilon = epsilon;
  cert.delta = delta;
  cert.dimension = dimension;
  cert.num_samples = num_samples;
  cert.method = method;
  return cert;
}

}  // namespace randset
