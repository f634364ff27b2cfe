#pragma once

#include <string>

namespace randset {

enum class SetFamily { ellipsoid, parallelotope, hyperrectangle, l1_diag, pas };

SetFamily family_from_string(const std::string& name);
std::string family_to_string(SetFamily family);

// Binomial tail Phi(eps, N, d) = sum_{j=0}^{d-1} C(N,j) eps^j (1-eps)^{N-j},
// the bound on Pr{Viol(A) > eps} for a scenario program with d design
// variables solved on N samples. Evaluated with log-space terms and clamped
// to [0, 1].
double violation_tail(double epsilon, long long num_samples, int dimension);

// Smallest N with N >= e/(e-1) * (1/eps) * (d + ln(1/delta)).
long long required_samples_explicit(double epsilon, double delta, int dimension);

// Minimal N with violation_tail(eps, N, d) <= delta, by exponential then
// binary search (the tail is nonincreasing in N).
long long required_samples_exact(double epsilon, double delta, int dimension);

// Largest eps in (0,1) with violation_tail(eps, N, d) <= delta; the risk
// level implied by a fixed sample count. Bisection on the eps-monotone tail.
double implied_epsilon(long long num_samples, double delta, int dimension);

// Number of free variables of the scenario program per approximating family
// (shape matrix + center for ellipsoid/parallelotope, interval endpoints for
// the hyperrectangle, polynomial coefficients for a PAS of degree sigma).
int design_dimension(SetFamily family, int state_dim, int sigma = -1);

// Attached to every fitted set: the a-priori guarantee
// Pr{Viol(A) > epsilon} <= Phi(epsilon, N, d) <= delta.
struct ScenarioCertificate {
  double epsilon = 0.0;
  double delta = 0.0;
  int dimension = 0;
  long long num_samples = 0;
  enum class Method { explicit_bound, tail_inversion } method =
      Method::tail_inversion;

  // Throws ConfigError unless Phi(epsilon, N, d) <= delta (with a small
  // numerical slack).
  static ScenarioCertificate checked(double epsilon, double delta,
                                     int dimension, long long num_samples,
                                     Method method);
};

// Certificate for a run: with N from the tail inversion the requested epsilon
// holds as-is; with a fixed N the implied epsilon is reported instead. A
// fixed N below d yields only a vacuous certificate (d capped at N,
// epsilon = 1), which callers should treat as a warning.
ScenarioCertificate certificate_for(double epsilon, double delta, int dimension,
                                    long long num_samples, bool fixed_n);

}  // namespace randset
