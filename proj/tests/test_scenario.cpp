#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "randset/errors.hpp"
#include "randset/scenario.hpp"

using namespace randset;

namespace {

// Exact evaluation of the binomial tail with plain products, valid for the
// modest N used in cross-checks. Independent of the log-space path.
double tail_reference(double eps, long long n, int d) {
  long double acc = 0.0L;
  for (long long j = 0; j <= std::min<long long>(d - 1, n); ++j) {
    long double comb = 1.0L;
    for (long long i = 0; i < j; ++i)
      comb = comb * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
    acc += comb * std::pow(static_cast<long double>(eps), j) *
           std::pow(1.0L - static_cast<long double>(eps), n - j);
  }
  return static_cast<double>(std::min(acc, 1.0L));
}

}  // namespace

TEST_CASE("violation_tail closed-form anchors") {
  CHECK(violation_tail(0.1, 10, 1) == doctest::Approx(0.3486784401).epsilon(1e-12));
  // eps = 0: only the j=0 term survives.
  CHECK(violation_tail(0.0, 17, 3) == 1.0);
  CHECK(violation_tail(0.0, 1, 1) == 1.0);
  // d > N: the full binomial sum.
  CHECK(violation_tail(0.5, 4, 5) == 1.0);
}

TEST_CASE("violation_tail matches direct evaluation for N <= 100") {
  for (double eps : {0.01, 0.05, 0.1, 0.3, 0.7}) {
    for (long long n : {1LL, 5LL, 20LL, 100LL}) {
      for (int d : {1, 2, 5, 15}) {
        double a = violation_tail(eps, n, d);
        double b = tail_reference(eps, n, d);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("violation_tail monotonicity over the grid") {
  for (double eps : {0.01, 0.05, 0.1, 0.3}) {
    for (int d : {1, 2, 5, 10, 20}) {
      double prev = 2.0;
      for (long long n = 10; n <= 1000; n += 30) {
        double v = violation_tail(eps, n, d);
        CHECK(v <= prev + 1e-12);
        prev = v;
      }
    }
  }
  // Nondecreasing in d.
  for (double eps : {0.05, 0.2}) {
    for (long long n : {50LL, 400LL}) {
      double prev = -1.0;
      for (int d = 1; d <= 20; ++d) {
        double v = violation_tail(eps, n, d);
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
    }
  }
}

TEST_CASE("required_samples_explicit anchors") {
  CHECK(required_samples_explicit(0.1, 0.01, 5) == 152);
  CHECK(required_samples_explicit(0.5, 0.5, 1) == 6);
  // delta -> 1 limit: ln(1/delta) -> 0.
  double e = std::exp(1.0);
  long long n = required_samples_explicit(0.1, 1.0 - 1e-12, 1);
  CHECK(n == static_cast<long long>(std::ceil(e / (e - 1.0) / 0.1)));
}

TEST_CASE("required_samples_exact: minimality and dominance") {
  CHECK(required_samples_exact(0.1, 0.01, 1) == 44);  // (1-eps)^N <= delta
  for (double eps : {0.05, 0.1, 0.2}) {
    for (double delta : {1e-2, 1e-6}) {
      for (int d : {2, 5, 15}) {
        long long exact = required_samples_exact(eps, delta, d);
        long long expl = required_samples_explicit(eps, delta, d);
        CHECK(exact <= expl);
        CHECK(violation_tail(eps, exact, d) <= delta);
        CHECK(violation_tail(eps, exact - 1, d) > delta);
      }
    }
  }
}

TEST_CASE("implied_epsilon inverts the tail") {
  for (int d : {1, 5, 15}) {
    for (double delta : {0.01, 0.001}) {
      double eps = implied_epsilon(200, delta, d);
      CHECK(violation_tail(eps, 200, d) <= delta);
      CHECK(violation_tail(eps * 0.99, 200, d) > delta);
    }
  }
}

TEST_CASE("design_dimension per family") {
  CHECK(design_dimension(SetFamily::ellipsoid, 2) == 5);
  CHECK(design_dimension(SetFamily::parallelotope, 2) == 5);
  CHECK(design_dimension(SetFamily::hyperrectangle, 3) == 6);
  CHECK(design_dimension(SetFamily::l1_diag, 3) == 6);
  CHECK(design_dimension(SetFamily::pas, 2, 4) == 15);
  CHECK(design_dimension(SetFamily::pas, 1, 2) == 3);
  CHECK_THROWS_AS(design_dimension(SetFamily::pas, 2), ConfigError);
}

TEST_CASE("certificate construction validates the tail bound") {
  auto cert = ScenarioCertificate::checked(
      0.1, 0.01, 1, 44, ScenarioCertificate::Method::tail_inversion);
  CHECK(cert.num_samples == 44);
  CHECK_THROWS_AS(ScenarioCertificate::checked(
                      0.1, 0.01, 1, 10, ScenarioCertificate::Method::tail_inversion),
                  ConfigError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(violation_tail(-0.1, 10, 1), ConfigError);
  CHECK_THROWS_AS(violation_tail(0.1, 0, 1), ConfigError);
  CHECK_THROWS_AS(required_samples_explicit(1.5, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(required_samples_exact(0.1, 0.0, 1), ConfigError);
}
