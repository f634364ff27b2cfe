#pragma once

#include <Eigen/Dense>
#include <vector>

#include "randset/geometry.hpp"
#include "randset/sdp.hpp"
#include "randset/stream.hpp"

namespace randset {

// Moments of the monomial basis over a box: integral of x^k over S per basis
// element (the linear representation of the objective int_S q).
Eigen::VectorXd box_moments(const Box& domain, int sigma);

// The Putinar structure for degree sigma on a box: q = r_0 + sum_i r_i b_i
// with every multiplier a sum of squares of degree sigma (rounded down to
// even), b_i the 2n affine face polynomials. Products reach degree sigma + 1;
// the identification constraints zero every coefficient above sigma, which is
// eliminated here through a nullspace parameterization of the stacked Gram
// entries.
struct PutinarTemplate {
  int dim = 0;
  int sigma = 0;
  int gram_basis_degree = 0;   // basis degree of every multiplier Gram
  int gram_size = 0;           // C(n + h, n)
  int num_blocks = 0;          // 1 + 2n
  int raw_vars = 0;            // stacked upper-triangle Gram entries
  MonomialBasis basis;         // P_sigma
  MonomialBasis extended;      // P_{sigma+1}
  Eigen::MatrixXd coeff_map;   // extended coefficients of r0 + sum r_i b_i
  Eigen::MatrixXd nullspace;   // raw_vars x reduced_vars
  Box domain;

  int reduced_vars() const { return static_cast<int>(nullspace.cols()); }
  // Stacked raw Gram vector -> per-block symmetric matrices.
  std::vector<Eigen::MatrixXd> unpack_grams(const Eigen::VectorXd& raw) const;
  // Coefficients of q in P_sigma for a raw Gram vector.
  Eigen::VectorXd q_coefficients(const Eigen::VectorXd& raw) const;
  // The PSD-block SDP over the reduced variables (no objective, no point
  // constraints yet).
  SdpProblem base_problem() const;
};

PutinarTemplate assemble_putinar(const Box& domain, int sigma);

struct PasFitResult {
  PasSet set;
  SolveReport report;
};

// Solves the scenario PAS program: minimize int_S q subject to the Putinar
// structure and q(x^(i)) >= 1 at every sample. Points outside S are an error
// (the program would be infeasible); the caller may inflate S instead.
PasFitResult fit_pas(const std::vector<Eigen::VectorXd>& points,
                     const Box& domain, int sigma, double tol = 1e-7);

// Monte Carlo volume of {x in S : q(x) >= 1}: vol(S) times the acceptance
// fraction of uniform box samples, with its binomial standard error.
struct VolumeEstimate {
  double volume = 0.0;
  double standard_error = 0.0;
};
VolumeEstimate pas_volume_estimate(const PasSet& set, const SampleStream& stream,
                                   long long num_samples);

}  // namespace randset
