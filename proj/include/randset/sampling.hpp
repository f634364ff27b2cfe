#pragma once

#include <Eigen/Dense>
#include <vector>

#include "randset/geometry.hpp"
#include "randset/stream.hpp"

namespace randset {

// Uniform multisample over a box. Sample i depends only on
// (stream.seed, stream.epoch, i, stream.purpose).
std::vector<Eigen::VectorXd> sample_box(const Box& box, const SampleStream& stream,
                                        long long count,
                                        long long index_offset = 0);

// Single box sample for index i (used by incremental redraw policies).
Eigen::VectorXd sample_box_one(const Box& box, const SampleStream& stream,
                               long long index);

// Uniform multisample over a NAS set: z uniform in the unit p-ball mapped
// through x = c + P^{-1} z. p=2 via radially corrected directions, p=inf via
// the cube, p=1 by rejection from the cube (acceptance 1/n!, fine for the
// low state dimensions this library targets).
std::vector<Eigen::VectorXd> sample_nas(const NasSet& set,
                                        const SampleStream& stream,
                                        long long count,
                                        long long index_offset = 0);

Eigen::VectorXd sample_nas_one(const NasSet& set, const SampleStream& stream,
                               long long index);

// Uniform multisample over a PAS by rejection from its box domain. Each index
// gets a draw budget of max(1, max_attempts / count); throws SolverError when
// a budget is exhausted (acceptance-rate failure).
std::vector<Eigen::VectorXd> sample_pas(const PasSet& set,
                                        const SampleStream& stream,
                                        long long count, long long max_attempts);

}  // namespace randset
