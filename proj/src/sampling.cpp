#include "randset/sampling.hpp"

#include <cmath>

#include "randset/errors.hpp"

namespace randset {

namespace {

Eigen::VectorXd unit_ball_point(int n, NormP p, CounterRng& rng) {
  switch (p) {
    case NormP::linf: {
      Eigen::VectorXd z(n);
      for (int j = 0; j < n; ++j) z[j] = rng.uniform(-1.0, 1.0);
      return z;
    }
    case NormP::l2: {
      // Direction from normals, radius u^{1/n}.
      Eigen::VectorXd z(n);
      double norm2 = 0.0;
      do {
        for (int j = 0; j < n; ++j) z[j] = rng.normal();
        norm2 = z.squaredNorm();
      } while (norm2 == 0.0);
      double r = std::pow(rng.uniform01(), 1.0 / n);
      return z * (r / std::sqrt(norm2));
    }
    case NormP::l1: {
      Eigen::VectorXd z(n);
      while (true) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
          z[j] = rng.uniform(-1.0, 1.0);
          s += std::abs(z[j]);
        }
        if (s <= 1.0) return z;
      }
    }
  }
  throw ConfigError("unit_ball_point: bad norm");
}

}  // namespace

Eigen::VectorXd sample_box_one(const Box& box, const SampleStream& stream,
                               long long index) {
  CounterRng rng = stream.generator(index);
  Eigen::VectorXd x(box.dim());
  for (int j = 0; j < box.dim(); ++j)
    x[j] = rng.uniform(box.lower()[j], box.upper()[j]);
  return x;
}

std::vector<Eigen::VectorXd> sample_box(const Box& box,
                                        const SampleStream& stream,
                                        long long count,
                                        long long index_offset) {
  if (count < 1) throw ConfigError("sample_box: count must be >= 1");
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (long long i = 0; i < count; ++i)
    out.push_back(sample_box_one(box, stream, index_offset + i));
  return out;
}

Eigen::VectorXd sample_nas_one(const NasSet& set, const SampleStream& stream,
                               long long index) {
  CounterRng rng = stream.generator(index);
  Eigen::VectorXd z = unit_ball_point(set.dim(), set.p(), rng);
  return set.center() + set.shape_inverse() * z;
}

std::vector<Eigen::VectorXd> sample_nas(const NasSet& set,
                                        const SampleStream& stream,
                                        long long count,
                                        long long index_offset) {
  if (count < 1) throw ConfigError("sample_nas: count must be >= 1");
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (long long i = 0; i < count; ++i)
    out.push_back(sample_nas_one(set, stream, index_offset + i));
  return out;
}

std::vector<Eigen::VectorXd> sample_pas(const PasSet& set,
                                        const SampleStream& stream,
                                        long long count,
                                        long long max_attempts) {
  if (count < 1) throw ConfigError("sample_pas: count must be >= 1");
  if (max_attempts < count)
    throw ConfigError("sample_pas: max_attempts must be >= count");
  const Box& box = set.domain();
  const long long budget = std::max<long long>(1, max_attempts / count);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (long long i = 0; i < count; ++i) {
    CounterRng rng = stream.generator(i);
    bool accepted = false;
    for (long long attempt = 0; attempt < budget; ++attempt) {
      Eigen::VectorXd x(box.dim());
      for (int j = 0; j < box.dim(); ++j)
        x[j] = rng.uniform(box.lower()[j], box.upper()[j]);
      if (set.evaluate(x) >= 1.0) {
        out.push_back(std::move(x));
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw SolverError(
          "sample_pas: acceptance-rate failure, exhausted " +
          std::to_string(budget) + " draws for sample " + std::to_string(i));
  }
  return out;
}

}  // namespace randset
