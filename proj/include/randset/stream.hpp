#pragma once

#include <cstdint>

namespace randset {

// Purpose tags for substreams. Keeping them in one table makes every random
// draw in the library attributable to (seed, epoch, index, purpose).
enum class Purpose : std::uint32_t {
  state_draw = 0,       // x-samples in Algorithms 1-3
  noise_draw = 1,       // w-samples in Algorithms 1-3
  meas_noise_draw = 2,  // v-samples when simulating a truth trajectory
  validate_state = 3,   // fresh x-samples for violation estimation
  validate_noise = 4,   // fresh w-samples for violation estimation
  pas_reject = 5,       // rejection sampling from a polynomial superlevel set
  truth_noise = 6,      // w-samples of the realized trajectory
  generic = 7,
};

// Counter-based generator: the i-th value is a pure function of
// (seed, epoch, index, purpose, i). Draws are reproducible under any
// parallel partitioning of sample indices.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::int64_t epoch, std::int64_t index,
             Purpose purpose) noexcept
      : base_(derive(seed, epoch, index, purpose)), counter_(0) {}

  std::uint64_t next_u64() noexcept {
    std::uint64_t z = base_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    return mix(z);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform01();
  }

  // Standard normal via Box-Muller; one value per call, the pair partner is
  // cached so successive calls consume uniforms deterministically.
  double normal();

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive(std::uint64_t seed, std::int64_t epoch,
                              std::int64_t index, Purpose purpose) noexcept {
    std::uint64_t h = mix(seed + 0x9E3779B97F4A7C15ULL);
    h = mix(h ^ (static_cast<std::uint64_t>(epoch) + 0xD1B54A32D192ED03ULL));
    h = mix(h ^ (static_cast<std::uint64_t>(index) + 0x8CB92BA72F3D8DD7ULL));
    h = mix(h ^ (static_cast<std::uint64_t>(purpose) + 0xEB44ACCAB455D165ULL));
    return h;
  }

  std::uint64_t base_;
  std::uint64_t counter_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// A stream names a family of per-index generators. Sample i of a multisample
// always uses generator(i), so the multisample does not depend on evaluation
// order or on how indices are split across workers.
struct SampleStream {
  std::uint64_t seed = 0;
  std::int64_t epoch = 0;
  Purpose purpose = Purpose::generic;

  CounterRng generator(std::int64_t index) const noexcept {
    return CounterRng(seed, epoch, index, purpose);
  }

  SampleStream with(Purpose p) const noexcept { return {seed, epoch, p}; }
  SampleStream at_epoch(std::int64_t k) const noexcept {
    return {seed, k, purpose};
  }
};

}  // namespace randset
