#pragma once

#include <cstdint>
#include <random>

#include "fleetsample/model.hpp"

namespace fleetsample {

enum class StreamPurpose : std::uint64_t { Observe = 1, Upload = 2, Generate = 3 };

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seedable stream built on std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. Uniforms and categorical draws are derived here rather than
/// through <random> distributions, which are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Inverse-CDF draw over nonnegative weights summing to ~1.
  std::size_t categorical(const Eigen::Ref<const Vector>& probs);
  /// Standard normal via Box-Muller.
  double normal();
  /// Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape);
  /// Dirichlet(alpha, ..., alpha) over n entries.
  Vector dirichlet(std::size_t n, double alpha);

 private:
  std::mt19937_64 engine_;
};

/// Independent stream for (seed, robot, round, purpose). Adding robots or rounds
/// never perturbs the draws of existing ones.
RngStream make_substream(std::uint64_t seed, int robot, int round, StreamPurpose purpose);

}  // namespace fleetsample
