#pragma once

#include <cstdint>
#include <random>

namespace zinbspc {

/// Deterministic random stream.
///
/// Variate generation is implemented here rather than through the
/// <random> distribution templates, whose algorithms differ between
/// standard libraries. Only the engine (std::mt19937_64, fully specified
/// by the standard) is borrowed, so a given seed produces the same
/// sequence on every conforming platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for replication `index` under `master_seed`.
  /// The derived seed depends only on the pair, never on scheduling.
  static RandomStream for_replication(std::uint64_t master_seed,
                                      std::uint64_t index);

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  /// Uniform on (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }
  double normal();
  /// Gamma with the given shape and scale (mean shape * scale).
  double gamma(double shape, double scale);
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used for seed derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace zinbspc
