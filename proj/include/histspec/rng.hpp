#pragma once

#include <cstdint>
#include <vector>

namespace histspec {

/// Counter-based pseudo-random generator: Philox4x32-10.
///
/// The generator identity is pinned as "philox4x32-10/v1"; all randomness in
/// the library flows through it so that a (seed, stream) pair reproduces the
/// exact same draw sequence on any platform. Sub-streams for experiment cells
/// are derived with Rng::derive, which chains one Philox block per coordinate,
/// so extending a parameter grid never perturbs existing cells.
class Rng {
 public:
  static constexpr const char* kName = "philox4x32-10/v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  /// Uniform double in (0, 1]; used as the log argument in Box-Muller.
  double uniform_open();

  /// Standard normal via Box-Muller on the pinned uniform stream.
  double gaussian();

  /// Unbiased uniform integer in [0, bound). bound must be >= 1.
  std::uint64_t below(std::uint64_t bound);

  /// Derive a sub-seed from a master seed and cell coordinates.
  static std::uint64_t derive(std::uint64_t master, const std::vector<std::uint64_t>& coords);

 private:
  void refill();

  std::uint32_t key_[2];
  std::uint64_t block_index_ = 0;
  std::uint64_t stream_;
  std::uint64_t buf_[2];
  int buf_pos_ = 2;
  double gauss_cache_ = 0.0;
  bool has_gauss_cache_ = false;
};

}  // namespace histspec
