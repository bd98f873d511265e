#include "histspec/rng.hpp"

#include <cmath>

#include "histspec/errors.hpp"

namespace histspec {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
  const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
  const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
  const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
  const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
  const std::uint32_t out0 = hi1 ^ ctr[1] ^ key[0];
  const std::uint32_t out2 = hi0 ^ ctr[3] ^ key[1];
  ctr[0] = out0;
  ctr[1] = lo1;
  ctr[2] = out2;
  ctr[3] = lo0;
}

inline void philox_block(std::uint32_t ctr[4], std::uint32_t k0, std::uint32_t k1) {
  std::uint32_t key[2] = {k0, k1};
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    philox_round(ctr, key);
  }
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : stream_(stream) {
  key_[0] = std::uint32_t(seed);
  key_[1] = std::uint32_t(seed >> 32);
}

void Rng::refill() {
  std::uint32_t ctr[4] = {
      std::uint32_t(block_index_), std::uint32_t(block_index_ >> 32),
      std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
  philox_block(ctr, key_[0], key_[1]);
  buf_[0] = std::uint64_t(ctr[0]) | (std::uint64_t(ctr[1]) << 32);
  buf_[1] = std::uint64_t(ctr[2]) | (std::uint64_t(ctr[3]) << 32);
  ++block_index_;
  buf_pos_ = 0;
}

std::uint64_t Rng::next_u64() {
  if (buf_pos_ >= 2) refill();
  return buf_[buf_pos_++];
}

double Rng::uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

double Rng::gaussian() {
  if (has_gauss_cache_) {
    has_gauss_cache_ = false;
    return gauss_cache_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  gauss_cache_ = radius * std::sin(angle);
  has_gauss_cache_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw ValidationError("Rng::below: bound must be positive");
  // Lemire's unbiased multiply-shift rejection.
  std::uint64_t x = next_u64();
  __uint128_t m = __uint128_t(x) * bound;
  std::uint64_t lo = std::uint64_t(m);
  if (lo < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (lo < threshold) {
      x = next_u64();
      m = __uint128_t(x) * bound;
      lo = std::uint64_t(m);
    }
  }
  return std::uint64_t(m >> 64);
}

std::uint64_t Rng::derive(std::uint64_t master, const std::vector<std::uint64_t>& coords) {
  std::uint64_t acc = master;
  for (std::uint64_t c : coords) {
    std::uint32_t ctr[4] = {std::uint32_t(c), std::uint32_t(c >> 32), kWeyl0, kWeyl1};
    philox_block(ctr, std::uint32_t(acc), std::uint32_t(acc >> 32));
    acc = std::uint64_t(ctr[0]) | (std::uint64_t(ctr[1]) << 32);
  }
  return acc;
}

}  // namespace histspec
