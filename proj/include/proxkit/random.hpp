#pragma once

#include <array>
#include <cstdint>

namespace proxkit {

// Philox4x32-10 block function (Salmon et al., Random123). Exposed for
// known-answer testing.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Counter-based random stream. The output is a pure function of
// (seed, stream_id, counter), so two streams built from the same seed and
// stream id produce the same draws on every platform, and streams with
// different ids are independent. Normal draws go through std::log/std::cos,
// so cross-platform equality of those relies on a correctly rounded libm.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Unbiased integer in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  // Child stream with a stream id derived from (stream_id, key). The
  // parent's counter is not advanced.
  RandomStream split(std::uint64_t key) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<std::uint32_t, 4> block_{};
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace proxkit
