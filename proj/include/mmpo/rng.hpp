#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace mmpo {

std::uint64_t fnv1a64(std::string_view s);

// Counter-based random stream.  A stream is named by a 64-bit key; draws mix
// the key with an advancing counter, so a stream's output depends only on
// (key, draw index).  Child streams are derived as
//
//   child(tag, i).key = mix(parent.key ^ fnv1a64(tag) ^ (i + 1) * PHI64)
//
// which makes every (master seed, tag path, index) name the same stream no
// matter how work is scheduled across threads.
class RngStream {
 public:
  static RngStream root(std::uint64_t seed);
  RngStream child(std::string_view tag, std::uint64_t index = 0) const;

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53-bit resolution.
  double next_double();
  // Uniform over {0, ..., n-1}; n must be > 0.
  std::uint64_t next_below(std::uint64_t n);
  // Inverse-CDF draw; falls back to the last positive-probability index when
  // rounding pushes the cumulative sum below the drawn uniform.
  int sample_categorical(std::span<const double> probs);

 private:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace mmpo
