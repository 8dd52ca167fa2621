#include "mmpo/rng.hpp"

#include <stdexcept>

namespace mmpo {
namespace {

constexpr std::uint64_t kPhi64 = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

RngStream RngStream::root(std::uint64_t seed) {
  return RngStream(mix64(seed ^ kPhi64));
}

RngStream RngStream::child(std::string_view tag, std::uint64_t index) const {
  return RngStream(mix64(key_ ^ fnv1a64(tag) ^ ((index + 1) * kPhi64)));
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kPhi64);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("next_below: n must be positive");
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

int RngStream::sample_categorical(std::span<const double> probs) {
  if (probs.empty()) {
    throw std::invalid_argument("sample_categorical: empty distribution");
  }
  const double u = next_double();
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_positive = static_cast<int>(i);
    acc += probs[i];
    if (u < acc && probs[i] > 0.0) return static_cast<int>(i);
  }
  if (last_positive < 0) {
    throw std::invalid_argument("sample_categorical: all-zero distribution");
  }
  return last_positive;
}

}  // namespace mmpo
