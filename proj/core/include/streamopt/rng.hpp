#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace streamopt {

// splitmix64 finalizer; used to turn structured stream labels into
// well-separated 64-bit engine seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, for folding string labels (method names, experiment ids) into keys.
inline std::uint64_t label_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives one engine seed from a base seed plus an ordered list of parts
// (run id, substream tag, hashed labels). Different part lists give
// statistically independent streams.
inline std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t p : parts) h = mix64(h ^ p);
  return h;
}

// One RNG substream. Uniforms are built from the raw 64-bit output so the
// result is always in [0, 1); std::uniform_real_distribution may round to 1.0
// which would break Bernoulli(p = 1) exactness.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : engine_(key) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double gaussian() { return normal_(engine_); }

  // Consumes exactly one uniform regardless of p.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Substream tags; keep values stable, they are part of the determinism
// contract.
enum class Substream : std::uint64_t {
  kData = 1,
  kSubsample = 2,
  kInit = 3,
  kModel = 4,
};

inline std::uint64_t substream_tag(Substream s) { return static_cast<std::uint64_t>(s); }

}  // namespace streamopt
