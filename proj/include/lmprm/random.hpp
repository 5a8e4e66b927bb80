#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lmprm {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent child seeds from a parent.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Child seed for the stream identified by `tags` under `parent`.
// derive_seed(s, {a, b}) == derive_seed(derive_seed(s, {a}), {b}).
inline std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = parent;
  for (std::uint64_t t : tags) s = mix64(s ^ mix64(t + 0x632BE59BD9B4E019ULL));
  return s;
}

}  // namespace lmprm
