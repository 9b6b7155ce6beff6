#pragma once

#include <cstdint>
#include <random>

namespace sdlm {

using Rng = std::mt19937_64;

/// splitmix64 finaliser; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of an independent child stream. Distinct `index` values give distinct seeds.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(parent ^ mix64(index));
}

/// Seed of batch `b` under a master seed. Batch 0 keeps the master seed so a
/// single-batch run reproduces the serial engine.
constexpr std::uint64_t batch_seed(std::uint64_t master, std::uint64_t b) {
  return master ^ (b * 0x9E3779B97F4A7C15ULL);
}

}  // namespace sdlm
