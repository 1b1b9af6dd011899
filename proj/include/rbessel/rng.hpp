#pragma once

#include <cstdint>

namespace rbessel {

// SplitMix64 finaliser. Bijective on 64-bit words, so distinct replication
// indices always map to distinct stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream-splitting rule: replication r of an experiment draws its noise from
// an engine seeded with base_seed XOR mix64(r).
constexpr std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t r) noexcept {
  return base_seed ^ mix64(r);
}

}  // namespace rbessel
