#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace collab {

/// Generator used everywhere a seeded stream is needed.
using Rng = std::mt19937_64;

inline constexpr std::string_view kRngName = "mt19937_64";

/// SplitMix64 finalizer; used to derive decorrelated child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for an independent stream identified by (master seed, stream index).
/// Depends only on the pair, never on how work is split across threads.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_seed(master, index));
}

}  // namespace collab
