#pragma once

#include <cstdint>
#include <initializer_list>
#include <utility>

namespace moma::rng {

// Counter-based randomness: every draw is a pure function of a key built from
// the run seed plus whatever identifies the draw site (stream tag, frame,
// entity id, ...). Evaluation order therefore never affects the noise.

// Distinct stream tags so unrelated consumers of the same (seed, frame, id)
// tuple never collide.
inline constexpr std::uint64_t kStreamPixel = 0x9e3779b97f4a7c15ull;
inline constexpr std::uint64_t kStreamFlow = 0xbf58476d1ce4e5b9ull;
inline constexpr std::uint64_t kStreamDepth = 0x94d049bb133111ebull;
inline constexpr std::uint64_t kStreamOutlier = 0xd6e8feb86659fd93ull;
inline constexpr std::uint64_t kStreamScatter = 0xa0761d6478bd642full;

std::uint64_t mix(std::initializer_list<std::uint64_t> words);

// Key component for a continuous timestamp, quantized to microseconds.
std::uint64_t time_key(double seconds);

// Uniform in [0, 1).
double uniform(std::uint64_t key);

// Two independent standard normal deviates from one key (Box-Muller).
std::pair<double, double> gaussian_pair(std::uint64_t key);

}  // namespace moma::rng
