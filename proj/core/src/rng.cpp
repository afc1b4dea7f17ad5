#include "moma/rng.hpp"

#include <cmath>

namespace moma::rng {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x2545f4914f6cdd1dull;
  for (std::uint64_t w : words) {
    h = splitmix64(h ^ w);
  }
  return h;
}

std::uint64_t time_key(double seconds) {
  return static_cast<std::uint64_t>(std::llround(seconds * 1e6));
}

double uniform(std::uint64_t key) {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

std::pair<double, double> gaussian_pair(std::uint64_t key) {
  const std::uint64_t a = splitmix64(key);
  const std::uint64_t b = splitmix64(a);
  // u1 in (0, 1] so the log is finite.
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace moma::rng
