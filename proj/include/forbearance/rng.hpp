#ifndef FORBEARANCE_RNG_HPP
#define FORBEARANCE_RNG_HPP

#include <cstdint>
#include <random>

// Counter-based stream splitting: every (seed, stream, lane) triple maps to an
// independent engine, so work items can be generated in any order.

namespace forbearance {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t lane = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ lane);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t lane = 0) {
  return std::mt19937_64(stream_key(seed, stream, lane));
}

/// Beta(a, b) via the ratio of two gamma draws.
template <class Engine>
double draw_beta(Engine& eng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(eng);
  const double y = gb(eng);
  return x / (x + y);
}

}  // namespace forbearance

#endif  // FORBEARANCE_RNG_HPP
