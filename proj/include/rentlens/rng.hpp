#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rentlens {

// splitmix64 step; used to derive independent seed streams from
// (user seed, structural path) pairs so parallel and serial runs agree.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b));
}

// Unbiased-enough index draw with a sequence we fully control.
// std::uniform_int_distribution is implementation-defined, so regression
// byte-identity would silently depend on the standard library; this does not.
inline std::size_t rand_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rand_index(rng, i)]);
  }
}

}  // namespace rentlens
