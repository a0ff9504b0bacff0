#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <span>

namespace epihumat {

// SplitMix64 finalizer. Used both to derive sub-stream seeds and as a
// counter-based hash for order-independent draws.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_keys(std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k));
  return h;
}

// Top 53 bits mapped onto [0,1).
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform [0,1) value fully determined by the keys. Draws keyed on
// (stream, day, pair, channel) make results independent of iteration order.
constexpr double keyed_uniform(std::initializer_list<std::uint64_t> keys) noexcept {
  return to_unit(hash_keys(keys));
}

// Named sub-streams. Each module draws from its own stream so that adding
// draws in one module cannot shift another module's sequence.
enum class Stream : std::uint64_t {
  Population = 1,
  Placement = 2,
  Network = 3,
  CriticalNodes = 4,
  Seeding = 5,
  HumatOrder = 6,
  Humat = 7,
  Epidemic = 8,
  Movement = 9,
  Contagion = 10,
  Repair = 11,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return to_unit(engine_()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

  // Unbiased integer in [0, n) (Lemire's multiply-shift with rejection).
  std::size_t index(std::size_t n) {
    if (n <= 1) return 0;
    const auto bound = static_cast<std::uint64_t>(n);
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::size_t>(m >> 64);
  }

  // Box-Muller; one value per call keeps the stream layout simple.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t stream_seed(std::uint64_t seed, Stream stream) {
  return hash_keys({seed, static_cast<std::uint64_t>(stream)});
}

inline Rng make_stream(std::uint64_t seed, Stream stream) { return Rng(stream_seed(seed, stream)); }

}  // namespace epihumat
