#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sdeqbic {

/// Identifies one reproducible random stream. Equal (seed, stream_id) pairs
/// yield identical draw sequences; distinct stream_ids are statistically
/// independent streams of the same experiment seed.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Avalanche-mixes two words into one stream id, e.g. hash(experiment,
/// replicate) for per-replicate streams.
inline std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = a;
  std::uint64_t mixed = detail::splitmix64(state);
  state = mixed ^ b;
  return detail::splitmix64(state);
}

inline std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b,
                                   std::uint64_t c) {
  return derive_stream(derive_stream(a, b), c);
}

/// mt19937_64 with explicit uniform and normal transforms. The standard
/// library distributions are implementation-defined, so both transforms are
/// spelled out here: uniform uses the top 53 bits, normal is Box-Muller
/// consuming exactly two engine draws per call.
class Rng {
 public:
  explicit Rng(RngStream stream) {
    std::uint64_t state = stream.seed;
    const std::uint64_t a = detail::splitmix64(state);
    state ^= stream.stream_id * 0xD1B54A32D192ED03ull;
    const std::uint64_t b = detail::splitmix64(state);
    std::seed_seq seq{static_cast<std::uint32_t>(a),
                      static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b),
                      static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; safe under log().
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sdeqbic
