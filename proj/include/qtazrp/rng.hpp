#ifndef QTAZRP_RNG_HPP
#define QTAZRP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace qtazrp {

/// SplitMix64: tiny 64-bit generator with a closed-form jump, used for all
/// randomness in the project so that results are identical across platforms
/// (std::random distributions are not portable).  Substreams are derived by
/// seeding with a mixed (seed, stream) pair.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Independent substream i of a master seed.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t i) {
    SplitMix64 g(seed + 0x9E3779B97F4A7C15ULL * (i + 1));
    g.next();  // decorrelate nearby seeds
    return g;
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in the open interval (0,1).
  double uniform01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi] inclusive.
  long uniform_int(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(next() % span);
  }

  /// Exponential waiting time with the given rate.
  double exponential(double rate) { return -std::log(uniform01()) / rate; }

 private:
  std::uint64_t state_;
};

}  // namespace qtazrp

#endif
