#pragma once

#include <cstdint>
#include <random>

namespace madphys::numerics {

/// Independent random streams used by one environment instance.
enum class Stream : std::uint64_t {
  Init = 1,
  Noise = 2,
  Query = 3,
  Agent = 4,
};

/// Deterministic generator keyed by (seed, stream-id).
///
/// Streams are built by feeding both keys through std::seed_seq into a
/// std::mt19937_64, whose output sequence is fixed by the standard. Uniform
/// and gaussian draws are derived here rather than through the standard
/// distributions, which are implementation-defined.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream_id);
  SeededRng(std::uint64_t seed, Stream stream)
      : SeededRng(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t draws() const noexcept { return draws_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

/// One draw from N(mean, sigma^2); sigma == 0 returns mean exactly.
double sample_gaussian(SeededRng& rng, double mean, double sigma);

/// Uniform draw in [lo, hi); lo == hi returns lo.
double sample_uniform(SeededRng& rng, double lo, double hi);

}  // namespace madphys::numerics
