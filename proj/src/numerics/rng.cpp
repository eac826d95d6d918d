#include "madphys/numerics/rng.hpp"

#include <cmath>
#include <numbers>

#include "madphys/core/error.hpp"

namespace madphys::numerics {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x6d616450u};
  return std::mt19937_64(seq);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

std::uint64_t SeededRng::next_u64() {
  ++draws_;
  return engine_();
}

double SeededRng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t SeededRng::uniform_index(std::uint64_t n) {
  if (n == 0) throw ArgumentError("uniform_index: empty range");
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

double sample_gaussian(SeededRng& rng, double mean, double sigma) {
  if (!(sigma >= 0.0)) throw ArgumentError("sample_gaussian: sigma must be >= 0");
  // Box-Muller; always consumes two draws so stream positions stay aligned.
  const double u1 = 1.0 - rng.uniform01();  // (0, 1]
  const double u2 = rng.uniform01();
  if (sigma == 0.0) return mean;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return mean + sigma * radius * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_uniform(SeededRng& rng, double lo, double hi) {
  if (!(lo <= hi)) throw ArgumentError("sample_uniform: lo > hi");
  const double u = rng.uniform01();
  if (lo == hi) return lo;
  const double x = lo + (hi - lo) * u;
  return x < hi ? x : std::nextafter(hi, lo);
}

}  // namespace madphys::numerics
