#pragma once

#include <cstdint>
#include <random>

namespace qrep {

// Derives a well-mixed 64-bit stream seed from (base seed, stream index).
// Two rounds of the splitmix64 finalizer keep nearby indices decorrelated.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

// Deterministic per-stream RNG.  Every stochastic entity (trajectory,
// repeater run, bootstrap resample) owns the stream named by its index, so
// results are independent of batching, ordering, or thread count, and two
// runs with the same (seed, index) are bit-identical.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t index)
      : gen_(stream_seed(seed, index)) {}

  // Uniform on [0, 1) with 53-bit resolution, independent of library
  // distribution internals.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]: safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform(); }

  // Standard normal via Box-Muller (pair cached).
  double normal();

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace qrep
