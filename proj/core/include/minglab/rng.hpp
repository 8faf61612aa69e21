#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "minglab/state.hpp"

namespace minglab {

/// Seeded generator with hand-rolled variate transforms, so identical seeds
/// give identical streams on every platform (std::uniform_real_distribution
/// and friends are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal (Box-Muller).
  double normal();

  /// Haar-ish random unit vector: i.i.d. complex normals, normalized.
  std::vector<Complex> unit_vector(std::size_t dim);

  std::array<Complex, 2> unit_qubit();

  /// k distinct positions in [0, n).
  std::vector<std::size_t> distinct_positions(std::size_t k, std::size_t n);

 private:
  std::mt19937_64 gen_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace minglab
