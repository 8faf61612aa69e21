#pragma once

#include <cstddef>
#include <cstdint>

namespace minglab {

bool is_prime(std::uint64_t n);

/// Size and renormalized action constant of an n-site amplifier.  The level
/// spacing h_n = h0/n shrinks as the device grows, keeping the spectrum of a
/// full-period orbit inside [0, h0).
struct ApparatusSpec {
  std::size_t n;
  double h0;
  double h_n;
  bool prime;

  static ApparatusSpec make(std::size_t n, double h0 = 1.0);
};

}  // namespace minglab
