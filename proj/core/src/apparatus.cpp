#include "minglab/apparatus.hpp"

#include <stdexcept>

namespace minglab {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

ApparatusSpec ApparatusSpec::make(std::size_t n, double h0) {
  if (n < 2) throw std::invalid_argument("apparatus needs at least 2 sites");
  if (!(h0 > 0.0)) throw std::invalid_argument("h0 must be positive");
  return ApparatusSpec{n, h0, h0 / static_cast<double>(n), is_prime(n)};
}

}  // namespace minglab
