#include "minglab/orbit.hpp"

#include <stdexcept>

namespace minglab {

namespace {

// Rightward cyclic shift acting on the index encoding (b1 = MSB).
std::uint64_t shift_index(std::uint64_t v, std::size_t n) {
  return (v >> 1) | ((v & 1u) << (n - 1));
}

std::uint64_t totient(std::uint64_t d) {
  std::uint64_t result = d;
  for (std::uint64_t p = 2; p * p <= d; ++p) {
    if (d % p == 0) {
      while (d % p == 0) d /= p;
      result -= result / p;
    }
  }
  if (d > 1) result -= result / d;
  return result;
}

constexpr std::size_t kEnumerationCap = 20;

}  // namespace

OrbitBasis::OrbitBasis(Pattern representative)
    : rep_(std::move(representative)), period_(rep_.rotation_period()) {}

std::vector<Pattern> OrbitBasis::members() const {
  std::vector<Pattern> out;
  out.reserve(period_);
  out.push_back(rep_);
  for (std::size_t j = 1; j < period_; ++j) out.push_back(shift(out.back()));
  return out;
}

std::uint64_t count_orbits_by_enumeration(std::size_t n) {
  if (n < 2) throw std::invalid_argument("orbit counting needs n >= 2");
  if (n > kEnumerationCap) {
    throw std::invalid_argument("enumeration limited to n <= 20");
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  std::uint64_t orbits = 0;
  for (std::uint64_t v = 0; v < total; ++v) {
    bool minimal = true;
    std::uint64_t w = v;
    for (std::size_t j = 1; j < n; ++j) {
      w = shift_index(w, n);
      if (w < v) {
        minimal = false;
        break;
      }
      if (w == v) break;  // proper period reached
    }
    if (minimal) ++orbits;
  }
  return orbits;
}

std::uint64_t count_orbits_by_burnside(std::size_t n) {
  if (n < 2) throw std::invalid_argument("orbit counting needs n >= 2");
  if (n > 62) {
    throw std::overflow_error("orbit count exceeds 64-bit capacity for n > 62");
  }
  // Burnside: orbits = (1/n) sum over d | n of phi(d) * 2^{n/d}.
  std::uint64_t sum = 0;
  for (std::uint64_t d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    sum += totient(d) * (std::uint64_t{1} << (n / d));
  }
  return sum / n;
}

std::uint64_t count_orbits(std::size_t n) {
  if (n < 2) throw std::invalid_argument("orbit counting needs n >= 2");
  if (n <= kEnumerationCap) return count_orbits_by_enumeration(n);
  return count_orbits_by_burnside(n);
}

std::vector<std::vector<std::uint64_t>> enumerate_orbit_index_lists(std::size_t n) {
  if (n < 2 || n > kEnumerationCap) {
    throw std::invalid_argument("orbit enumeration limited to 2 <= n <= 20");
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<std::vector<std::uint64_t>> orbits;
  std::vector<bool> seen(total, false);
  for (std::uint64_t v = 0; v < total; ++v) {
    if (seen[v]) continue;
    std::vector<std::uint64_t> members;
    std::uint64_t w = v;
    do {
      members.push_back(w);
      seen[w] = true;
      w = shift_index(w, n);
    } while (w != v);
    orbits.push_back(std::move(members));
  }
  return orbits;
}

}  // namespace minglab
