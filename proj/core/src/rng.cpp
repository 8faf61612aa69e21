#include "minglab/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace minglab {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  double u1 = uniform01();
  while (u1 == 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  have_cached_ = true;
  return r * std::cos(angle);
}

std::vector<Complex> Rng::unit_vector(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("unit_vector(0)");
  std::vector<Complex> v(dim);
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (Complex& c : v) {
      c = Complex{normal(), normal()};
      norm_sq += std::norm(c);
    }
  } while (norm_sq == 0.0);
  const double scale = 1.0 / std::sqrt(norm_sq);
  for (Complex& c : v) c *= scale;
  return v;
}

std::array<Complex, 2> Rng::unit_qubit() {
  const std::vector<Complex> v = unit_vector(2);
  return {v[0], v[1]};
}

std::vector<std::size_t> Rng::distinct_positions(std::size_t k, std::size_t n) {
  if (k > n) throw std::invalid_argument("cannot draw more positions than exist");
  std::vector<std::size_t> out;
  out.reserve(k);
  std::vector<bool> used(n, false);
  while (out.size() < k) {
    const std::size_t p = static_cast<std::size_t>(below(n));
    if (!used[p]) {
      used[p] = true;
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace minglab
