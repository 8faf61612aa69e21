#include "minglab/state.hpp"

#include <cmath>
#include <stdexcept>

namespace minglab {

namespace {

constexpr double kNormTol = 1e-12;

double squared_norm(const std::vector<Complex>& amp) {
  double s = 0.0;
  for (const Complex& a : amp) s += std::norm(a);
  return s;
}

}  // namespace

void SectorState::check_norm() const {
  const double n2 = squared_norm(amp_);
  if (n2 == 0.0) return;  // unoccupied sector
  if (std::abs(std::sqrt(n2) - 1.0) > kNormTol) {
    throw std::invalid_argument("sector state must have unit norm (or be empty)");
  }
}

SectorState SectorState::orbit_vector(OrbitBasisPtr basis, std::vector<Complex> amplitudes) {
  if (!basis) throw std::invalid_argument("null orbit basis");
  if (amplitudes.size() != basis->period()) {
    throw std::invalid_argument("amplitude count must equal orbit period");
  }
  const std::size_t n = basis->apparatus_size();
  SectorState s(Kind::kOrbit, n, std::move(basis), std::move(amplitudes));
  s.check_norm();
  return s;
}

SectorState SectorState::orbit_basis_vector(OrbitBasisPtr basis, std::size_t member_index) {
  if (!basis) throw std::invalid_argument("null orbit basis");
  if (member_index >= basis->period()) throw std::invalid_argument("member index out of range");
  std::vector<Complex> amp(basis->period(), Complex{0.0, 0.0});
  amp[member_index] = Complex{1.0, 0.0};
  return orbit_vector(std::move(basis), std::move(amp));
}

SectorState SectorState::dense_vector(std::size_t n, std::vector<Complex> amplitudes) {
  if (n < 2) throw std::invalid_argument("apparatus needs at least 2 sites");
  if (n > kDenseCap) {
    throw std::invalid_argument("dense states limited to n <= " + std::to_string(kDenseCap));
  }
  if (amplitudes.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("dense amplitude count must be 2^n");
  }
  SectorState s(Kind::kDense, n, nullptr, std::move(amplitudes));
  s.check_norm();
  return s;
}

SectorState SectorState::dense_basis_vector(std::size_t n, std::uint64_t pattern_index) {
  if (n < 2 || n > kDenseCap) throw std::invalid_argument("dense states limited to n <= 12");
  if (pattern_index >> n) throw std::invalid_argument("pattern index out of range");
  std::vector<Complex> amp(std::size_t{1} << n, Complex{0.0, 0.0});
  amp[pattern_index] = Complex{1.0, 0.0};
  return dense_vector(n, std::move(amp));
}

SectorState SectorState::empty_orbit(OrbitBasisPtr basis) {
  if (!basis) throw std::invalid_argument("null orbit basis");
  std::vector<Complex> amp(basis->period(), Complex{0.0, 0.0});
  const std::size_t n = basis->apparatus_size();
  return SectorState(Kind::kOrbit, n, std::move(basis), std::move(amp));
}

const OrbitBasisPtr& SectorState::basis() const {
  if (kind_ != Kind::kOrbit) throw std::logic_error("dense state has no orbit basis");
  return basis_;
}

double SectorState::norm() const { return std::sqrt(squared_norm(amp_)); }

bool SectorState::is_empty() const { return squared_norm(amp_) == 0.0; }

SectorState SectorState::to_dense() const {
  if (kind_ == Kind::kDense) return *this;
  const std::size_t n = n_;
  if (n > kDenseCap) throw std::invalid_argument("orbit too large to expand densely");
  std::vector<Complex> amp(std::size_t{1} << n, Complex{0.0, 0.0});
  for (std::size_t j = 0; j < basis_->period(); ++j) {
    amp[basis_->member(j).to_index()] += amp_[j];
  }
  return SectorState(Kind::kDense, n, nullptr, std::move(amp));
}

Incident Incident::make(Complex a0, Complex a1) {
  const double total = std::norm(a0) + std::norm(a1);
  if (std::abs(total - 1.0) > kNormTol) {
    throw std::invalid_argument("incident amplitudes must satisfy |a0|^2 + |a1|^2 = 1");
  }
  return Incident{a0, a1};
}

Incident Incident::from_prob(double a1_sq, double phase) {
  if (!(a1_sq >= 0.0 && a1_sq <= 1.0)) {
    throw std::invalid_argument("a1_sq must lie in [0, 1]");
  }
  const Complex a1 = std::polar(std::sqrt(a1_sq), phase);
  return Incident{Complex{std::sqrt(1.0 - a1_sq), 0.0}, a1};
}

CombinedState CombinedState::make(Incident v0, SectorState s0, SectorState s1) {
  if (s0.apparatus_size() != s1.apparatus_size()) {
    throw std::invalid_argument("sector apparatus sizes differ");
  }
  if (s0.is_empty() && std::norm(v0.a0) > kNormTol) {
    throw std::invalid_argument("occupied sector 0 needs a unit-norm state");
  }
  if (s1.is_empty() && std::norm(v0.a1) > kNormTol) {
    throw std::invalid_argument("occupied sector 1 needs a unit-norm state");
  }
  return CombinedState{v0.a0, v0.a1, std::move(s0), std::move(s1)};
}

CombinedState CombinedState::initial(Incident v0, OrbitBasisPtr basis, std::size_t member_index) {
  SectorState s = SectorState::orbit_basis_vector(std::move(basis), member_index);
  return CombinedState{v0.a0, v0.a1, s, s};
}

double CombinedState::norm() const {
  const double s0 = sector0.norm();
  const double s1 = sector1.norm();
  return std::sqrt(std::norm(a0) * s0 * s0 + std::norm(a1) * s1 * s1);
}

}  // namespace minglab
