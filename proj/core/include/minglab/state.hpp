#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "minglab/orbit.hpp"
#include "minglab/pattern.hpp"

namespace minglab {

using Complex = std::complex<double>;

/// Largest n for which full 2^n state vectors (the dense oracle path) are
/// permitted.
inline constexpr std::size_t kDenseCap = 12;

/// Apparatus state supported either on a single shift orbit (fast path,
/// amplitudes indexed by orbit position) or on the full 2^n pattern basis
/// (dense oracle path, amplitudes indexed by pattern index).  Norm is 1, or
/// exactly 0 for an unoccupied sector.
class SectorState {
 public:
  enum class Kind { kOrbit, kDense };

  static SectorState orbit_vector(OrbitBasisPtr basis, std::vector<Complex> amplitudes);
  static SectorState orbit_basis_vector(OrbitBasisPtr basis, std::size_t member_index);
  static SectorState dense_vector(std::size_t n, std::vector<Complex> amplitudes);
  static SectorState dense_basis_vector(std::size_t n, std::uint64_t pattern_index);
  static SectorState empty_orbit(OrbitBasisPtr basis);

  Kind kind() const { return kind_; }
  bool is_orbit() const { return kind_ == Kind::kOrbit; }
  bool is_dense() const { return kind_ == Kind::kDense; }

  std::size_t apparatus_size() const { return n_; }
  const OrbitBasisPtr& basis() const;  // orbit states only
  const std::vector<Complex>& amplitudes() const { return amp_; }
  std::vector<Complex>& mutable_amplitudes() { return amp_; }

  double norm() const;
  bool is_empty() const;  // norm exactly zero (unoccupied sector)

  /// Orbit state expanded onto the full 2^n basis.  Requires n <= kDenseCap.
  SectorState to_dense() const;

 private:
  SectorState(Kind kind, std::size_t n, OrbitBasisPtr basis, std::vector<Complex> amp)
      : kind_(kind), n_(n), basis_(std::move(basis)), amp_(std::move(amp)) {}

  void check_norm() const;

  Kind kind_;
  std::size_t n_;
  OrbitBasisPtr basis_;  // null for dense states
  std::vector<Complex> amp_;
};

/// Incident-particle amplitudes: a0 on "particle absent", a1 on "particle
/// present".  |a0|^2 + |a1|^2 = 1.
struct Incident {
  Complex a0;
  Complex a1;

  static Incident make(Complex a0, Complex a1);
  /// a1 = sqrt(a1_sq) e^{i phase}, a0 = sqrt(1 - a1_sq) real.
  static Incident from_prob(double a1_sq, double phase = 0.0);

  double a0_sq() const { return std::norm(a0); }
  double a1_sq() const { return std::norm(a1); }
};

/// State of particle + apparatus restricted to the reachable form
/// a0 (psi0 x s0) + a1 (psi1 x s1).  The two sector states must use the same
/// representation; a sector may be empty only if its amplitude vanishes.
struct CombinedState {
  Complex a0;
  Complex a1;
  SectorState sector0;
  SectorState sector1;

  static CombinedState make(Incident v0, SectorState s0, SectorState s1);

  /// The standard initial condition: incident state v0, both sectors on the
  /// given apparatus basis vector.
  static CombinedState initial(Incident v0, OrbitBasisPtr basis, std::size_t member_index = 0);

  double norm() const;
};

}  // namespace minglab
