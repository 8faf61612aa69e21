#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "minglab/apparatus.hpp"
#include "minglab/orbit.hpp"
#include "minglab/state.hpp"

namespace minglab {

namespace detail {

/// Exact-length complex DFT (no padding visible to callers).  Thin wrapper
/// over FFTW; forward kernel exp(-2 pi i jk / len), backward its conjugate,
/// both unnormalized.  Execution is reentrant; plan creation is serialized.
class Fft {
 public:
  explicit Fft(std::size_t len);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t length() const { return len_; }
  void forward(const Complex* in, Complex* out) const;
  void backward(const Complex* in, Complex* out) const;

 private:
  std::size_t len_;
  void* fwd_ = nullptr;  // fftw_plan
  void* bwd_ = nullptr;
};

}  // namespace detail

/// Common surface of the two evolution routes so that combined-state
/// evolution and the averaging loops can run on either.
class Evolver {
 public:
  virtual ~Evolver() = default;
  virtual SectorState evolve(const SectorState& state, double t) const = 0;
};

/// Fast-path propagator on a single shift orbit.  The shift restricted to an
/// orbit of period l is diagonal in the orbit DFT basis, and Fourier mode k
/// picks up the phase exp(-2 pi i k (n/l) t); at t = 1/n this is exactly one
/// shift step, and t = 1 is the identity.  Cost per evaluation is
/// O(l log l), independent of the 2^n ambient dimension.
///
/// `phase_skew` is a validation hook: a nonzero value corrupts the mode-k
/// frequency from k(n/l) to k(n/l + skew), which preserves unitarity but
/// breaks shift exactness.  Production call sites leave it at 0.
class OrbitPropagator : public Evolver {
 public:
  OrbitPropagator(OrbitBasisPtr basis, ApparatusSpec spec, double phase_skew = 0.0);

  const OrbitBasisPtr& basis() const { return basis_; }
  const ApparatusSpec& spec() const { return spec_; }

  SectorState evolve(const SectorState& state, double t) const override;

  /// Coefficients of the state in the orbit DFT eigenbasis.
  std::vector<Complex> analyze(std::span<const Complex> amplitudes) const;

  /// Orbit-position amplitudes at time t from precomputed DFT coefficients.
  /// The repeated-evaluation form used by the time-average loops.
  void synthesize(std::span<const Complex> spectrum, double t,
                  std::vector<Complex>& out) const;

  /// Energy of Fourier mode k: k * h_n * (n/l).  With period n this is the
  /// ladder 0, h_n, 2 h_n, ..., (n-1) h_n.
  double mode_energy(std::size_t k) const;

 private:
  OrbitBasisPtr basis_;
  ApparatusSpec spec_;
  std::size_t ratio_;  // n / period
  double phase_skew_;
  std::unique_ptr<detail::Fft> fft_;  // null for period-1 orbits
};

/// The 2^n x 2^n self-adjoint operator of the full apparatus, assembled
/// block-by-block over every shift orbit with mode-k eigenvalue
/// k * h_n * (n/l) on each orbit.  Oracle realization; n <= kDenseCap.
class DenseHamiltonian {
 public:
  static std::shared_ptr<const DenseHamiltonian> build(const ApparatusSpec& spec);

  const ApparatusSpec& spec() const { return spec_; }
  const Eigen::MatrixXcd& matrix() const { return h_; }
  const std::vector<std::vector<std::uint64_t>>& orbits() const { return orbits_; }

  /// max_ij |H_ij - conj(H_ji)|
  double hermiticity_deviation() const;

 private:
  DenseHamiltonian(ApparatusSpec spec, Eigen::MatrixXcd h,
                   std::vector<std::vector<std::uint64_t>> orbits)
      : spec_(spec), h_(std::move(h)), orbits_(std::move(orbits)) {}

  ApparatusSpec spec_;
  Eigen::MatrixXcd h_;
  std::vector<std::vector<std::uint64_t>> orbits_;
};

/// Dense-path evolution: numerically eigendecomposes each orbit block of the
/// assembled Hamiltonian once, then applies U(t) = V exp(-2 pi i t L / h_n) V^*
/// blockwise.  Never consults the analytic DFT phases, so it is an
/// independent route against the fast path.
class DensePropagator : public Evolver {
 public:
  explicit DensePropagator(std::shared_ptr<const DenseHamiltonian> hamiltonian);

  SectorState evolve(const SectorState& state, double t) const override;

  /// Numerical eigenvalues of each orbit block, ascending, in orbit order.
  const std::vector<Eigen::VectorXd>& block_spectra() const { return spectra_; }
  const std::shared_ptr<const DenseHamiltonian>& hamiltonian() const { return h_; }

 private:
  std::shared_ptr<const DenseHamiltonian> h_;
  std::vector<Eigen::VectorXd> spectra_;
  std::vector<Eigen::MatrixXcd> vectors_;
};

/// Combined-system step: the incident amplitudes and the particle-absent
/// sector are constants of motion; only the particle-present sector evolves.
/// Both sectors must use the same representation as the evolver expects.
CombinedState evolve_combined(const CombinedState& cs, double t, const Evolver& evolver);

/// m exact shift steps applied to a dense apparatus vector by index
/// permutation alone.  Test oracle for evolution at t = m/n.
std::vector<Complex> apply_shift_permutation(std::span<const Complex> dense, std::size_t n,
                                             std::size_t m);

}  // namespace minglab
