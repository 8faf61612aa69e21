#include "minglab/dynamics.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace minglab {

namespace detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(std::size_t len) : len_(len) {
  if (len == 0) throw std::invalid_argument("fft length must be positive");
  std::vector<Complex> a(len), b(len);
  auto* in = reinterpret_cast<fftw_complex*>(a.data());
  auto* out = reinterpret_cast<fftw_complex*>(b.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_ = fftw_plan_dft_1d(static_cast<int>(len), in, out, FFTW_FORWARD, flags);
  bwd_ = fftw_plan_dft_1d(static_cast<int>(len), in, out, FFTW_BACKWARD, flags);
  if (fwd_ == nullptr || bwd_ == nullptr) throw std::runtime_error("fftw plan creation failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft::forward(const Complex* in, Complex* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Fft::backward(const Complex* in, Complex* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(bwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace detail

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long double reduce_mod_one(long double x) {
  long double r = std::fmod(x, 1.0L);
  if (r < 0.0L) r += 1.0L;
  return r;
}

// exp(-2 pi i * frac(freq * tau)), with the fractional part taken in extended
// precision: freq can reach the apparatus size, and double-precision products
// would cost ~1e-10 of phase there.
Complex unit_phase(long double freq, long double tau) {
  const long double cycles = reduce_mod_one(freq * tau);
  return std::polar(1.0, -kTwoPi * static_cast<double>(cycles));
}

}  // namespace

OrbitPropagator::OrbitPropagator(OrbitBasisPtr basis, ApparatusSpec spec, double phase_skew)
    : basis_(std::move(basis)), spec_(spec), phase_skew_(phase_skew) {
  if (!basis_) throw std::invalid_argument("null orbit basis");
  if (basis_->apparatus_size() != spec_.n) {
    throw std::invalid_argument("orbit and apparatus sizes differ");
  }
  const std::size_t period = basis_->period();
  ratio_ = spec_.n / period;  // period divides n
  if (period > 1) fft_ = std::make_unique<detail::Fft>(period);
}

std::vector<Complex> OrbitPropagator::analyze(std::span<const Complex> amplitudes) const {
  const std::size_t period = basis_->period();
  if (amplitudes.size() != period) throw std::invalid_argument("amplitude count != orbit period");
  std::vector<Complex> spectrum(period);
  if (period == 1) {
    spectrum[0] = amplitudes[0];
    return spectrum;
  }
  fft_->forward(amplitudes.data(), spectrum.data());
  const double scale = 1.0 / std::sqrt(static_cast<double>(period));
  for (Complex& c : spectrum) c *= scale;
  return spectrum;
}

void OrbitPropagator::synthesize(std::span<const Complex> spectrum, double t,
                                 std::vector<Complex>& out) const {
  const std::size_t period = basis_->period();
  if (spectrum.size() != period) throw std::invalid_argument("spectrum size != orbit period");
  const long double tau = reduce_mod_one(static_cast<long double>(t));
  if (period == 1) {
    out.assign(1, spectrum[0]);
    return;
  }
  std::vector<Complex> rotated(period);
  for (std::size_t k = 0; k < period; ++k) {
    const long double freq = static_cast<long double>(k) *
                             (static_cast<long double>(ratio_) + static_cast<long double>(phase_skew_));
    rotated[k] = spectrum[k] * unit_phase(freq, tau);
  }
  out.resize(period);
  fft_->backward(rotated.data(), out.data());
  const double scale = 1.0 / std::sqrt(static_cast<double>(period));
  for (Complex& c : out) c *= scale;
}

SectorState OrbitPropagator::evolve(const SectorState& state, double t) const {
  if (!state.is_orbit()) {
    throw std::invalid_argument("orbit propagator needs an orbit-supported state");
  }
  const OrbitBasis& b = *state.basis();
  if (b.period() != basis_->period() || !(b.representative() == basis_->representative())) {
    throw std::invalid_argument("state lives on a different orbit");
  }
  if (state.is_empty()) return state;
  const std::vector<Complex> spectrum = analyze(state.amplitudes());
  std::vector<Complex> out;
  synthesize(spectrum, t, out);
  return SectorState::orbit_vector(state.basis(), std::move(out));
}

double OrbitPropagator::mode_energy(std::size_t k) const {
  if (k >= basis_->period()) throw std::invalid_argument("mode index out of range");
  return static_cast<double>(k) * spec_.h_n * static_cast<double>(ratio_);
}

std::shared_ptr<const DenseHamiltonian> DenseHamiltonian::build(const ApparatusSpec& spec) {
  if (spec.n > kDenseCap) {
    throw std::invalid_argument("dense Hamiltonian limited to n <= " + std::to_string(kDenseCap) +
                                "; use the orbit fast path beyond");
  }
  const std::size_t dim = std::size_t{1} << spec.n;
  auto orbits = enumerate_orbit_index_lists(spec.n);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  for (const auto& members : orbits) {
    const std::size_t period = members.size();
    const double ratio = static_cast<double>(spec.n) / static_cast<double>(period);
    // Block entry (a, b) = (h_n r / l) sum_k k exp(2 pi i k (a-b) / l); only
    // the difference (a-b) mod l matters.
    std::vector<Complex> g(period);
    for (std::size_t d = 0; d < period; ++d) {
      Complex sum{0.0, 0.0};
      for (std::size_t k = 1; k < period; ++k) {
        const double angle = kTwoPi * static_cast<double>(k * d % period) /
                             static_cast<double>(period);
        sum += static_cast<double>(k) * Complex{std::cos(angle), std::sin(angle)};
      }
      g[d] = (spec.h_n * ratio / static_cast<double>(period)) * sum;
    }
    for (std::size_t a = 0; a < period; ++a) {
      for (std::size_t b = 0; b < period; ++b) {
        h(static_cast<Eigen::Index>(members[a]), static_cast<Eigen::Index>(members[b])) =
            g[(a + period - b) % period];
      }
    }
  }
  return std::shared_ptr<const DenseHamiltonian>(
      new DenseHamiltonian(spec, std::move(h), std::move(orbits)));
}

double DenseHamiltonian::hermiticity_deviation() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < h_.rows(); ++i) {
    for (Eigen::Index j = 0; j < h_.cols(); ++j) {
      worst = std::max(worst, std::abs(h_(i, j) - std::conj(h_(j, i))));
    }
  }
  return worst;
}

DensePropagator::DensePropagator(std::shared_ptr<const DenseHamiltonian> hamiltonian)
    : h_(std::move(hamiltonian)) {
  if (!h_) throw std::invalid_argument("null dense Hamiltonian");
  const Eigen::MatrixXcd& m = h_->matrix();
  for (const auto& members : h_->orbits()) {
    const auto period = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXcd block(period, period);
    for (Eigen::Index a = 0; a < period; ++a) {
      for (Eigen::Index b = 0; b < period; ++b) {
        block(a, b) = m(static_cast<Eigen::Index>(members[static_cast<std::size_t>(a)]),
                        static_cast<Eigen::Index>(members[static_cast<std::size_t>(b)]));
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("orbit block eigendecomposition failed");
    }
    spectra_.push_back(solver.eigenvalues());
    vectors_.push_back(solver.eigenvectors());
  }
}

SectorState DensePropagator::evolve(const SectorState& state, double t) const {
  if (!state.is_dense()) {
    throw std::invalid_argument("dense propagator needs a dense state");
  }
  if (state.apparatus_size() != h_->spec().n) {
    throw std::invalid_argument("state dimension does not match Hamiltonian");
  }
  if (state.is_empty()) return state;
  const long double tau = reduce_mod_one(static_cast<long double>(t));
  const double h_n = h_->spec().h_n;
  std::vector<Complex> amp = state.amplitudes();
  const auto& orbits = h_->orbits();
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    const auto& members = orbits[o];
    const auto period = static_cast<Eigen::Index>(members.size());
    Eigen::VectorXcd x(period);
    for (Eigen::Index j = 0; j < period; ++j) {
      x(j) = amp[members[static_cast<std::size_t>(j)]];
    }
    Eigen::VectorXcd modes = vectors_[o].adjoint() * x;
    for (Eigen::Index j = 0; j < period; ++j) {
      modes(j) *= unit_phase(static_cast<long double>(spectra_[o](j) / h_n), tau);
    }
    x = vectors_[o] * modes;
    for (Eigen::Index j = 0; j < period; ++j) {
      amp[members[static_cast<std::size_t>(j)]] = x(j);
    }
  }
  return SectorState::dense_vector(state.apparatus_size(), std::move(amp));
}

CombinedState evolve_combined(const CombinedState& cs, double t, const Evolver& evolver) {
  if (cs.sector0.kind() != cs.sector1.kind()) {
    throw std::invalid_argument("mixed sector representations are not evolvable");
  }
  CombinedState out = cs;
  if (!cs.sector1.is_empty()) {
    out.sector1 = evolver.evolve(cs.sector1, t);
  }
  return out;
}

std::vector<Complex> apply_shift_permutation(std::span<const Complex> dense, std::size_t n,
                                             std::size_t m) {
  if (dense.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("dense vector must have 2^n entries");
  }
  std::vector<Complex> cur(dense.begin(), dense.end());
  std::vector<Complex> next(cur.size());
  for (std::size_t step = 0; step < m % n; ++step) {
    for (std::uint64_t v = 0; v < cur.size(); ++v) {
      const std::uint64_t shifted = (v >> 1) | ((v & 1u) << (n - 1));
      next[shifted] = cur[v];
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace minglab
