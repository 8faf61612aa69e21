#include "minglab/dynamics.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

using namespace minglab;

namespace {

using LD = std::complex<long double>;
constexpr long double kTau = 2.0L * std::numbers::pi_v<long double>;

// Naive extended-precision realization of the orbit evolution: explicit DFT
// sums, mode k rotated by exp(-2 pi i k (n/l) t).  Independent of the FFT
// path under test.
std::vector<Complex> oracle_evolve(const std::vector<Complex>& amp, std::size_t n, double t) {
  const std::size_t l = amp.size();
  const auto ratio = static_cast<long double>(n / l);
  std::vector<LD> modes(l, LD{0.0L, 0.0L});
  for (std::size_t k = 0; k < l; ++k) {
    for (std::size_t j = 0; j < l; ++j) {
      const long double angle = -kTau * static_cast<long double>(j * k) / static_cast<long double>(l);
      modes[k] += LD(amp[j].real(), amp[j].imag()) * LD(std::cos(angle), std::sin(angle));
    }
    const long double phase = -kTau * static_cast<long double>(k) * ratio * static_cast<long double>(t);
    modes[k] *= LD(std::cos(phase), std::sin(phase));
  }
  std::vector<Complex> out(l);
  for (std::size_t j = 0; j < l; ++j) {
    LD c{0.0L, 0.0L};
    for (std::size_t k = 0; k < l; ++k) {
      const long double angle = kTau * static_cast<long double>(j * k) / static_cast<long double>(l);
      c += modes[k] * LD(std::cos(angle), std::sin(angle));
    }
    c /= static_cast<long double>(l);
    out[j] = Complex(static_cast<double>(c.real()), static_cast<double>(c.imag()));
  }
  return out;
}

std::vector<Complex> random_unit(std::mt19937_64& gen, std::size_t dim) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Complex> v(dim);
  double norm_sq = 0.0;
  for (Complex& c : v) {
    c = Complex{dist(gen), dist(gen)};
    norm_sq += std::norm(c);
  }
  for (Complex& c : v) c /= std::sqrt(norm_sq);
  return v;
}

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_CASE("fast path reproduces the naive DFT oracle, full and partial orbits") {
  std::mt19937_64 gen(11);
  for (const char* bits : {"11000", "11010000", "10101010", "100100100100"}) {
    const OrbitBasisPtr basis = orbit(Pattern::from_string(bits));
    const ApparatusSpec spec = ApparatusSpec::make(basis->apparatus_size());
    const OrbitPropagator propagator(basis, spec);
    for (int trial = 0; trial < 5; ++trial) {
      const std::vector<Complex> amp = random_unit(gen, basis->period());
      const double t = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
      const SectorState in = SectorState::orbit_vector(basis, amp);
      const SectorState out = propagator.evolve(in, t);
      CHECK(max_abs_diff(out.amplitudes(), oracle_evolve(amp, spec.n, t)) < 1e-12);
    }
  }
}

TEST_CASE("t=0 is the identity and t=1 returns within 1e-12") {
  std::mt19937_64 gen(13);
  const OrbitBasisPtr basis = orbit(make_cocked_pattern(9));
  const OrbitPropagator propagator(basis, ApparatusSpec::make(9));
  const std::vector<Complex> amp = random_unit(gen, 9);
  const SectorState in = SectorState::orbit_vector(basis, amp);
  CHECK(max_abs_diff(propagator.evolve(in, 0.0).amplitudes(), amp) < 1e-15);
  CHECK(max_abs_diff(propagator.evolve(in, 1.0).amplitudes(), amp) < 1e-12);
}

TEST_CASE("one time step of 1/n is exactly one shift") {
  const OrbitBasisPtr basis = orbit(Pattern::from_string("11000"));
  const OrbitPropagator propagator(basis, ApparatusSpec::make(5));
  const SectorState evolved =
      propagator.evolve(SectorState::orbit_basis_vector(basis, 0), 1.0 / 5.0);
  // member 1 is |01100>
  CHECK(basis->member(1).to_string() == "01100");
  CHECK(std::abs(evolved.amplitudes()[1] - Complex{1.0, 0.0}) < 1e-12);
  double off = 0.0;
  for (std::size_t j = 0; j < 5; ++j) {
    if (j != 1) off += std::norm(evolved.amplitudes()[j]);
  }
  CHECK(off < 1e-20);
}

TEST_CASE("shift exactness: off-pattern mass below 1e-20") {
  for (std::size_t n : {5u, 7u, 101u}) {
    const OrbitBasisPtr basis = orbit(make_cocked_pattern(n));
    const OrbitPropagator propagator(basis, ApparatusSpec::make(n));
    for (std::size_t m : {std::size_t{1}, std::size_t{2}, n - 1}) {
      const SectorState evolved = propagator.evolve(
          SectorState::orbit_basis_vector(basis, 0), static_cast<double>(m) / n);
      double off = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != m) off += std::norm(evolved.amplitudes()[j]);
      }
      CHECK(off < 1e-20);
    }
  }
}

TEST_CASE("corrupted phase convention is caught (negative control)") {
  const OrbitBasisPtr basis = orbit(make_cocked_pattern(7));
  const OrbitPropagator skewed(basis, ApparatusSpec::make(7), 0.37);
  const SectorState evolved =
      skewed.evolve(SectorState::orbit_basis_vector(basis, 0), 1.0 / 7.0);
  double off = 0.0;
  for (std::size_t j = 0; j < 7; ++j) {
    if (j != 1) off += std::norm(evolved.amplitudes()[j]);
  }
  CHECK(off > 1e-6);
  CHECK(std::abs(evolved.norm() - 1.0) < 1e-12);  // still unitary
}

TEST_CASE("periodicity, group property and unitarity") {
  std::mt19937_64 gen(17);
  const OrbitBasisPtr basis = orbit(make_cocked_pattern(11));
  const OrbitPropagator propagator(basis, ApparatusSpec::make(11));
  const SectorState in = SectorState::orbit_vector(basis, random_unit(gen, 11));
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double t = dist(gen);
    const double s = dist(gen);
    CHECK(std::abs(propagator.evolve(in, t).norm() - 1.0) < 1e-12);
    CHECK(max_abs_diff(propagator.evolve(in, t).amplitudes(),
                       propagator.evolve(in, t - std::floor(t)).amplitudes()) < 1e-12);
    CHECK(max_abs_diff(propagator.evolve(propagator.evolve(in, s), t).amplitudes(),
                       propagator.evolve(in, s + t).amplitudes()) < 1e-11);
  }
}

TEST_CASE("dense Hamiltonian for n=2 matches the hand-built 4x4") {
  const ApparatusSpec spec = ApparatusSpec::make(2);  // h_2 = 1/2
  const auto h = DenseHamiltonian::build(spec);
  const double half_h = spec.h_n / 2.0;
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
  // basis order 00, 01, 10, 11; the only coupled pair is {01, 10}
  expected(1, 1) = expected(2, 2) = half_h;
  expected(1, 2) = expected(2, 1) = -half_h;
  CHECK((h->matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("dense Hamiltonian is self-adjoint with the advertised block spectra") {
  for (std::size_t n : {2u, 3u, 5u, 7u}) {
    const ApparatusSpec spec = ApparatusSpec::make(n);
    const auto h = DenseHamiltonian::build(spec);
    CHECK(h->hermiticity_deviation() < 1e-12);
    const DensePropagator propagator(h);
    const auto& orbits = h->orbits();
    for (std::size_t o = 0; o < orbits.size(); ++o) {
      const std::size_t period = orbits[o].size();
      const double step = spec.h_n * static_cast<double>(spec.n) / static_cast<double>(period);
      const Eigen::VectorXd& lambda = propagator.block_spectra()[o];
      REQUIRE(lambda.size() == static_cast<Eigen::Index>(period));
      for (std::size_t k = 0; k < period; ++k) {
        CHECK(std::abs(lambda[static_cast<Eigen::Index>(k)] -
                       step * static_cast<double>(k)) < 1e-10);
      }
    }
  }
}

TEST_CASE("dense evolution at t=m/n equals the repeated-shift permutation") {
  std::mt19937_64 gen(23);
  const std::size_t n = 5;
  const auto h = DenseHamiltonian::build(ApparatusSpec::make(n));
  const DensePropagator propagator(h);
  const std::vector<Complex> amp = random_unit(gen, std::size_t{1} << n);
  const SectorState in = SectorState::dense_vector(n, amp);
  CHECK(max_abs_diff(propagator.evolve(in, 0.0).amplitudes(), amp) < 1e-12);
  for (std::size_t m : {std::size_t{1}, std::size_t{2}, std::size_t{3}, n}) {
    const SectorState evolved = propagator.evolve(in, static_cast<double>(m) / n);
    const std::vector<Complex> expected = apply_shift_permutation(amp, n, m);
    CHECK(max_abs_diff(evolved.amplitudes(), expected) < 1e-12);
  }
}

TEST_CASE("fast and dense paths agree on orbit-supported states") {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (std::size_t n : {3u, 5u, 7u}) {
    const ApparatusSpec spec = ApparatusSpec::make(n);
    const OrbitBasisPtr basis = orbit(make_cocked_pattern(n));
    const OrbitPropagator fast(basis, spec);
    const DensePropagator dense(DenseHamiltonian::build(spec));
    const SectorState in = SectorState::orbit_vector(basis, random_unit(gen, basis->period()));
    const SectorState in_dense = in.to_dense();
    for (int trial = 0; trial < 20; ++trial) {
      const double t = dist(gen);
      CHECK(max_abs_diff(fast.evolve(in, t).to_dense().amplitudes(),
                         dense.evolve(in_dense, t).amplitudes()) < 1e-10);
    }
  }
}

TEST_CASE("dense cap is enforced with a clear message") {
  CHECK_THROWS_WITH_AS(DenseHamiltonian::build(ApparatusSpec::make(13)),
                       doctest::Contains("n <= 12"), std::invalid_argument);
}

TEST_CASE("combined evolution freezes the particle-absent sector") {
  const std::size_t n = 11;
  const OrbitBasisPtr basis = orbit(make_cocked_pattern(n));
  const OrbitPropagator propagator(basis, ApparatusSpec::make(n));

  SUBCASE("a1 = 0 leaves the physical state unchanged") {
    const CombinedState cs = CombinedState::initial(Incident::from_prob(0.0), basis);
    const CombinedState out = evolve_combined(cs, 0.37, propagator);
    CHECK(out.a0 == cs.a0);
    CHECK(out.a1 == cs.a1);
    CHECK(out.sector0.amplitudes() == cs.sector0.amplitudes());
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
  }

  SUBCASE("a0 = 0 walks the armed pattern around its orbit") {
    const CombinedState cs = CombinedState::initial(Incident::from_prob(1.0), basis);
    for (std::size_t m : {std::size_t{1}, std::size_t{4}}) {
      const CombinedState out = evolve_combined(cs, static_cast<double>(m) / n, propagator);
      CHECK(std::abs(out.sector1.amplitudes()[m] - Complex{1.0, 0.0}) < 1e-12);
      CHECK(out.sector0.amplitudes() == cs.sector0.amplitudes());
    }
  }

  SUBCASE("norm is preserved for random states and times") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      const Incident v0 = Incident::from_prob(dist(gen), dist(gen));
      const CombinedState cs = CombinedState::make(
          v0, SectorState::orbit_basis_vector(basis, 0),
          SectorState::orbit_vector(basis, random_unit(gen, n)));
      const CombinedState out = evolve_combined(cs, 5.0 * dist(gen), propagator);
      CHECK(std::abs(out.norm() - 1.0) < 1e-12);
    }
  }

  SUBCASE("mixed representations are rejected") {
    const CombinedState mixed = CombinedState{Complex{1.0, 0.0} * std::sqrt(0.5),
                                              Complex{1.0, 0.0} * std::sqrt(0.5),
                                              SectorState::orbit_basis_vector(basis, 0),
                                              SectorState::dense_basis_vector(n, 0).to_dense()};
    CHECK_THROWS_AS(evolve_combined(mixed, 0.1, propagator), std::invalid_argument);
  }
}

TEST_CASE("mode energies form the renormalized ladder") {
  const std::size_t n = 7;
  const ApparatusSpec spec = ApparatusSpec::make(n, 2.0);
  const OrbitPropagator propagator(orbit(make_cocked_pattern(n)), spec);
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(propagator.mode_energy(k) == doctest::Approx(static_cast<double>(k) * 2.0 / 7.0));
  }
  // the whole ladder stays inside [0, h0)
  CHECK(propagator.mode_energy(n - 1) < spec.h0);
}
