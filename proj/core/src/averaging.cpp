#include "minglab/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "minglab/dynamics.hpp"

namespace minglab {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t mid = values.size() / 2;
  return pairwise_sum(values.first(mid)) + pairwise_sum(values.subspan(mid));
}

namespace {

void check_inputs(const ApparatusSpec& spec, const CockedPolicy& policy, const Pattern& initial) {
  if (policy.n() != spec.n) throw std::invalid_argument("policy and apparatus sizes differ");
  if (initial.size() != spec.n) throw std::invalid_argument("initial pattern size differs");
}

TrajectoryAverage finalize(const ApparatusSpec& spec, const CockedPolicy& policy,
                           const Incident& v0, std::vector<double>& f,
                           std::vector<double>& f_sq, std::size_t samples) {
  TrajectoryAverage out;
  out.n = spec.n;
  out.alpha = policy.alpha();
  out.a1_sq = v0.a1_sq();
  out.samples = samples;
  out.method = "quadrature";
  out.mean = pairwise_sum(f) / static_cast<double>(samples);
  const double second = pairwise_sum(f_sq) / static_cast<double>(samples);
  out.variance = std::max(0.0, second - out.mean * out.mean);
  return out;
}

TrajectoryAverage quadrature_fast(const ApparatusSpec& spec, const CockedPolicy& policy,
                                  const Incident& v0, std::size_t samples,
                                  const Pattern& initial) {
  const OrbitBasisPtr basis = orbit(initial);
  const OrbitPropagator propagator(basis, spec);
  const std::vector<std::uint8_t> flags =
      rotation_cocked_flags(initial, basis->period(), policy);
  const double frozen_mass = is_cocked(initial, policy).is_member ? 1.0 : 0.0;
  const double a0_sq = v0.a0_sq();
  const double a1_sq = v0.a1_sq();

  std::vector<Complex> start(basis->period(), Complex{0.0, 0.0});
  start[0] = Complex{1.0, 0.0};
  const std::vector<Complex> spectrum = propagator.analyze(start);

  std::vector<double> f(samples), f_sq(samples);
  std::vector<Complex> amp;
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(samples);
    propagator.synthesize(spectrum, t, amp);
    double mass1 = 0.0;
    for (std::size_t m = 0; m < amp.size(); ++m) {
      if (flags[m]) mass1 += std::norm(amp[m]);
    }
    const double value = std::clamp(1.0 - a0_sq * frozen_mass - a1_sq * mass1, 0.0, 1.0);
    f[j] = value;
    f_sq[j] = value * value;
  }
  return finalize(spec, policy, v0, f, f_sq, samples);
}

TrajectoryAverage quadrature_dense(const ApparatusSpec& spec, const CockedPolicy& policy,
                                   const Incident& v0, std::size_t samples,
                                   const Pattern& initial) {
  const auto hamiltonian = DenseHamiltonian::build(spec);
  const DensePropagator propagator(hamiltonian);
  const std::vector<std::uint8_t> flags = dense_cocked_flags(spec.n, policy);
  const double frozen_mass = is_cocked(initial, policy).is_member ? 1.0 : 0.0;
  const double a0_sq = v0.a0_sq();
  const double a1_sq = v0.a1_sq();

  const SectorState start = SectorState::dense_basis_vector(spec.n, initial.to_index());
  std::vector<double> f(samples), f_sq(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(samples);
    const SectorState evolved = propagator.evolve(start, t);
    double mass1 = 0.0;
    const auto& amp = evolved.amplitudes();
    for (std::size_t v = 0; v < amp.size(); ++v) {
      if (flags[v]) mass1 += std::norm(amp[v]);
    }
    const double value = std::clamp(1.0 - a0_sq * frozen_mass - a1_sq * mass1, 0.0, 1.0);
    f[j] = value;
    f_sq[j] = value * value;
  }
  return finalize(spec, policy, v0, f, f_sq, samples);
}

}  // namespace

TrajectoryAverage time_average_quadrature(const ApparatusSpec& spec, const CockedPolicy& policy,
                                          const Incident& v0, std::size_t samples,
                                          const std::optional<Pattern>& initial,
                                          EvolutionPath path) {
  if (samples < 1) throw std::invalid_argument("quadrature needs at least one sample");
  const Pattern start = initial.value_or(make_cocked_pattern(spec.n));
  check_inputs(spec, policy, start);
  return path == EvolutionPath::kFast ? quadrature_fast(spec, policy, v0, samples, start)
                                      : quadrature_dense(spec, policy, v0, samples, start);
}

TrajectoryAverage time_average_closed_form(const ApparatusSpec& spec, const CockedPolicy& policy,
                                           const Incident& v0,
                                           const std::optional<Pattern>& initial) {
  const Pattern start = initial.value_or(make_cocked_pattern(spec.n));
  check_inputs(spec, policy, start);
  if (start.rotation_period() < spec.n) {
    throw std::invalid_argument(
        "closed form requires a full-period initial pattern; shift-invariant patterns spread "
        "over fewer than n members");
  }
  const std::vector<std::uint8_t> flags = rotation_cocked_flags(start, spec.n, policy);
  std::size_t kappa = 0;
  for (std::uint8_t flag : flags) kappa += flag;
  const double a0_sq = v0.a0_sq();
  const double a1_sq = v0.a1_sq();
  const double frozen_mass = is_cocked(start, policy).is_member ? 1.0 : 0.0;
  const auto n = static_cast<double>(spec.n);

  TrajectoryAverage out;
  out.n = spec.n;
  out.alpha = policy.alpha();
  out.a1_sq = a1_sq;
  out.samples = 0;
  out.method = "closed-form";
  out.mean = a1_sq * (1.0 - static_cast<double>(kappa) / n) + a0_sq * (1.0 - frozen_mass);

  // Time variance of the cocked mass, exactly: with a flat initial spectrum
  // the mass is sum_{j in K} |c_j(t)|^2 whose second moment reduces to
  // (1/n^4) [ n^2 |S_0|^2 + sum_{d=1}^{n-1} ((n-d)^2 + d^2) |S_d|^2 ]
  // where S is the DFT of the cocked indicator over the orbit.
  if (spec.n > 1) {
    std::vector<Complex> indicator(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) {
      indicator[j] = Complex{flags[j] ? 1.0 : 0.0, 0.0};
    }
    std::vector<Complex> s(spec.n);
    detail::Fft fft(spec.n);
    fft.forward(indicator.data(), s.data());
    std::vector<double> terms(spec.n);
    terms[0] = n * n * std::norm(s[0]);
    for (std::size_t d = 1; d < spec.n; ++d) {
      const auto dd = static_cast<double>(d);
      terms[d] = ((n - dd) * (n - dd) + dd * dd) * std::norm(s[d]);
    }
    const double second_moment = pairwise_sum(terms) / (n * n * n * n);
    const double mean_mass = static_cast<double>(kappa) / n;
    out.variance = a1_sq * a1_sq * std::max(0.0, second_moment - mean_mass * mean_mass);
  }
  return out;
}

double limit_value(const Incident& v0) { return v0.a1_sq(); }

std::vector<TrajectoryAverage> time_variance_scan(std::span<const std::size_t> sizes,
                                                  double alpha, double h0, const Incident& v0,
                                                  std::optional<std::size_t> samples) {
  if (sizes.empty()) throw std::invalid_argument("scan needs at least one apparatus size");
  std::vector<TrajectoryAverage> out;
  out.reserve(sizes.size());
  for (const std::size_t n : sizes) {
    const ApparatusSpec spec = ApparatusSpec::make(n, h0);
    const CockedPolicy policy = CockedPolicy::make(alpha, n);
    const std::size_t m = samples.value_or(auto_sample_count(n));
    out.push_back(time_average_quadrature(spec, policy, v0, m));
  }
  return out;
}

}  // namespace minglab
