#include "minglab/limit.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "minglab/averaging.hpp"

using namespace minglab;

TEST_CASE("classical weights are the incident probabilities") {
  const ClassicalLimitSystem certain = build_classical_system(Incident::from_prob(1.0));
  CHECK(certain.weight_p0 == doctest::Approx(0.0));
  CHECK(certain.weight_p1 == doctest::Approx(1.0));

  const ClassicalLimitSystem sys = build_classical_system(Incident::from_prob(0.36));
  CHECK(sys.weight_p0 == doctest::Approx(0.64).epsilon(1e-15));
  CHECK(sys.weight_p1 == doctest::Approx(0.36).epsilon(1e-15));

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const ClassicalLimitSystem balanced = build_classical_system(
      Incident::make(Complex{inv_sqrt2, 0.0}, Complex{inv_sqrt2, 0.0}));
  CHECK(balanced.weight_p0 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(balanced.weight_p1 == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("weights ignore global and relative phases") {
  const ClassicalLimitSystem a = build_classical_system(Incident::from_prob(0.36, 0.0));
  const ClassicalLimitSystem b = build_classical_system(Incident::from_prob(0.36, 2.7));
  const ClassicalLimitSystem c = build_classical_system(
      Incident::make(std::polar(std::sqrt(0.64), 1.2), std::polar(std::sqrt(0.36), -0.4)));
  CHECK(a.weight_p1 == doctest::Approx(b.weight_p1).epsilon(1e-15));
  CHECK(a.weight_p1 == doctest::Approx(c.weight_p1).epsilon(1e-15));
  CHECK(a.weight_p0 == doctest::Approx(c.weight_p0).epsilon(1e-15));
}

TEST_CASE("expectation of the detection indicator") {
  CHECK(classical_expectation(ClassicalLimitSystem{1.0, 0.0}) == 0.0);
  CHECK(classical_expectation(ClassicalLimitSystem{0.64, 0.36}) == doctest::Approx(0.36));
  for (double a1_sq : {0.0, 0.25, 0.9}) {
    const Incident v0 = Incident::from_prob(a1_sq, 0.3);
    CHECK(classical_expectation(build_classical_system(v0)) ==
          doctest::Approx(limit_value(v0)).epsilon(1e-15));
  }
}

TEST_CASE("extrapolation recovers the exact coefficient from closed-form data") {
  std::vector<LimitSample> samples;
  for (std::size_t n : {25u, 49u, 101u}) {
    const ApparatusSpec spec = ApparatusSpec::make(n);
    const CockedPolicy policy = CockedPolicy::make(0.5, n);
    const TrajectoryAverage closed =
        time_average_closed_form(spec, policy, Incident::from_prob(0.36));
    samples.push_back(LimitSample{n, closed.mean, cocked_shift_count(spec, policy)});
  }
  const LimitFit fit = extrapolate_limit(samples);
  CHECK(std::abs(fit.estimate - 0.36) < 1e-10);
  CHECK(fit.residual < 1e-9);
}

TEST_CASE("extrapolation from quadrature data reaches the classical expectation") {
  const Incident v0 = Incident::from_prob(0.36);
  std::vector<LimitSample> samples;
  for (std::size_t n : {101u, 409u}) {
    const ApparatusSpec spec = ApparatusSpec::make(n);
    const CockedPolicy policy = CockedPolicy::make(0.5, n);
    const TrajectoryAverage quad =
        time_average_quadrature(spec, policy, v0, auto_sample_count(n));
    samples.push_back(LimitSample{n, quad.mean, cocked_shift_count(spec, policy)});
  }
  const LimitFit fit = extrapolate_limit(samples);
  const double expectation = classical_expectation(build_classical_system(v0));
  CHECK(std::abs(fit.estimate - expectation) < 1e-8);
  CHECK(std::abs(fit.estimate - limit_value(v0)) < 1e-8);
}

TEST_CASE("underdetermined or degenerate designs are rejected") {
  CHECK_THROWS_AS(extrapolate_limit({LimitSample{25, 0.3, 11}}), std::invalid_argument);
  // identical kappa/n ratios carry no finite-size signal
  CHECK_THROWS_AS(extrapolate_limit({LimitSample{10, 0.2, 5}, LimitSample{20, 0.2, 10}}),
                  std::invalid_argument);
  CHECK_NOTHROW(extrapolate_limit({LimitSample{10, 0.2, 5}, LimitSample{20, 0.2, 11}}));
}
