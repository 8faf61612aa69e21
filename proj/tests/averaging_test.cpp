#include "minglab/averaging.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numeric>
#include <random>

using namespace minglab;

namespace {

struct Setup {
  ApparatusSpec spec;
  CockedPolicy policy;
};

Setup setup(std::size_t n, double alpha = 0.5) {
  return Setup{ApparatusSpec::make(n), CockedPolicy::make(alpha, n)};
}

double kappa_ratio(const Setup& s) {
  return static_cast<double>(cocked_shift_count(s.spec, s.policy)) /
         static_cast<double>(s.spec.n);
}

}  // namespace

TEST_CASE("pairwise sum agrees with extended-precision accumulation") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> values(1234);
  long double reference = 0.0L;
  for (double& v : values) {
    v = dist(gen);
    reference += static_cast<long double>(v);
  }
  CHECK(pairwise_sum(values) ==
        doctest::Approx(static_cast<double>(reference)).epsilon(1e-13));
}

TEST_CASE("absent particle: mean and variance vanish identically") {
  const auto [spec, policy] = setup(11);
  const TrajectoryAverage quad =
      time_average_quadrature(spec, policy, Incident::from_prob(0.0), 23);
  CHECK(quad.mean == 0.0);
  CHECK(quad.variance == 0.0);
  const TrajectoryAverage closed =
      time_average_closed_form(spec, policy, Incident::from_prob(0.0));
  CHECK(closed.mean == 0.0);
  CHECK(closed.variance == 0.0);
}

TEST_CASE("certain particle: mean is 1 - kappa/n, independently cross-checked") {
  for (std::size_t n : {5u, 11u, 25u}) {
    const auto s = setup(n);
    const Incident v0 = Incident::from_prob(1.0);
    const double expected = 1.0 - kappa_ratio(s);
    const TrajectoryAverage quad =
        time_average_quadrature(s.spec, s.policy, v0, auto_sample_count(n));
    const TrajectoryAverage closed = time_average_closed_form(s.spec, s.policy, v0);
    const TrajectoryAverage brute =
        time_average_quadrature(s.spec, s.policy, v0, 10 * n);  // oversampled route
    CHECK(quad.mean == doctest::Approx(expected).epsilon(1e-10));
    CHECK(closed.mean == doctest::Approx(expected).epsilon(1e-12));
    CHECK(brute.mean == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("mixed incident state scales the deviation by |a1|^2") {
  const auto s = setup(101);
  const Incident v0 = Incident::from_prob(0.36);
  const TrajectoryAverage closed = time_average_closed_form(s.spec, s.policy, v0);
  CHECK(closed.mean == doctest::Approx(0.36 * (1.0 - kappa_ratio(s))).epsilon(1e-12));
  const TrajectoryAverage quad =
      time_average_quadrature(s.spec, s.policy, v0, auto_sample_count(101));
  CHECK(std::abs(quad.mean - closed.mean) < 1e-10);
}

TEST_CASE("quadrature equals closed form across the parameter grid") {
  struct Combo {
    std::size_t n;
    double alpha;
  };
  const Combo combos[] = {{5, 0.3}, {5, 0.5}, {11, 0.5}, {11, 0.7},
                          {25, 0.5}, {101, 0.3}, {101, 0.7}};
  for (const auto& combo : combos) {
    const auto s = setup(combo.n, combo.alpha);
    for (double a1_sq : {0.0, 0.36, 1.0}) {
      const Incident v0 = Incident::from_prob(a1_sq, 0.7);
      const TrajectoryAverage quad =
          time_average_quadrature(s.spec, s.policy, v0, auto_sample_count(combo.n));
      const TrajectoryAverage closed = time_average_closed_form(s.spec, s.policy, v0);
      CHECK(std::abs(quad.mean - closed.mean) < 1e-10);
      CHECK(std::abs(quad.variance - closed.variance) < 1e-10);
    }
  }
}

TEST_CASE("sampling past the exactness threshold changes nothing") {
  for (std::size_t n : {11u, 101u}) {
    const auto s = setup(n);
    const Incident v0 = Incident::from_prob(0.36);
    const std::size_t m = auto_sample_count(n);
    const TrajectoryAverage base = time_average_quadrature(s.spec, s.policy, v0, m);
    const TrajectoryAverage doubled = time_average_quadrature(s.spec, s.policy, v0, 2 * m);
    CHECK(std::abs(base.mean - doubled.mean) < 1e-11);
    CHECK(std::abs(base.variance - doubled.variance) < 1e-11);
  }
}

TEST_CASE("perturbed initial patterns keep the oracle equivalence") {
  const auto s = setup(25);
  const Incident v0 = Incident::from_prob(0.6, 0.3);
  const std::size_t flips[] = {1, 17};
  const Pattern start = make_cocked_pattern(25).flipped(flips);
  REQUIRE(start.rotation_period() == 25);
  const TrajectoryAverage quad =
      time_average_quadrature(s.spec, s.policy, v0, auto_sample_count(25), start);
  const TrajectoryAverage closed = time_average_closed_form(s.spec, s.policy, v0, start);
  CHECK(std::abs(quad.mean - closed.mean) < 1e-10);
  CHECK(std::abs(quad.variance - closed.variance) < 1e-10);
}

TEST_CASE("shift-invariant initial patterns are rejected by the closed form") {
  const auto s = setup(6);
  CHECK_THROWS_AS(time_average_closed_form(s.spec, s.policy, Incident::from_prob(0.5),
                                           Pattern::from_string("101010")),
                  std::invalid_argument);
  CHECK_THROWS_AS(time_average_closed_form(s.spec, s.policy, Incident::from_prob(0.5),
                                           Pattern::zeros(6)),
                  std::invalid_argument);
}

TEST_CASE("fully cocked orbits pin the mean at zero") {
  // alpha = 0.6 gives budget 2 on n=5, so all five rotations stay cocked.
  const auto s = setup(5, 0.6);
  REQUIRE(cocked_shift_count(s.spec, s.policy) == 5);
  const TrajectoryAverage closed =
      time_average_closed_form(s.spec, s.policy, Incident::from_prob(1.0));
  CHECK(closed.mean == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("specific instance: n=11, b=3, kappa=7") {
  const auto s = setup(11);
  REQUIRE(s.policy.budget() == 3);
  const std::size_t kappa = cocked_shift_count(s.spec, s.policy);
  REQUIRE(kappa == 7);
  const TrajectoryAverage closed =
      time_average_closed_form(s.spec, s.policy, Incident::from_prob(0.5));
  CHECK(closed.mean == doctest::Approx(0.5 * (1.0 - 7.0 / 11.0)).epsilon(1e-14));
}

TEST_CASE("dense-path quadrature agrees with the fast path") {
  for (std::size_t n : {5u, 7u, 11u}) {
    const auto s = setup(n);
    const Incident v0 = Incident::from_prob(0.36, 0.4);
    const std::size_t m = auto_sample_count(n);
    const TrajectoryAverage fast = time_average_quadrature(s.spec, s.policy, v0, m);
    const TrajectoryAverage dense = time_average_quadrature(s.spec, s.policy, v0, m,
                                                            std::nullopt, EvolutionPath::kDense);
    CHECK(std::abs(fast.mean - dense.mean) < 1e-10);
    CHECK(std::abs(fast.variance - dense.variance) < 1e-10);
  }
}

TEST_CASE("quadrature validates its arguments") {
  const auto s = setup(11);
  CHECK_THROWS_AS(time_average_quadrature(s.spec, s.policy, Incident::from_prob(0.5), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(time_average_quadrature(s.spec, CockedPolicy::make(0.5, 13),
                                          Incident::from_prob(0.5), 23),
                  std::invalid_argument);
}

TEST_CASE("limit value is the excitation probability") {
  CHECK(limit_value(Incident::from_prob(1.0)) == doctest::Approx(1.0));
  CHECK(limit_value(Incident::from_prob(0.0)) == doctest::Approx(0.0));
  CHECK(limit_value(Incident::from_prob(0.36, 2.2)) == doctest::Approx(0.36));
}

TEST_CASE("variance scan: deviations shrink with n, silent detector is flat") {
  const std::size_t sizes[] = {25, 64, 101};

  const auto quiet = time_variance_scan(sizes, 0.5, 1.0, Incident::from_prob(0.0), {});
  for (const TrajectoryAverage& row : quiet) {
    CHECK(row.mean == 0.0);
    CHECK(row.variance == 0.0);
  }

  const auto scan = time_variance_scan(sizes, 0.5, 1.0, Incident::from_prob(0.36), {});
  REQUIRE(scan.size() == 3);
  double previous = 1.0;
  for (const TrajectoryAverage& row : scan) {
    const double deviation = std::abs(row.mean - 0.36);
    CHECK(deviation < previous);
    CHECK(row.mean <= 0.36 + 1e-12);  // finite devices under-detect, never over
    CHECK(std::isfinite(row.variance));
    previous = deviation;
  }
}
