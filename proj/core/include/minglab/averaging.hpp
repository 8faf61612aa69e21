#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minglab/apparatus.hpp"
#include "minglab/observable.hpp"
#include "minglab/pattern.hpp"
#include "minglab/state.hpp"

namespace minglab {

/// Deterministic tree reduction; summation order is fixed regardless of how
/// samples were produced, for reproducible results to ~1e-12.
double pairwise_sum(std::span<const double> values);

/// Sample count at which equal-spaced quadrature over one period is exact:
/// the pointer signal along the trajectory is a trigonometric polynomial of
/// degree at most 2(n-1).
inline std::size_t auto_sample_count(std::size_t n) { return 2 * n + 1; }

/// One-period statistics of the pointer observable along a trajectory.
/// Periodicity of the evolution makes the one-period average equal to the
/// infinite-time average, with no truncation error.
struct TrajectoryAverage {
  std::size_t n = 0;
  double alpha = 0.0;
  double a1_sq = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  std::size_t samples = 0;  // quadrature points (0 for closed form)
  std::string method;       // "quadrature" | "closed-form"
};

enum class EvolutionPath { kFast, kDense };

/// Equal-spaced one-period quadrature of the pointer observable from the
/// initial condition v0 (x) |initial>; `initial` defaults to the armed
/// configuration.  With samples >= 2n+1 the result is the exact time
/// average up to rounding.
TrajectoryAverage time_average_quadrature(const ApparatusSpec& spec, const CockedPolicy& policy,
                                          const Incident& v0, std::size_t samples,
                                          const std::optional<Pattern>& initial = std::nullopt,
                                          EvolutionPath path = EvolutionPath::kFast);

/// Closed-form oracle, no time evolution: a basis-vector start has a flat
/// orbit spectrum, so every orbit member carries time-averaged weight 1/n
/// and the mean is |a1|^2 (1 - kappa/n) + |a0|^2 (1 - [initial cocked]).
/// The variance comes from the DFT of the cocked indicator over the orbit.
/// Initial patterns with rotation period < n (shift-invariant structure) are
/// rejected.
TrajectoryAverage time_average_closed_form(const ApparatusSpec& spec, const CockedPolicy& policy,
                                           const Incident& v0,
                                           const std::optional<Pattern>& initial = std::nullopt);

/// The thermodynamic-limit value of the time-averaged pointer: |a1|^2.
double limit_value(const Incident& v0);

/// Mean/variance sweep across apparatus sizes, one quadrature run per n.
/// The finite-n fluctuation diagnostics these report shrink as n grows; the
/// trend is reported, not asserted pointwise.
std::vector<TrajectoryAverage> time_variance_scan(std::span<const std::size_t> sizes,
                                                  double alpha, double h0, const Incident& v0,
                                                  std::optional<std::size_t> samples);

}  // namespace minglab
