#pragma once

#include <cstdint>
#include <vector>

#include "minglab/state.hpp"

namespace minglab {

/// The classical system the amplifier becomes in the infinite-size limit:
/// two points, P0 "armed, no detection" and P1 "excitation travelling,
/// detection registered", with the pointer variable F = indicator of P1 and
/// a mixed state weighting the points by the incident probabilities.
struct ClassicalLimitSystem {
  double weight_p0;  // |a0|^2
  double weight_p1;  // |a1|^2
};

ClassicalLimitSystem build_classical_system(const Incident& v0);

/// Expectation of the detection indicator under the mixed state: weight_p1.
double classical_expectation(const ClassicalLimitSystem& sys);

/// Finite-size data point for the extrapolation fit.
struct LimitSample {
  std::size_t n;
  double mean;        // time-averaged pointer at this n
  std::size_t kappa;  // cocked shifts at this n
};

struct LimitFit {
  double estimate;  // fitted L in mean = L * (1 - kappa/n)
  double residual;  // max |mean_i - L * (1 - kappa_i/n_i)|
};

/// Least-squares fit of the exact finite-size law mean = L (1 - kappa/n).
/// Needs at least two samples with distinct kappa/n (compared exactly as
/// rationals); the law is exact for this model, so residuals near rounding
/// level indicate a sharp fit.
LimitFit extrapolate_limit(const std::vector<LimitSample>& samples);

}  // namespace minglab
