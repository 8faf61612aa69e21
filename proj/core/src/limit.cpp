#include "minglab/limit.hpp"

#include <cmath>
#include <stdexcept>

namespace minglab {

ClassicalLimitSystem build_classical_system(const Incident& v0) {
  return ClassicalLimitSystem{v0.a0_sq(), v0.a1_sq()};
}

double classical_expectation(const ClassicalLimitSystem& sys) { return sys.weight_p1; }

LimitFit extrapolate_limit(const std::vector<LimitSample>& samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("extrapolation needs at least two finite-size samples");
  }
  bool distinct = false;
  for (std::size_t i = 1; i < samples.size() && !distinct; ++i) {
    // kappa_i/n_i != kappa_0/n_0, compared exactly in integers.
    distinct = static_cast<std::uint64_t>(samples[i].kappa) * samples[0].n !=
               static_cast<std::uint64_t>(samples[0].kappa) * samples[i].n;
  }
  if (!distinct) {
    throw std::invalid_argument("degenerate design: all samples share the same kappa/n");
  }

  double num = 0.0, den = 0.0;
  for (const LimitSample& s : samples) {
    const double x = 1.0 - static_cast<double>(s.kappa) / static_cast<double>(s.n);
    num += x * s.mean;
    den += x * x;
  }
  if (den == 0.0) throw std::invalid_argument("all samples have kappa = n; no signal to fit");
  const double estimate = num / den;

  double residual = 0.0;
  for (const LimitSample& s : samples) {
    const double x = 1.0 - static_cast<double>(s.kappa) / static_cast<double>(s.n);
    residual = std::max(residual, std::abs(s.mean - estimate * x));
  }
  return LimitFit{estimate, residual};
}

}  // namespace minglab
