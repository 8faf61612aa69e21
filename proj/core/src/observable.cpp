#include "minglab/observable.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace minglab {

std::size_t defect_budget(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const long double exact = std::pow(static_cast<long double>(n), static_cast<long double>(alpha));
  auto b = static_cast<std::size_t>(std::floor(exact + 1e-9L));
  return b;
}

CockedPolicy CockedPolicy::make(double alpha, std::size_t n) {
  const std::size_t b = defect_budget(n, alpha);
  if (2 * b >= n) {
    throw std::invalid_argument("defect budget floor(n^alpha) must stay below n/2; n=" +
                                std::to_string(n) + " is too small for alpha=" +
                                std::to_string(alpha));
  }
  return CockedPolicy(alpha, b, make_cocked_pattern(n));
}

CockedMembership is_cocked(const Pattern& p, const CockedPolicy& policy) {
  if (p.size() != policy.n()) {
    throw std::invalid_argument("pattern length does not match policy apparatus size");
  }
  const std::size_t half = policy.half();
  const std::size_t d1 = p.mismatches_in_range(policy.reference(), 0, half);
  const std::size_t d2 = p.mismatches_in_range(policy.reference(), half, p.size());
  const bool member = d1 <= policy.budget() && d2 <= policy.budget();
  return CockedMembership{d1, d2, member};
}

std::vector<std::uint8_t> rotation_cocked_flags(const Pattern& representative,
                                                std::size_t count,
                                                const CockedPolicy& policy) {
  if (representative.size() != policy.n()) {
    throw std::invalid_argument("pattern length does not match policy apparatus size");
  }
  std::vector<std::uint8_t> flags(count, 0);
  Pattern current = representative;
  for (std::size_t j = 0; j < count; ++j) {
    if (j > 0) current = shift(current);
    flags[j] = is_cocked(current, policy).is_member ? 1 : 0;
  }
  return flags;
}

std::size_t cocked_shift_count(const ApparatusSpec& spec, const CockedPolicy& policy) {
  if (spec.n != policy.n()) throw std::invalid_argument("spec and policy sizes differ");
  const std::vector<std::uint8_t> flags =
      rotation_cocked_flags(policy.reference(), spec.n, policy);
  std::size_t kappa = 0;
  for (std::uint8_t f : flags) kappa += f;
  return kappa;
}

std::vector<std::uint8_t> dense_cocked_flags(std::size_t n, const CockedPolicy& policy) {
  if (n != policy.n()) throw std::invalid_argument("size does not match policy");
  if (n > kDenseCap) throw std::invalid_argument("dense flags limited to n <= 12");
  const std::size_t half = n / 2;
  const std::uint64_t dim = std::uint64_t{1} << n;
  // Index encoding has b1 as MSB: the first half occupies the top bits.
  const std::uint64_t low_mask = (std::uint64_t{1} << (n - half)) - 1;
  std::vector<std::uint8_t> flags(dim, 0);
  for (std::uint64_t v = 0; v < dim; ++v) {
    const auto ones_top = static_cast<std::size_t>(std::popcount(v >> (n - half)));
    const auto ones_bottom = static_cast<std::size_t>(std::popcount(v & low_mask));
    const std::size_t d1 = half - ones_top;  // zeros in the armed half
    const std::size_t d2 = ones_bottom;      // ones in the discharged half
    flags[v] = (d1 <= policy.budget() && d2 <= policy.budget()) ? 1 : 0;
  }
  return flags;
}

double cocked_mass(const SectorState& sector, const CockedPolicy& policy) {
  if (sector.apparatus_size() != policy.n()) {
    throw std::invalid_argument("sector size does not match policy");
  }
  double mass = 0.0;
  if (sector.is_orbit()) {
    const OrbitBasis& basis = *sector.basis();
    const std::vector<std::uint8_t> flags =
        rotation_cocked_flags(basis.representative(), basis.period(), policy);
    const auto& amp = sector.amplitudes();
    for (std::size_t j = 0; j < amp.size(); ++j) {
      if (flags[j]) mass += std::norm(amp[j]);
    }
  } else {
    const std::vector<std::uint8_t> flags = dense_cocked_flags(sector.apparatus_size(), policy);
    const auto& amp = sector.amplitudes();
    for (std::size_t v = 0; v < amp.size(); ++v) {
      if (flags[v]) mass += std::norm(amp[v]);
    }
  }
  return mass;
}

double pointer_observable(const CombinedState& cs, const CockedPolicy& policy) {
  if (cs.sector0.kind() != cs.sector1.kind()) {
    throw std::invalid_argument("mixed orbit/dense sector representations are not comparable; "
                                "convert explicitly first");
  }
  if (std::abs(cs.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("pointer observable requires a normalized state");
  }
  const double mass = std::norm(cs.a0) * cocked_mass(cs.sector0, policy) +
                      std::norm(cs.a1) * cocked_mass(cs.sector1, policy);
  return std::clamp(1.0 - mass, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Macroscopicity diagnostic
// ---------------------------------------------------------------------------

namespace {

// P[sum of independent Bernoulli(q_i) <= j] for j = 0..cap; index cap+1
// accumulates the overflow bucket.
std::vector<double> bernoulli_sum_cdf(const std::vector<double>& q, std::size_t cap) {
  std::vector<double> pmf(cap + 2, 0.0);
  pmf[0] = 1.0;
  for (const double qi : q) {
    for (std::size_t j = cap + 1; j > 0; --j) {
      const double stay = pmf[j] * (j == cap + 1 ? 1.0 : (1.0 - qi));
      const double up = pmf[j - 1] * qi;
      pmf[j] = stay + up;
    }
    pmf[0] *= (1.0 - qi);
  }
  std::vector<double> cdf(cap + 1, 0.0);
  double acc = 0.0;
  for (std::size_t j = 0; j <= cap; ++j) {
    acc += pmf[j];
    cdf[j] = std::min(acc, 1.0);
  }
  return cdf;
}

}  // namespace

ObservableFamily pointer_defect_family(double alpha) {
  return ObservableFamily{
      "pointer-defect",
      [alpha](const ProductState& ps) {
        const std::size_t n = ps.apparatus_size();
        const std::size_t half = n / 2;
        if (ps.prefix_sites > half) {
          throw std::invalid_argument("prefix extends past the armed half");
        }
        const std::size_t budget = defect_budget(n, alpha);
        if (2 * budget >= n) throw std::invalid_argument("apparatus too small for alpha");

        // Site defect probabilities from the tail marginals, split by half.
        std::vector<double> q_first, q_second;
        for (std::size_t i = 0; i < ps.tail.size(); ++i) {
          const std::size_t pos = ps.prefix_sites + i;  // 0-based absolute site
          const double p1 = std::norm(ps.tail[i][1]);
          const double p0 = std::norm(ps.tail[i][0]);
          const double total = p0 + p1;
          if (pos < half) {
            q_first.push_back(p0 / total);  // defect = site discharged in armed half
          } else {
            q_second.push_back(p1 / total);  // defect = site excited in quiet half
          }
        }
        const std::vector<double> cdf1 = bernoulli_sum_cdf(q_first, budget);
        const std::vector<double> cdf2 = bernoulli_sum_cdf(q_second, budget);

        // Prefix basis states contribute their own armed-half defects.
        double mass = 0.0;
        const std::size_t dim = ps.prefix_amplitudes.size();
        for (std::size_t v = 0; v < dim; ++v) {
          const double w = std::norm(ps.prefix_amplitudes[v]);
          if (w == 0.0) continue;
          std::size_t prefix_defects = 0;
          for (std::size_t s = 0; s < ps.prefix_sites; ++s) {
            // Site s+1 is bit (prefix_sites - 1 - s); the incident bit above
            // them never constrains membership.
            const bool excited = (v >> (ps.prefix_sites - 1 - s)) & 1u;
            if (!excited) ++prefix_defects;
          }
          if (prefix_defects > budget) continue;
          mass += w * cdf1[budget - prefix_defects] * cdf2[budget];
        }
        return std::clamp(1.0 - mass, 0.0, 1.0);
      }};
}

ObservableFamily constant_family(double value) {
  return ObservableFamily{"constant", [value](const ProductState&) { return value; }};
}

ObservableFamily first_site_excitation_family() {
  return ObservableFamily{
      "first-site-excitation",
      [](const ProductState& ps) {
        if (ps.prefix_sites >= 1) {
          double p = 0.0;
          for (std::size_t v = 0; v < ps.prefix_amplitudes.size(); ++v) {
            if ((v >> (ps.prefix_sites - 1)) & 1u) p += std::norm(ps.prefix_amplitudes[v]);
          }
          return p;
        }
        if (ps.tail.empty()) throw std::invalid_argument("empty product state");
        return std::norm(ps.tail[0][1]);
      }};
}

MacroCheckReport macroscopicity_check(const ObservableFamily& family,
                                      const MacroCheckParams& params) {
  if (params.n_grid.empty()) throw std::invalid_argument("macro check needs an n grid");
  if (params.prefix_count == 0 || params.trials == 0) {
    throw std::invalid_argument("macro check needs prefixes and trials");
  }
  Rng rng(params.seed);

  // Prefix sizes 0, 1, 2, 4, 8, ... capped; one random prefix vector each.
  std::vector<std::size_t> prefix_sites;
  std::vector<std::vector<Complex>> prefix_vectors;
  for (std::size_t i = 0; i < params.prefix_count; ++i) {
    std::size_t sites = i == 0 ? 0 : std::size_t{1} << (i - 1);
    sites = std::min(sites, params.max_prefix_sites);
    prefix_sites.push_back(sites);
    prefix_vectors.push_back(rng.unit_vector(std::size_t{1} << (1 + sites)));
  }

  const std::size_t max_n = *std::max_element(params.n_grid.begin(), params.n_grid.end());
  const std::size_t max_prefix = *std::max_element(prefix_sites.begin(), prefix_sites.end());

  // One shared site stream per trial: site i is the same physical factor no
  // matter how long the prefix is.
  std::vector<std::vector<std::array<Complex, 2>>> streams(params.trials);
  for (auto& stream : streams) {
    stream.reserve(max_prefix + max_n);
    for (std::size_t i = 0; i < max_prefix + max_n; ++i) stream.push_back(rng.unit_qubit());
  }

  MacroCheckReport report;
  report.tol = params.tol;
  report.note = "sampled heuristic: finite draws over prefixes and tail sequences, not a proof";

  for (const std::size_t n : params.n_grid) {
    double worst_spread = 0.0;
    std::vector<double> estimate(prefix_sites.size(), 0.0);
    for (std::size_t trial = 0; trial < params.trials; ++trial) {
      double lo = 0.0, hi = 0.0;
      for (std::size_t p = 0; p < prefix_sites.size(); ++p) {
        ProductState ps;
        ps.prefix_sites = prefix_sites[p];
        ps.prefix_amplitudes = prefix_vectors[p];
        ps.tail.assign(streams[trial].begin() + static_cast<std::ptrdiff_t>(ps.prefix_sites),
                       streams[trial].begin() + static_cast<std::ptrdiff_t>(ps.prefix_sites + n));
        const double value = family.eval(ps);
        estimate[p] += value;
        if (p == 0) {
          lo = hi = value;
        } else {
          lo = std::min(lo, value);
          hi = std::max(hi, value);
        }
      }
      worst_spread = std::max(worst_spread, hi - lo);
    }
    for (std::size_t p = 0; p < prefix_sites.size(); ++p) {
      report.rows.push_back(MacroCheckRow{n, p, prefix_sites[p],
                                          estimate[p] / static_cast<double>(params.trials),
                                          worst_spread});
    }
    report.spread_by_n.push_back(worst_spread);
  }

  report.final_spread = report.spread_by_n.back();
  report.pass = report.final_spread < params.tol;
  return report;
}

}  // namespace minglab
