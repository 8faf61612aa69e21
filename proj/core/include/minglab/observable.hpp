#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "minglab/apparatus.hpp"
#include "minglab/pattern.hpp"
#include "minglab/rng.hpp"
#include "minglab/state.hpp"

namespace minglab {

/// Finite-n quantification of "all but a negligible number of sites agree
/// with the armed configuration": at most floor(n^alpha) wrong bits in each
/// half.  The per-apparatus budget must stay below n/2, which any
/// alpha < 1 satisfies once n is large enough.
class CockedPolicy {
 public:
  static CockedPolicy make(double alpha, std::size_t n);

  double alpha() const { return alpha_; }
  std::size_t n() const { return reference_.size(); }
  std::size_t budget() const { return budget_; }
  std::size_t half() const { return n() / 2; }
  const Pattern& reference() const { return reference_; }

 private:
  CockedPolicy(double alpha, std::size_t budget, Pattern reference)
      : alpha_(alpha), budget_(budget), reference_(std::move(reference)) {}

  double alpha_;
  std::size_t budget_;
  Pattern reference_;
};

/// floor(n^alpha), computed so that exact integer powers are not lost to
/// floating-point rounding.
std::size_t defect_budget(std::size_t n, double alpha);

struct CockedMembership {
  std::size_t first_half_defects;   // zeros among positions 1..floor(n/2)
  std::size_t second_half_defects;  // ones among the remaining positions
  bool is_member;
};

/// Membership of a pattern in the cocked set under the policy.  Defects are
/// mismatches against the reference configuration, counted per half.
CockedMembership is_cocked(const Pattern& p, const CockedPolicy& policy);

/// Flags member j of the orbit (= representative rotated j times) as cocked
/// or not, for j = 0..count-1.  One incremental rotation scan, O(count * n/64).
std::vector<std::uint8_t> rotation_cocked_flags(const Pattern& representative,
                                                std::size_t count,
                                                const CockedPolicy& policy);

/// kappa_n: how many of the n cyclic shifts of the armed configuration still
/// lie inside the cocked set.  Controls the finite-size deviation of the
/// time-averaged pointer.
std::size_t cocked_shift_count(const ApparatusSpec& spec, const CockedPolicy& policy);

/// Cocked flag for every pattern index of the full 2^n basis (dense path).
std::vector<std::uint8_t> dense_cocked_flags(std::size_t n, const CockedPolicy& policy);

/// The pointer observable: 1 minus the amplitude mass on cocked basis
/// vectors.  Sector representations must match (no silent orbit/dense
/// coercion); the state must be normalized to 1e-9.
double pointer_observable(const CombinedState& cs, const CockedPolicy& policy);

/// Amplitude mass a single sector carries on cocked patterns.
double cocked_mass(const SectorState& sector, const CockedPolicy& policy);

// ---------------------------------------------------------------------------
// Macroscopicity diagnostic: does the large-n value of an observable family
// on product states depend on a fixed finite prefix?
// ---------------------------------------------------------------------------

/// Product state of the combined system: a dense prefix over the incident
/// particle plus the first `prefix_sites` apparatus sites (basis index has
/// the incident bit as MSB, then sites left to right), followed by
/// single-site factors for the remaining apparatus sites.
struct ProductState {
  std::size_t prefix_sites = 0;
  std::vector<Complex> prefix_amplitudes;        // size 2^(1+prefix_sites), unit norm
  std::vector<std::array<Complex, 2>> tail;      // per site: (amp of 0, amp of 1)

  std::size_t apparatus_size() const { return prefix_sites + tail.size(); }
};

struct ObservableFamily {
  std::string name;
  std::function<double(const ProductState&)> eval;
};

/// The pointer family itself, evaluated exactly on product states via the
/// independent-defect distribution of the site marginals.
ObservableFamily pointer_defect_family(double alpha);

/// f == c regardless of the state; trivially prefix-independent.
ObservableFamily constant_family(double value);

/// Excitation probability of apparatus site 1: a local observable, the
/// canonical counterexample (directly prefix-dependent).
ObservableFamily first_site_excitation_family();

struct MacroCheckParams {
  std::vector<std::size_t> n_grid;    // tail lengths to probe, ascending
  std::size_t prefix_count = 5;       // prefix sizes 0, 1, 2, 4, 8, ...
  std::size_t max_prefix_sites = 8;
  std::size_t trials = 8;             // independent tail sequences
  double tol = 0.05;
  std::uint64_t seed = 1;
};

struct MacroCheckRow {
  std::size_t n;  // tail length; total apparatus size is n + prefix_sites
  std::size_t prefix_id;
  std::size_t prefix_sites;
  double estimate;  // family value averaged over tail draws
  double spread;    // worst across-prefix spread at this n over tail draws
};

struct MacroCheckReport {
  std::vector<MacroCheckRow> rows;
  std::vector<double> spread_by_n;
  double final_spread;
  double tol;
  bool pass;
  std::string note;  // always flags the sampled-heuristic character
};

/// Samples random tail sequences and random prefixes, evaluates the family
/// along the n grid and reports the across-prefix spread.  A sampled
/// diagnostic, not a proof: PASS means no prefix dependence was detected at
/// the largest n.
MacroCheckReport macroscopicity_check(const ObservableFamily& family,
                                      const MacroCheckParams& params);

}  // namespace minglab
