#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "minglab/pattern.hpp"

namespace minglab {

/// The cyclic-shift orbit of a pattern: the invariant subspace the fast
/// evolution path lives in.  Members are kept implicit (member j is the
/// representative rotated j times) so that an orbit of a 10^6-site pattern
/// costs O(n) bits, not O(n^2).
class OrbitBasis {
 public:
  explicit OrbitBasis(Pattern representative);

  const Pattern& representative() const { return rep_; }
  std::size_t period() const { return period_; }
  std::size_t apparatus_size() const { return rep_.size(); }

  Pattern member(std::size_t j) const { return rep_.rotated(j % period_); }

  /// Materialized member list; intended for small orbits (tests, oracles).
  std::vector<Pattern> members() const;

 private:
  Pattern rep_;
  std::size_t period_;
};

/// Shared-ownership handle; sector states and propagators on the same orbit
/// reference one immutable basis.
using OrbitBasisPtr = std::shared_ptr<const OrbitBasis>;

inline OrbitBasisPtr orbit(Pattern representative) {
  return std::make_shared<const OrbitBasis>(std::move(representative));
}

/// Number of cyclic orbits of length-n binary strings.  Counts by direct
/// enumeration for n <= 20 and by the Burnside divisor sum
/// (1/n) sum_{d|n} phi(d) 2^{n/d} beyond; n > 62 overflows 64-bit counts and
/// is rejected.  For prime n the result equals 2 + (2^n - 2)/n.
std::uint64_t count_orbits(std::size_t n);

/// Enumeration-only variant (n <= 20): walks every bitstring and counts
/// minimal rotation representatives.  Kept separate so the two counting
/// routes can be checked against each other.
std::uint64_t count_orbits_by_enumeration(std::size_t n);

/// Burnside-only variant (n <= 62).
std::uint64_t count_orbits_by_burnside(std::size_t n);

/// All orbits of the full 2^n basis as index lists in shift order,
/// each starting from its minimal basis index.  Requires n <= 20.
std::vector<std::vector<std::uint64_t>> enumerate_orbit_index_lists(std::size_t n);

}  // namespace minglab
