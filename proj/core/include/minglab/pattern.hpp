#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace minglab {

/// A length-n binary configuration of the apparatus, bits b1..bn left to
/// right.  Stored packed, 64 positions per word, so rotations and defect
/// counts cost O(n/64).  Position i (0-based, i.e. b_{i+1}) lives at word
/// i/64, bit i%64.  Values are immutable: all operations return new patterns.
class Pattern {
 public:
  /// All-zero pattern of n sites.  n >= 2.
  static Pattern zeros(std::size_t n);
  static Pattern ones(std::size_t n);

  /// Parse "110" -> bits b1=1, b2=1, b3=0.
  static Pattern from_string(std::string_view bits);

  /// Inverse of to_index: the pattern of n sites whose b1 is the most
  /// significant bit of `index`.  Requires n <= 63.
  static Pattern from_index(std::size_t n, std::uint64_t index);

  std::size_t size() const { return n_; }
  bool bit(std::size_t i) const {  // 0-based: bit(0) is b1
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }

  std::size_t popcount() const;

  /// Rightward cyclic rotation by m: output position (i+m) mod n takes input
  /// position i.  rotated(1) is one application of the shift dynamics.
  Pattern rotated(std::size_t m) const;

  /// Copy with the listed 0-based positions flipped.
  Pattern flipped(std::span<const std::size_t> positions) const;

  /// Number of mismatching positions vs `other` among positions [lo, hi).
  std::size_t mismatches_in_range(const Pattern& other, std::size_t lo,
                                  std::size_t hi) const;

  /// Smallest d > 0 with rotated(d) == *this.  Always divides n.
  std::size_t rotation_period() const;

  /// Basis index with b1 as most significant bit (|110> -> 6).  n <= 63.
  std::uint64_t to_index() const;

  std::string to_string() const;

  bool operator==(const Pattern& other) const = default;

 private:
  Pattern(std::size_t n, std::vector<std::uint64_t> words)
      : n_(n), words_(std::move(words)) {}

  std::size_t word_count() const { return (n_ + 63) / 64; }
  void mask_top_word();

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// One application of the cyclic shift: |b1 b2 .. bn> -> |bn b1 .. b_{n-1}>.
Pattern shift(const Pattern& p);

/// The armed detector configuration: 1 at positions 1..floor(n/2), 0 after.
Pattern make_cocked_pattern(std::size_t n);

}  // namespace minglab
