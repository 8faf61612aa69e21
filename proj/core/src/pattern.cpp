#include "minglab/pattern.hpp"

#include <bit>
#include <stdexcept>

namespace minglab {

namespace {

void check_size(std::size_t n) {
  if (n < 2) throw std::invalid_argument("pattern size must be at least 2");
}

}  // namespace

void Pattern::mask_top_word() {
  const std::size_t rem = n_ & 63;
  if (rem != 0) words_.back() &= (std::uint64_t{1} << rem) - 1;
}

Pattern Pattern::zeros(std::size_t n) {
  check_size(n);
  return Pattern(n, std::vector<std::uint64_t>((n + 63) / 64, 0));
}

Pattern Pattern::ones(std::size_t n) {
  check_size(n);
  Pattern p(n, std::vector<std::uint64_t>((n + 63) / 64, ~std::uint64_t{0}));
  p.mask_top_word();
  return p;
}

Pattern Pattern::from_string(std::string_view bits) {
  check_size(bits.size());
  Pattern p = zeros(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      p.words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("pattern string must contain only 0 and 1");
    }
  }
  return p;
}

Pattern Pattern::from_index(std::size_t n, std::uint64_t index) {
  check_size(n);
  if (n > 63) throw std::invalid_argument("index form limited to n <= 63");
  if (index >> n) throw std::invalid_argument("index out of range for n sites");
  Pattern p = zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    if ((index >> (n - 1 - i)) & 1u) p.words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  return p;
}

std::size_t Pattern::popcount() const {
  std::size_t total = 0;
  for (std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

Pattern Pattern::rotated(std::size_t m) const {
  m %= n_;
  if (m == 0) return *this;
  const std::size_t nwords = word_count();
  std::vector<std::uint64_t> out(nwords, 0);

  // out = (this << m) | (this >> (n - m)) within the n-bit register.
  auto or_shifted_left = [&](std::size_t k) {
    const std::size_t ws = k >> 6, bs = k & 63;
    for (std::size_t w = nwords; w-- > 0;) {
      std::uint64_t v = 0;
      if (w >= ws) {
        v = words_[w - ws] << bs;
        if (bs != 0 && w >= ws + 1) v |= words_[w - ws - 1] >> (64 - bs);
      }
      out[w] |= v;
    }
  };
  auto or_shifted_right = [&](std::size_t k) {
    const std::size_t ws = k >> 6, bs = k & 63;
    for (std::size_t w = 0; w < nwords; ++w) {
      std::uint64_t v = 0;
      if (w + ws < nwords) {
        v = words_[w + ws] >> bs;
        if (bs != 0 && w + ws + 1 < nwords) v |= words_[w + ws + 1] << (64 - bs);
      }
      out[w] |= v;
    }
  };

  or_shifted_left(m);
  or_shifted_right(n_ - m);
  Pattern p(n_, std::move(out));
  p.mask_top_word();
  return p;
}

Pattern Pattern::flipped(std::span<const std::size_t> positions) const {
  Pattern p = *this;
  for (std::size_t i : positions) {
    if (i >= n_) throw std::invalid_argument("flip position out of range");
    p.words_[i >> 6] ^= std::uint64_t{1} << (i & 63);
  }
  return p;
}

std::size_t Pattern::mismatches_in_range(const Pattern& other, std::size_t lo,
                                         std::size_t hi) const {
  if (other.n_ != n_) throw std::invalid_argument("pattern length mismatch");
  if (hi > n_ || lo > hi) throw std::invalid_argument("bad position range");
  std::size_t total = 0;
  const std::size_t wlo = lo >> 6, whi = (hi + 63) >> 6;
  for (std::size_t w = wlo; w < whi; ++w) {
    std::uint64_t x = words_[w] ^ other.words_[w];
    if (w == wlo && (lo & 63) != 0) x &= ~std::uint64_t{0} << (lo & 63);
    if (w == (hi >> 6) && (hi & 63) != 0) x &= (std::uint64_t{1} << (hi & 63)) - 1;
    total += static_cast<std::size_t>(std::popcount(x));
  }
  return total;
}

std::size_t Pattern::rotation_period() const {
  // The period divides n, so only divisors need testing.
  for (std::size_t d = 1; d <= n_; ++d) {
    if (n_ % d != 0) continue;
    if (rotated(d) == *this) return d;
  }
  return n_;  // unreachable: d == n always matches
}

std::uint64_t Pattern::to_index() const {
  if (n_ > 63) throw std::invalid_argument("index form limited to n <= 63");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    v = (v << 1) | static_cast<std::uint64_t>(bit(i));
  }
  return v;
}

std::string Pattern::to_string() const {
  std::string s(n_, '0');
  for (std::size_t i = 0; i < n_; ++i) {
    if (bit(i)) s[i] = '1';
  }
  return s;
}

Pattern shift(const Pattern& p) { return p.rotated(1); }

Pattern make_cocked_pattern(std::size_t n) {
  if (n < 2) throw std::invalid_argument("apparatus needs at least 2 sites");
  Pattern p = Pattern::zeros(n);
  std::vector<std::size_t> on(n / 2);
  for (std::size_t i = 0; i < n / 2; ++i) on[i] = i;
  return p.flipped(on);
}

}  // namespace minglab
