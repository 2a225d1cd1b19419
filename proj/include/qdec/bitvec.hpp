#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdec {

/// Fixed-length bit vector packed into 64-bit words. Used for syndromes
/// (length m) and logical labels (length L). Bit i of the vector maps to
/// character i of the "01" text form.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }

  bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }

  void set(std::size_t i, bool v) {
    uint64_t mask = uint64_t{1} << (i & 63);
    if (v)
      w_[i >> 6] |= mask;
    else
      w_[i >> 6] &= ~mask;
  }

  void flip(std::size_t i) { w_[i >> 6] ^= uint64_t{1} << (i & 63); }

  BitVec& operator^=(const BitVec& o) {
    if (o.n_ != n_) throw std::invalid_argument("BitVec xor: length mismatch");
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
    return *this;
  }

  bool any() const {
    for (uint64_t w : w_)
      if (w) return true;
    return false;
  }

  std::size_t popcount() const {
    std::size_t c = 0;
    for (uint64_t w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const BitVec& o) const { return !(*this == o); }

  /// Lexicographic order on the bit string (bit 0 first).
  bool operator<(const BitVec& o) const {
    std::size_t n = n_ < o.n_ ? n_ : o.n_;
    for (std::size_t i = 0; i < n; ++i) {
      bool a = get(i), b = o.get(i);
      if (a != b) return b;
    }
    return n_ < o.n_;
  }

  std::string to01() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  static BitVec from01(const std::string& s) {
    BitVec v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1')
        v.set(i, true);
      else if (s[i] != '0')
        throw std::invalid_argument("BitVec: expected '0'/'1', got '" + std::string(1, s[i]) + "'");
    }
    return v;
  }

  /// Value of the first (up to) 64 bits, bit 0 = LSB.
  uint64_t low64() const { return w_.empty() ? 0 : w_[0]; }

  std::size_t hash() const {
    uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (uint64_t w : w_) {
      for (int b = 0; b < 8; ++b) {
        h ^= (w >> (8 * b)) & 0xff;
        h *= 1099511628211ULL;
      }
    }
    h ^= n_;
    h *= 1099511628211ULL;
    return static_cast<std::size_t>(h);
  }

 private:
  std::size_t n_ = 0;
  std::vector<uint64_t> w_;
};

struct BitVecHash {
  std::size_t operator()(const BitVec& v) const { return v.hash(); }
};

}  // namespace qdec
