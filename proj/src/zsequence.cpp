#include "rnsim/zsequence.hpp"

#include <algorithm>
#include <bit>

namespace rnsim {

std::uint64_t y_value(std::uint64_t i) {
  if (i == 0) throw std::domain_error("y_value is defined for i >= 1");
  return i & (~i + 1);
}

ZSequence::ZSequence(std::uint64_t d_star) : d_star_(d_star) {
  if (d_star < kAlpha || !std::has_single_bit(d_star / kAlpha) || d_star % kAlpha)
    throw std::invalid_argument("truncation value must be alpha times a power of two");
}

std::uint64_t ZSequence::operator[](std::uint64_t i) const {
  if (i == 0) return d_star_;
  std::uint64_t y = y_value(i);
  return y >= d_star_ / kAlpha ? d_star_ : kAlpha * y;
}

std::uint64_t d_star(std::uint64_t slack, std::uint64_t inv_beta, std::uint64_t depth) {
  std::uint64_t z = ZSequence::kAlpha;
  while (z * inv_beta < slack * depth) z *= 2;
  return z;
}

ZCheck check_periodicity(std::uint64_t d_star, std::uint64_t max_index) {
  ZSequence z(d_star);
  ZCheck r;
  for (std::uint64_t b = ZSequence::kAlpha; b <= d_star; b *= 2) {
    // Walk backwards so next_at_least is the smallest j > i with Z[j] >= b.
    std::uint64_t next = 0;
    bool have = false;
    for (std::uint64_t k = max_index + b / ZSequence::kAlpha + 1; k-- > 0;) {
      if (k <= max_index) {
        ++r.checked;
        if (!have) {
          ++r.violations;
        } else {
          std::uint64_t gap = next - k;
          bool ok = gap <= b / ZSequence::kAlpha;
          if (z[k] >= b) ok &= gap == b / ZSequence::kAlpha;
          r.violations += !ok;
        }
      }
      if (z[k] >= b) {
        next = k;
        have = true;
      }
    }
  }
  return r;
}

ZCheck check_next_larger(std::uint64_t d_star, std::uint64_t max_index) {
  ZSequence z(d_star);
  ZCheck r;
  for (std::uint64_t i = 0; i <= max_index; ++i) {
    ++r.checked;
    const std::uint64_t zi = z[i];
    std::uint64_t j = i + 1;
    bool small_between = true;
    while (!(z[j] > zi || z[j] == d_star)) {
      small_between &= z[j] <= zi / 2;
      ++j;
    }
    r.violations += !(j - i == zi / ZSequence::kAlpha && small_between);
  }
  return r;
}

}  // namespace rnsim
