#pragma once
#include <cstdint>
#include <stdexcept>

namespace rnsim {

// Largest power of two dividing i (ruler function). Throws for i = 0.
std::uint64_t y_value(std::uint64_t i);

// Special-update depth schedule: entry 0 is the truncation value, entry i >= 1
// is min(truncation, alpha * y_value(i)).
class ZSequence {
 public:
  static constexpr std::uint64_t kAlpha = 4;

  explicit ZSequence(std::uint64_t d_star);
  std::uint64_t d_star() const { return d_star_; }
  std::uint64_t operator[](std::uint64_t i) const;

 private:
  std::uint64_t d_star_;
};

// Least alpha * 2^j with alpha * 2^j >= slack * depth / inv_beta.
std::uint64_t d_star(std::uint64_t slack, std::uint64_t inv_beta, std::uint64_t depth);

struct ZCheck {
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
};

// Exhaustive checks of the periodicity properties for indices 0..max_index:
//  (a) for every b in {alpha, 2 alpha, ..., d_star}, the next index j > i with
//      Z[j] >= b satisfies j - i <= b / alpha, with equality when Z[i] >= b;
//  (b) the next j > i with Z[j] > Z[i] or Z[j] = d_star has j - i = Z[i] / alpha,
//      and every index strictly between has Z[k] <= Z[i] / 2.
ZCheck check_periodicity(std::uint64_t d_star, std::uint64_t max_index);
ZCheck check_next_larger(std::uint64_t d_star, std::uint64_t max_index);

}  // namespace rnsim
