#pragma once
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rnsim {

// Fixed-capacity message made of integer fields with declared bit widths.
// Width accounting is what the channel audits against the message budget.
class Payload {
 public:
  static constexpr std::size_t kMaxFields = 8;

  Payload() = default;

  Payload& push(std::uint64_t value, unsigned width) {
    if (count_ == kMaxFields) throw std::length_error("payload field capacity exceeded");
    if (width < 64 && (value >> width) != 0) throw std::out_of_range("payload field wider than declared");
    fields_[count_] = value;
    widths_[count_] = static_cast<std::uint8_t>(width);
    ++count_;
    bits_ += width;
    return *this;
  }
  // Removes the last field and returns its value.
  std::uint64_t pop() {
    if (count_ == 0) throw std::out_of_range("pop on empty payload");
    --count_;
    bits_ -= widths_[count_];
    return fields_[count_];
  }
  std::uint64_t back() const { return fields_[count_ - 1]; }
  std::uint64_t operator[](std::size_t i) const { return fields_[i]; }
  std::size_t size() const { return count_; }
  unsigned bits() const { return bits_; }
  std::string hex() const;

  friend bool operator==(const Payload& a, const Payload& b) {
    if (a.count_ != b.count_) return false;
    for (std::size_t i = 0; i < a.count_; ++i)
      if (a.fields_[i] != b.fields_[i] || a.widths_[i] != b.widths_[i]) return false;
    return true;
  }

 private:
  std::array<std::uint64_t, kMaxFields> fields_{};
  std::array<std::uint8_t, kMaxFields> widths_{};
  std::uint8_t count_ = 0;
  std::uint16_t bits_ = 0;
};

// Bits needed to encode values in [0, n).
constexpr unsigned bits_for(std::uint64_t n) {
  unsigned b = 1;
  while (b < 64 && (std::uint64_t{1} << b) < n) ++b;
  return b;
}

}  // namespace rnsim
