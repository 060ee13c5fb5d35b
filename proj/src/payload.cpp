#include "rnsim/payload.hpp"

#include <cstdio>

namespace rnsim {

std::string Payload::hex() const {
  if (count_ == 0) return "-";
  std::string out;
  char buf[24];
  for (std::size_t i = 0; i < count_; ++i) {
    std::snprintf(buf, sizeof buf, "%s%llx", i ? "." : "", static_cast<unsigned long long>(fields_[i]));
    out += buf;
  }
  return out;
}

}  // namespace rnsim
