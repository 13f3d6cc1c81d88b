#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace netscore {

/// Locale-independent fixed-point rendering; "-0.00" collapses to "0.00".
inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
  std::string out(buf, ptr);
  if (out.find_first_not_of("-0.") == std::string::npos && out[0] == '-') {
    out.erase(0, 1);
  }
  return out;
}

}  // namespace netscore
