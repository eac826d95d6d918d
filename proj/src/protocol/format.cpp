#include "madphys/protocol/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace madphys::protocol {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  // Avoid "-0.00000".
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string format_budget(double value) {
  if (std::isfinite(value) && value == std::floor(value) && std::abs(value) < 1e15)
    return format_fixed(value, 1);
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string budget_line(double remaining) {
  return "You have " + format_budget(remaining) + " units of budget left.";
}

}  // namespace madphys::protocol
