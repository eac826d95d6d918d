#pragma once

#include <string>

namespace madphys::protocol {

/// Fixed-point rendering, e.g. format_fixed(-8.808123, 5) == "-8.80812".
std::string format_fixed(double value, int decimals);

/// Budget rendering: integral values keep one decimal ("170.0"), others use
/// the shortest round-trip form.
std::string format_budget(double value);

/// "You have 170.0 units of budget left."
std::string budget_line(double remaining);

}  // namespace madphys::protocol
