#include "madphys/protocol/ledger.hpp"

#include <cmath>

#include "madphys/core/error.hpp"

namespace madphys::protocol {

BudgetLedger::BudgetLedger(double total) : total_(total) {
  if (!(total >= 0.0) || !std::isfinite(total)) throw ConfigError("BudgetLedger: invalid total");
}

void BudgetLedger::charge(double cost, double time, std::string selection) {
  if (!(cost > 0.0) || !std::isfinite(cost)) throw ArgumentError("charge: cost must be positive");
  if (!can_afford(cost)) throw InsufficientBudget(cost, remaining());
  spent_ += cost;
  entries_.push_back({time, std::move(selection), cost});
}

}  // namespace madphys::protocol
