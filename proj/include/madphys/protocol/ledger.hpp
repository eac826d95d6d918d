#pragma once

#include <string>
#include <vector>

namespace madphys::protocol {

struct LedgerEntry {
  double time = 0.0;
  std::string selection;
  double cost = 0.0;
};

/// Budget accounting for one measurement phase (or one quantum trial).
class BudgetLedger {
 public:
  explicit BudgetLedger(double total);

  double total() const noexcept { return total_; }
  double spent() const noexcept { return spent_; }
  double remaining() const noexcept { return total_ - spent_; }
  bool can_afford(double cost) const noexcept { return spent_ + cost <= total_; }
  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }

  /// Records the charge or throws InsufficientBudget, leaving the ledger
  /// untouched. Throws ArgumentError when cost <= 0.
  void charge(double cost, double time = 0.0, std::string selection = {});

 private:
  double total_;
  double spent_ = 0.0;
  std::vector<LedgerEntry> entries_;
};

}  // namespace madphys::protocol
