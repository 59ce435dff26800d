#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace xxz {

// Invalid input: bad sector, out-of-range parameter, size refusal.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure failed to meet its contract.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, std::vector<double> best = {})
      : std::runtime_error(what), best_values_(std::move(best)) {}

  // Best available estimates at the point of failure (e.g. Ritz values).
  const std::vector<double>& best_values() const { return best_values_; }

 private:
  std::vector<double> best_values_;
};

}  // namespace xxz
