#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtcode {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

// Validation tolerance for probability inputs; comparisons downstream use
// the looser kCompareTol so validation noise cannot cascade into test
// failures.
inline constexpr double kValidateTol = 1e-12;
inline constexpr double kCompareTol = 1e-9;

// Thrown when an enumeration would exceed the configured candidate budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for malformed problem instances or mismatched policy dimensions.
class SpecError : public std::invalid_argument {
 public:
  explicit SpecError(const std::string& what) : std::invalid_argument(what) {}
};

inline void check_probability_vector(const Vec& p, const std::string& what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw SpecError(what + ": negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > kValidateTol)
    throw SpecError(what + ": row sum " + std::to_string(total) + " != 1");
}

}  // namespace rtcode
