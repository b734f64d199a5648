// Plan feasibility checking, a brute-force optimum for tiny instances and the
// scalar metrics used in reports.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lotsizing/instance.hpp"

namespace lotsizing {

enum class ConstraintFamily {
  kBalance,
  kSetupLink,
  kPlantCapacity,
  kStorageCapacity,
  kNonnegativity,
  kBinarity,
};

const char* to_string(ConstraintFamily family);

struct Violation {
  ConstraintFamily family = ConstraintFamily::kBalance;
  int facility = 0;
  int period = 0;  // 0-based
  double residual = 0.0;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;

  bool has(ConstraintFamily family) const;
};

// Throws std::invalid_argument if the plan dimensions do not match.
FeasibilityReport check_feasibility(const Instance& instance, const Solution& solution,
                                    double tolerance = kTolerance);

std::string report_to_json(const FeasibilityReport& report);

inline constexpr int kMaxEnumerationCells = 16;

class EnumerationTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EnumerationResult {
  std::optional<Solution> solution;  // empty when infeasible
  std::int64_t patterns = 0;         // setup patterns examined by LP
};

// Tries every setup pattern with the flows re-optimized by LP. Requires
// |F|*|T| <= kMaxEnumerationCells.
EnumerationResult exact_optimum_enumerate(const Instance& instance);

// 100 (best - bound) / best, clamped at 0. Throws std::domain_error if best <= 0.
double optimality_gap(double best, double bound);

// 100 (reference - candidate) / reference. Throws std::domain_error if reference <= 0.
double improvement(double reference, double candidate);

// 100 (best - baseline) / baseline. Throws std::domain_error if baseline <= 0.
double deviation(double best, double baseline);

}  // namespace lotsizing
