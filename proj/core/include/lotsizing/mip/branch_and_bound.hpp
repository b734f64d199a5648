// Solver contract used by the heuristics, with the bundled reference
// implementation: LP relaxation via the bounded simplex and branch-and-bound
// over the binaries that keep integrality.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lotsizing/mip/lp_solver.hpp"
#include "lotsizing/mip/model.hpp"

namespace lotsizing::mip {

// Inclusive 0-based period range.
struct PeriodWindow {
  int first = 0;
  int last = 0;
};

struct SolveControl {
  // Binary variables pinned to 0 or 1.
  std::map<VarKey, int> fixings;
  // Binaries with a period inside the window keep integrality; the other
  // unfixed binaries are relaxed to [0,1]. No window: all binaries integral.
  std::optional<PeriodWindow> integer_window;
  // Model-space values; seeds the incumbent when feasible under the fixings.
  std::optional<std::vector<double>> warm_start;
  // Starting basis for the root LP.
  std::optional<Basis> start_basis;
  double time_limit_seconds = kInfinity;
  // Cap on work units over the whole solve; < 0 means unlimited. Each
  // simplex iteration costs 1 + rows/500 units, each LP solve one more, and
  // branch-and-bound adds 1 + rows/250 for its setup.
  std::int64_t work_limit = -1;
  double gap_tolerance = 1e-6;
};

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kUnbounded, kNoSolution, kNumericFailure };

const char* to_string(SolveStatus status);

struct Incumbent {
  std::vector<double> values;
  double objective = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kNoSolution;
  std::optional<Incumbent> incumbent;
  double dual_bound = -kInfinity;
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;
  std::int64_t work_units = 0;
  double seconds = 0.0;
  // Optimal basis of the root relaxation, when it was solved.
  std::optional<Basis> root_basis;
};

// Continuous relaxation: every binary in [0,1] unless fixed.
SolveResult solve_lp(const MipModel& model, const SolveControl& control);

SolveResult solve_mip(const MipModel& model, const SolveControl& control);

// Canonical JSON text of everything except timing, so identical solves give
// identical strings.
std::string serialize(const SolveResult& result);

}  // namespace lotsizing::mip
