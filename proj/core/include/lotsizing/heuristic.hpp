// Relax-and-fix construction, fix-and-optimize improvement with growing
// neighborhoods, and the hybrid of the two (RFFO).
//
// Periods in this API are 0-based; reports print them 1-based.

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lotsizing/formulation.hpp"
#include "lotsizing/instance.hpp"
#include "lotsizing/mip/branch_and_bound.hpp"

namespace lotsizing {

enum class RfStrategy { kS1, kS2 };

const char* to_string(RfStrategy strategy);
RfStrategy parse_rf_strategy(const std::string& text);

// Work units per virtual second used by the tools unless told otherwise;
// slow enough that a virtual second takes at most about a wall second for
// desk-scale models on a single core.
inline constexpr double kDefaultWorkRate = 12500.0;

struct HeuristicParams {
  int rf_window = 5;
  int rf_fix = 3;
  double rf_budget_seconds = 60.0;
  int fo_window_min = 5;
  int fo_fix_min = 3;
  int fo_window_step = 0;
  int fo_fix_step = 1;
  int fo_min_rounds = 2;
  double total_budget_seconds = 600.0;
  RfStrategy rf_strategy = RfStrategy::kS1;
  FormulationKind formulation = FormulationKind::kEchelon;
  // > 0: budgets are measured in solver work units at this rate instead of
  // wall-clock seconds, which makes runs reproducible. Wall-clock stays a
  // hard cap.
  double work_units_per_second = 0.0;

  // Defaults with total budget `maxt` and the construction budget
  // ceil(0.1 * maxt).
  static HeuristicParams for_budget(double maxt);

  // Throws std::invalid_argument.
  void validate() const;
};

// Elapsed time in budget units: virtual seconds (work / rate) in
// deterministic mode, wall seconds otherwise.
class WorkClock {
 public:
  explicit WorkClock(double units_per_second = 0.0);

  bool deterministic() const { return rate_ > 0.0; }
  double elapsed() const;
  double wall_elapsed() const;
  void charge(std::int64_t units) { work_ += units; }
  std::int64_t work() const { return work_; }

  // Wall-clock seconds after which every limit() is cut short.
  void set_wall_cap(double seconds) { wall_cap_ = seconds; }

  // Sets the time and work limits of `control` for a budget of `seconds`.
  void limit(mip::SolveControl& control, double seconds) const;

 private:
  double rate_;
  std::int64_t work_ = 0;
  std::chrono::steady_clock::time_point start_;
  double wall_cap_ = kInfinity;
};

struct SubproblemRecord {
  std::string stage;  // "rf" | "fo"
  int round = 0;
  int first = 0;
  int last = 0;
  double budget = 0.0;
  std::string status;
  std::optional<double> objective;
  std::optional<double> best;  // best known cost after the solve
  double elapsed = 0.0;        // stage clock after the solve
  std::int64_t nodes = 0;
};

struct RunReport {
  std::string instance_id;
  double rf_cost = 0.0;
  double final_cost = 0.0;
  double rf_seconds = 0.0;
  double fo_seconds = 0.0;
  double rf_wall_seconds = 0.0;
  double fo_wall_seconds = 0.0;
  int fo_rounds = 0;
  std::int64_t work_units = 0;
  // Best cost after every fix-and-optimize subproblem.
  std::vector<double> fo_trajectory;
  std::vector<SubproblemRecord> subproblem_log;
};

std::string run_report_to_json(const RunReport& report, const HeuristicParams& params);

class ConstructionFailure : public std::runtime_error {
 public:
  ConstructionFailure(const std::string& what, int first, int last)
      : std::runtime_error(what), first(first), last(last) {}
  int first;
  int last;
};

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plan that sets up everywhere: retailers and warehouses order exactly their
// demand, the plant produces as late as its capacity allows. Empty when the
// plant capacity cannot cover the demand, i.e. the instance is infeasible.
std::optional<Solution> all_setups_plan(const Instance& instance);

// Window [alpha, beta] keeps integrality, setups in earlier periods keep it
// too unless fixed, later setups are relaxed.
mip::SolveControl build_rf_subproblem(const mip::MipModel& model,
                                      const std::map<mip::VarKey, int>& fixings, int alpha,
                                      int beta, double budget_seconds);

struct RfResult {
  Solution solution;
  std::vector<double> assignment;
  double elapsed = 0.0;
  int subproblems = 0;
};

// Throws ConstructionFailure if a subproblem is infeasible and
// BudgetExhausted if one ends without a solution.
RfResult relax_and_fix(const Instance& instance, const mip::MipModel& model,
                       const HeuristicParams& params, WorkClock& clock,
                       RunReport* report = nullptr);

// Setups outside [alpha, beta] fixed to `incumbent`, warm-started there.
mip::SolveControl build_fo_subproblem(const mip::MipModel& model,
                                      std::span<const double> incumbent, int alpha, int beta,
                                      double budget_seconds);

struct FoResult {
  Solution solution;
  std::vector<double> assignment;
  double elapsed = 0.0;
  int rounds = 0;
};

// `start` must be a feasible model assignment.
FoResult fix_and_optimize(const Instance& instance, const mip::MipModel& model,
                          std::span<const double> start, const HeuristicParams& params,
                          double budget_seconds, WorkClock& clock, RunReport* report = nullptr);

struct HybridResult {
  Solution solution;
  Solution rf_solution;
  RunReport report;
};

HybridResult hybrid(const Instance& instance, const HeuristicParams& params);

}  // namespace lotsizing
