#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "json.hpp"
#include "lotsizing/formulation.hpp"
#include "lotsizing/heuristic.hpp"
#include "lotsizing/instgen.hpp"
#include "lotsizing/validate.hpp"

namespace lotsizing {
namespace {

using mip::VarKey;
using mip::VarRole;

Instance desk_instance(int horizon, double c = 1.5, std::uint64_t seed = 3) {
  GenSpec spec;
  spec.num_retailers = 6;
  spec.num_warehouses = 2;
  spec.horizon = horizon;
  spec.plant_capacity_factor = c;
  spec.seed = seed;
  return generate(spec);
}

HeuristicParams det_params(double maxt) {
  HeuristicParams p = HeuristicParams::for_budget(maxt);
  p.work_units_per_second = kDefaultWorkRate;
  return p;
}

TEST(Params, ForBudget) {
  const HeuristicParams p = HeuristicParams::for_budget(30);
  EXPECT_EQ(p.total_budget_seconds, 30);
  EXPECT_EQ(p.rf_budget_seconds, 3);
  EXPECT_EQ(HeuristicParams::for_budget(600).rf_budget_seconds, 60);
}

TEST(Params, Validation) {
  HeuristicParams p;
  EXPECT_NO_THROW(p.validate());
  p.rf_fix = 6;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = HeuristicParams{};
  p.rf_window = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = HeuristicParams{};
  p.total_budget_seconds = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = HeuristicParams{};
  p.fo_min_rounds = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Params, StrategyNames) {
  EXPECT_EQ(parse_rf_strategy("S2"), RfStrategy::kS2);
  EXPECT_STREQ(to_string(RfStrategy::kS1), "S1");
  EXPECT_THROW(parse_rf_strategy("S3"), std::invalid_argument);
}

TEST(AllSetupsPlan, FeasibleAndRespectsCapacity) {
  const Instance inst = desk_instance(6);
  const auto plan = all_setups_plan(inst);
  ASSERT_TRUE(plan);
  EXPECT_TRUE(check_feasibility(inst, *plan).feasible);
}

TEST(AllSetupsPlan, EmptyWhenCapacityTooSmall) {
  Instance inst = testing::tiny1();
  inst.plant_capacity = {5, 5};
  EXPECT_FALSE(all_setups_plan(inst));
}

TEST(RfSubproblem, WindowAndFixings) {
  const mip::MipModel model = build_model(testing::tiny1(), FormulationKind::kEchelon);
  std::map<VarKey, int> fix{{VarKey{VarRole::kSetup, 0, 0}, 1}};
  const mip::SolveControl c = build_rf_subproblem(model, fix, 1, 1, 2.0);
  ASSERT_TRUE(c.integer_window);
  EXPECT_EQ(c.integer_window->first, 0);
  EXPECT_EQ(c.integer_window->last, 1);
  EXPECT_EQ(c.fixings, fix);
  EXPECT_EQ(c.time_limit_seconds, 2.0);
  EXPECT_THROW(build_rf_subproblem(model, {}, 2, 1, 1.0), std::invalid_argument);
}

TEST(RelaxAndFix, FullWindowIsOneSolve) {
  const Instance inst = testing::tiny1();
  const mip::MipModel model = build_model(inst, FormulationKind::kEchelon);
  HeuristicParams p = det_params(30);
  p.rf_window = 2;
  p.rf_fix = 2;
  WorkClock clock(p.work_units_per_second);
  const RfResult r = relax_and_fix(inst, model, p, clock);
  EXPECT_EQ(r.subproblems, 1);
  EXPECT_NEAR(r.solution.objective, 120.5, 1e-6);
}

TEST(RelaxAndFix, Tiny1SlidingS1) {
  const Instance inst = testing::tiny1();
  const mip::MipModel model = build_model(inst, FormulationKind::kEchelon);
  HeuristicParams p = det_params(30);
  p.rf_window = 2;
  p.rf_fix = 1;
  WorkClock clock(p.work_units_per_second);
  const RfResult r = relax_and_fix(inst, model, p, clock);
  EXPECT_GE(r.solution.objective, 120.5 - 1e-6);
  EXPECT_TRUE(check_feasibility(inst, r.solution).feasible);
}

TEST(RelaxAndFix, FifteenPeriodsFiveSubproblems) {
  const Instance inst = desk_instance(15);
  const mip::MipModel model = build_model(inst, FormulationKind::kEchelon);
  HeuristicParams p = det_params(50);
  WorkClock clock(p.work_units_per_second);
  RunReport report;
  const RfResult r = relax_and_fix(inst, model, p, clock, &report);
  EXPECT_EQ(r.subproblems, 5);
  ASSERT_EQ(report.subproblem_log.size(), 5u);
  EXPECT_NEAR(report.subproblem_log[0].budget, p.rf_budget_seconds / 5, 1e-12);
  EXPECT_EQ(report.subproblem_log[0].first, 0);
  EXPECT_EQ(report.subproblem_log[0].last, 4);
  EXPECT_EQ(report.subproblem_log[4].first, 12);
  EXPECT_EQ(report.subproblem_log[4].last, 14);
  EXPECT_TRUE(check_feasibility(inst, r.solution).feasible);
  EXPECT_LE(r.elapsed, p.rf_budget_seconds + 0.05);
}

TEST(RelaxAndFix, S2Feasible) {
  const Instance inst = desk_instance(15);
  const mip::MipModel model = build_model(inst, FormulationKind::kStandard);
  HeuristicParams p = det_params(20);
  p.rf_strategy = RfStrategy::kS2;
  p.formulation = FormulationKind::kStandard;
  WorkClock clock(p.work_units_per_second);
  const RfResult r = relax_and_fix(inst, model, p, clock);
  EXPECT_TRUE(check_feasibility(inst, r.solution).feasible);
}

TEST(RelaxAndFix, ClosedPlantFails) {
  // Plant setups pinned off through a zero capacity.
  Instance inst = testing::tiny1();
  inst.plant_capacity = {0, 0};
  const mip::MipModel model = build_model(inst, FormulationKind::kEchelon);
  HeuristicParams p = det_params(10);
  p.rf_window = 1;
  p.rf_fix = 1;
  WorkClock clock(p.work_units_per_second);
  EXPECT_THROW(relax_and_fix(inst, model, p, clock), ConstructionFailure);
}

TEST(FoSubproblem, FixesOutsideWindow) {
  const Instance inst = testing::tiny1();
  const mip::MipModel model = build_model(inst, FormulationKind::kEchelon);
  const std::vector<double> a = to_assignment(inst, model, testing::tiny1_optimum());
  const mip::SolveControl c = build_fo_subproblem(model, a, 1, 1, 1.0);
  EXPECT_EQ(c.fixings.size(), 4u);
  for (const auto& [key, v] : c.fixings) EXPECT_EQ(key.period, 0);
  EXPECT_EQ(c.fixings.at(VarKey{VarRole::kSetup, 0, 0}), 1);
  EXPECT_EQ(c.fixings.at(VarKey{VarRole::kSetup, 3, 0}), 0);
  ASSERT_TRUE(c.integer_window);
  EXPECT_EQ(c.integer_window->first, 1);
  ASSERT_TRUE(c.warm_start);
  EXPECT_EQ(*c.warm_start, a);
  EXPECT_THROW(build_fo_subproblem(model, std::vector<double>(3), 0, 1, 1.0),
               std::invalid_argument);
}

TEST(FixAndOptimize, OptimumStays) {
  const Instance inst = testing::tiny1();
  const mip::MipModel model = build_model(inst, FormulationKind::kEchelon);
  const std::vector<double> a = to_assignment(inst, model, testing::tiny1_optimum());
  HeuristicParams p = det_params(5);
  WorkClock clock(p.work_units_per_second);
  const FoResult r = fix_and_optimize(inst, model, a, p, 5, clock);
  EXPECT_NEAR(r.solution.objective, 120.5, 1e-6);
  EXPECT_LE(r.elapsed, 5 + 0.05);
}

TEST(FixAndOptimize, NoTimeReturnsInput) {
  const Instance inst = desk_instance(6);
  const mip::MipModel model = build_model(inst, FormulationKind::kEchelon);
  const std::vector<double> a = to_assignment(inst, model, *all_setups_plan(inst));
  HeuristicParams p = det_params(5);
  WorkClock clock(p.work_units_per_second);
  const FoResult r = fix_and_optimize(inst, model, a, p, 0.0, clock);
  EXPECT_EQ(r.rounds, 0);
  EXPECT_EQ(r.assignment, a);
}

TEST(FixAndOptimize, FirstRoundWindows) {
  const Instance inst = desk_instance(15);
  const mip::MipModel model = build_model(inst, FormulationKind::kEchelon);
  const std::vector<double> a = to_assignment(inst, model, *all_setups_plan(inst));
  HeuristicParams p = det_params(20);
  WorkClock clock(p.work_units_per_second);
  RunReport report;
  const FoResult r = fix_and_optimize(inst, model, a, p, 20, clock, &report);
  std::vector<std::pair<int, int>> first_round;
  for (const SubproblemRecord& s : report.subproblem_log) {
    if (s.round == 1) first_round.emplace_back(s.first, s.last);
  }
  const std::vector<std::pair<int, int>> want{{0, 4}, {3, 7}, {6, 10}, {9, 13}, {12, 14}};
  EXPECT_EQ(first_round, want);
  EXPECT_TRUE(std::is_sorted(report.fo_trajectory.rbegin(), report.fo_trajectory.rend()));
  EXPECT_LE(r.solution.objective, model.objective_value(a) + 1e-6);
}

TEST(FixAndOptimize, GrowingWindow) {
  const Instance inst = desk_instance(6);
  const mip::MipModel model = build_model(inst, FormulationKind::kEchelon);
  const std::vector<double> a = to_assignment(inst, model, *all_setups_plan(inst));
  HeuristicParams p = det_params(60);
  p.fo_window_min = 2;
  p.fo_fix_min = 1;
  p.fo_window_step = 2;
  WorkClock clock(p.work_units_per_second);
  RunReport report;
  const FoResult r = fix_and_optimize(inst, model, a, p, 60, clock, &report);
  int widest = 0;
  for (const SubproblemRecord& s : report.subproblem_log) widest = std::max(widest, s.last - s.first + 1);
  EXPECT_EQ(widest, 6);
  EXPECT_LT(r.elapsed, 60);
}

TEST(Hybrid, Tiny1Optimum) {
  const HybridResult r = hybrid(testing::tiny1(), det_params(30));
  EXPECT_NEAR(r.solution.objective, 120.5, 1e-6);
  EXPECT_LE(r.solution.objective, r.rf_solution.objective + 1e-9);
}

TEST(Hybrid, ZeroDemand) {
  const Instance inst = Instance::empty(SupplyNetwork(1, {0, 0}), 3);
  const HybridResult r = hybrid(inst, det_params(5));
  EXPECT_EQ(r.solution.objective, 0.0);
}

TEST(Hybrid, DeterministicReport) {
  const Instance inst = desk_instance(15, 1.5, 8);
  const HeuristicParams p = det_params(3);
  const HybridResult a = hybrid(inst, p);
  const HybridResult b = hybrid(inst, p);
  EXPECT_EQ(a.solution.objective, b.solution.objective);
  EXPECT_EQ(a.report.fo_trajectory, b.report.fo_trajectory);
  EXPECT_EQ(a.report.work_units, b.report.work_units);
  EXPECT_TRUE(check_feasibility(inst, a.solution).feasible);
  EXPECT_LE(a.report.rf_seconds + a.report.fo_seconds, 3 + 0.05);
}

TEST(Hybrid, ReportJson) {
  const HybridResult r = hybrid(testing::tiny1(), det_params(2));
  const auto j = nlohmann::json::parse(run_report_to_json(r.report, det_params(2)));
  EXPECT_EQ(j["instance_id"], "tiny1");
  EXPECT_TRUE(j["fo_trajectory"].is_array());
}

}  // namespace
}  // namespace lotsizing
