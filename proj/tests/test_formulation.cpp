#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lotsizing/formulation.hpp"
#include "lotsizing/heuristic.hpp"
#include "lotsizing/instgen.hpp"
#include "lotsizing/mip/branch_and_bound.hpp"
#include "lotsizing/validate.hpp"

namespace lotsizing {
namespace {

using mip::VarKey;
using mip::VarRole;

int count_rows(const mip::MipModel& m, const std::string& prefix) {
  int n = 0;
  for (int r = 0; r < m.num_rows(); ++r) n += m.row_name(r).rfind(prefix, 0) == 0;
  return n;
}

int row_index(const mip::MipModel& m, const std::string& name) {
  for (int r = 0; r < m.num_rows(); ++r) {
    if (m.row_name(r) == name) return r;
  }
  return -1;
}

double coef(const mip::MipModel& m, int row, VarKey key) {
  const int j = *m.find(key);
  for (const mip::Term& t : m.row_terms(row)) {
    if (t.var == j) return t.coef;
  }
  return 0.0;
}

TEST(BuildStandard, Counts) {
  const mip::MipModel m = build_standard(testing::tiny1());
  EXPECT_EQ(m.num_variables(), 24);
  EXPECT_EQ(count_rows(m, "bal_"), 8);
  EXPECT_EQ(count_rows(m, "link_"), 8);
  EXPECT_EQ(m.num_rows(), 16);
  int binaries = 0;
  for (const auto& v : m.variables()) binaries += v.binary;
  EXPECT_EQ(binaries, 8);
}

TEST(BuildStandard, PlantLinkCoefficient) {
  Instance inst = testing::tiny1();
  mip::MipModel m = build_standard(inst);
  EXPECT_EQ(coef(m, row_index(m, "link_0_1"), {VarRole::kSetup, 0, 0}), -20.0);
  inst.plant_capacity = {12.0, 12.0};
  m = build_standard(inst);
  EXPECT_EQ(coef(m, row_index(m, "link_0_1"), {VarRole::kSetup, 0, 0}), -12.0);
  EXPECT_EQ(coef(m, row_index(m, "link_0_2"), {VarRole::kSetup, 0, 1}), -12.0);
  EXPECT_EQ(coef(m, row_index(m, "link_3_1"), {VarRole::kSetup, 3, 0}), -10.0);
}

TEST(BuildStandard, ZeroDemandOptimumIsZero) {
  const Instance inst = Instance::empty(SupplyNetwork(1, {0, 0}), 2);
  for (auto kind : {FormulationKind::kStandard, FormulationKind::kEchelon}) {
    const mip::MipModel m = build_model(inst, kind);
    const auto r = mip::solve_mip(m, {});
    ASSERT_EQ(r.status, mip::SolveStatus::kOptimal);
    EXPECT_EQ(r.incumbent->objective, 0.0);
    for (int j = 0; j < m.num_variables(); ++j) {
      if (m.variable(j).binary) {
        EXPECT_EQ(r.incumbent->values[static_cast<std::size_t>(j)], 0.0);
      }
    }
  }
}

TEST(AddStorageCapacity, BoundIsMinOfCapAndDemandToGo) {
  Instance inst = Instance::empty(SupplyNetwork(1, {0}), 2);
  inst.demand(0, 0) = 10;
  inst.demand(0, 1) = 30;
  inst.storage_capacity(2, 0) = 40;
  inst.storage_capacity(2, 1) = 40;
  const mip::MipModel base = build_standard(inst);
  const mip::MipModel m = add_storage_capacity(base, inst);
  EXPECT_EQ(m.num_rows(), base.num_rows());
  EXPECT_EQ(m.variable(*m.find({VarRole::kStock, 2, 0})).upper, 40.0);
  EXPECT_EQ(m.variable(*m.find({VarRole::kStock, 2, 1})).upper, 30.0);
  EXPECT_EQ(m.variable(*m.find({VarRole::kStock, 1, 0})).upper, kInfinity);
}

TEST(AddStorageCapacity, ZeroCapacityFixesStock) {
  Instance inst = testing::tiny1();
  inst.storage_capacity(1, 0) = 0;
  inst.storage_capacity(1, 1) = 0;
  const mip::MipModel m = add_storage_capacity(build_standard(inst), inst);
  EXPECT_EQ(m.variable(*m.find({VarRole::kStock, 1, 0})).upper, 0.0);
  const auto r = mip::solve_mip(m, {});
  ASSERT_TRUE(r.incumbent);
  const Solution s = extract_solution(inst, m, r.incumbent->values);
  EXPECT_EQ(s.s(1, 0), 0.0);
  EXPECT_GT(s.objective, 120.5);
}

TEST(BuildEchelon, LsRowCount) {
  const mip::MipModel m = build_echelon(testing::tiny1());
  EXPECT_EQ(count_rows(m, "ls_"), 12);
  EXPECT_EQ(count_rows(m, "ebal_"), 8);
  EXPECT_EQ(count_rows(m, "nest_"), 4);
  EXPECT_EQ(m.num_variables(), 24);
}

TEST(BuildEchelon, SinglePeriodLsRow) {
  const mip::MipModel m = build_echelon(testing::tiny1());
  // I_{t-1} + d_t y_t >= d_t for plant, t = 2
  const int r = row_index(m, "ls_0_2_2");
  ASSERT_GE(r, 0);
  EXPECT_EQ(m.row_terms(r).size(), 2u);
  EXPECT_EQ(coef(m, r, {VarRole::kEchelon, 0, 0}), 1.0);
  EXPECT_EQ(coef(m, r, {VarRole::kSetup, 0, 1}), 15.0);
  EXPECT_EQ(m.row_rhs(r), 15.0);
  EXPECT_EQ(m.row_sense(r), mip::RowSense::kGreaterEqual);
}

TEST(BuildEchelon, SameOptimumAsStandardOnTiny1) {
  for (auto kind : {FormulationKind::kStandard, FormulationKind::kEchelon}) {
    const auto r = mip::solve_mip(build_model(testing::tiny1(), kind), {});
    ASSERT_EQ(r.status, mip::SolveStatus::kOptimal);
    EXPECT_NEAR(r.incumbent->objective, 120.5, 1e-6);
  }
}

TEST(ExtractSolution, ZeroEchelonStockGivesZeroStock) {
  const Instance inst = testing::tiny1();
  const mip::MipModel m = build_echelon(inst);
  const Solution plan = *all_setups_plan(inst);
  const Solution s = extract_solution(inst, m, to_assignment(inst, m, plan));
  for (double v : s.s.data()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.x, plan.x);
}

TEST(ExtractSolution, NestingViolationThrows) {
  const Instance inst = testing::tiny1();
  const mip::MipModel m = build_echelon(inst);
  std::vector<double> a = to_assignment(inst, m, testing::tiny1_optimum());
  a[static_cast<std::size_t>(*m.find({VarRole::kEchelon, 2, 0}))] = 30;  // above the warehouse echelon
  EXPECT_THROW(extract_solution(inst, m, a), InfeasibleAssignment);
}

TEST(ExtractSolution, StandardPassThrough) {
  const Instance inst = testing::tiny1();
  const mip::MipModel m = build_standard(inst);
  const Solution opt = testing::tiny1_optimum();
  const Solution s = extract_solution(inst, m, to_assignment(inst, m, opt));
  EXPECT_EQ(s.x, opt.x);
  EXPECT_EQ(s.s, opt.s);
  EXPECT_EQ(s.y, opt.y);
  EXPECT_NEAR(s.objective, 120.5, 1e-9);
}

TEST(ExtractSolution, RejectsFractionalSetup) {
  const Instance inst = testing::tiny1();
  const mip::MipModel m = build_standard(inst);
  std::vector<double> a = to_assignment(inst, m, testing::tiny1_optimum());
  a[static_cast<std::size_t>(*m.find({VarRole::kSetup, 3, 1}))] = 0.5;
  EXPECT_THROW(extract_solution(inst, m, a), InfeasibleAssignment);
}

TEST(ExtractSolution, SolverPlansPassFeasibilityCheck) {
  GenSpec spec;
  spec.num_retailers = 3;
  spec.num_warehouses = 2;
  spec.horizon = 3;
  spec.plant_capacity_factor = 1.5;
  spec.storage_site = StorageSite::kRetailers;
  spec.storage_capacity_factor = 1.5;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    spec.seed = seed;
    const Instance inst = generate(spec);
    for (auto kind : {FormulationKind::kStandard, FormulationKind::kEchelon}) {
      const mip::MipModel m = build_model(inst, kind);
      const auto r = mip::solve_mip(m, {});
      if (!r.incumbent) continue;
      const Solution s = extract_solution(inst, m, r.incumbent->values);
      EXPECT_TRUE(check_feasibility(inst, s).feasible) << inst.meta.id << " " << to_string(kind);
    }
  }
}

TEST(Formulation, LpBoundOrdering) {
  GenSpec spec;
  spec.num_retailers = 4;
  spec.num_warehouses = 2;
  spec.horizon = 4;
  spec.plant_capacity_factor = 1.75;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    spec.seed = seed;
    const Instance inst = generate(spec);
    const auto std_lp = mip::solve_lp(build_model(inst, FormulationKind::kStandard), {});
    const auto es_lp = mip::solve_lp(build_model(inst, FormulationKind::kEchelon), {});
    ASSERT_TRUE(std_lp.incumbent && es_lp.incumbent);
    EXPECT_GE(es_lp.incumbent->objective, std_lp.incumbent->objective - 1e-6);
  }
}

TEST(Formulation, ParseNames) {
  EXPECT_EQ(parse_formulation("std"), FormulationKind::kStandard);
  EXPECT_EQ(parse_formulation("echelon"), FormulationKind::kEchelon);
  EXPECT_THROW(parse_formulation("other"), std::invalid_argument);
}

}  // namespace
}  // namespace lotsizing
