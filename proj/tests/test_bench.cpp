#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "lotsizing/bench.hpp"
#include "lotsizing/io.hpp"
#include "lotsizing/validate.hpp"

namespace lotsizing {
namespace {

ResultRow row(const std::string& id, const std::string& method, std::optional<double> best,
              std::optional<double> bound = std::nullopt, std::optional<double> rf = std::nullopt) {
  ResultRow r;
  r.instance_id = id;
  r.method = method;
  r.status = best ? "feasible" : "budget-exhausted";
  r.best = best;
  r.bound = bound;
  r.rf_best = rf;
  if (method == "rffo") r.fo_rounds = 2;
  if (best && bound) {
    r.gap_pct = optimality_gap(*best, *bound);
    if (r.gap_pct == 0.0) r.status = "optimal";
  }
  return r;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Grid, Counts) {
  EXPECT_EQ(GridSpec::desk().expand().size(), 120u);
  EXPECT_EQ(GridSpec::full().expand().size(), 360u);
  GridSpec g;
  g.retailers = {2};
  g.warehouses = {1, 3};
  g.horizons = {4};
  g.plant_capacity_factors = {kInfinity};
  g.replicates = 2;
  g.seed_base = 10;
  const auto specs = g.expand();
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[0].seed, 10u);
  EXPECT_EQ(specs[1].seed, 11u);
}

TEST(Grid, TinyInstancesAreSmallAndFeasible) {
  const auto tiny = tiny_instances(12, 1);
  ASSERT_EQ(tiny.size(), 12u);
  for (const Instance& inst : tiny) {
    EXPECT_LE(inst.network.num_facilities() * inst.horizon, kMaxEnumerationCells);
    EXPECT_TRUE(exact_optimum_enumerate(inst).solution);
  }
}

TEST(Csv, RoundTrip) {
  std::vector<ResultRow> rows{row("a", "rffo", 1.0 / 3.0, std::nullopt, 0.5),
                              row("b", "mip-es", 10, 9.5), row("c", "mip-std", std::nullopt)};
  rows[0].elapsed_s = 0.1;
  const std::string text = to_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kResultsHeader);
  EXPECT_EQ(parse_csv(text), rows);
  EXPECT_THROW(parse_csv("bad,header\n"), ParseError);
  EXPECT_THROW(parse_csv(std::string(kResultsHeader) + "\nx,rffo\n"), ParseError);
}

TEST(Csv, NumberFormatRoundTrips) {
  for (double v : {0.1, 1e-17, 123456789.125, 2.0 / 3.0}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

TEST(Methods, Names) {
  EXPECT_EQ(parse_method("mip-es"), Method::kMipEchelon);
  EXPECT_STREQ(to_string(Method::kMipStandard), "mip-std");
  EXPECT_THROW(parse_method("cplex"), std::invalid_argument);
}

ExperimentConfig tiny_config(std::vector<Instance> instances) {
  ExperimentConfig c;
  c.instances = std::move(instances);
  c.budget_seconds = 2;
  c.work_units_per_second = kDefaultWorkRate;
  return c;
}

TEST(RunBenchmark, RowsAndFiles) {
  Instance other = testing::tiny1();
  other.meta.id = "tiny1b";
  other.demand(0, 0) = 7;
  ExperimentConfig c = tiny_config({testing::tiny1(), other});
  const auto dir = std::filesystem::temp_directory_path() / "lsp_bench_rows";
  std::filesystem::remove_all(dir);
  c.output_dir = dir;
  const auto rows = run_benchmark(c);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].method, "rffo");
  EXPECT_NEAR(*rows[0].best, 120.5, 1e-6);
  EXPECT_NEAR(*rows[1].best, 120.5, 1e-6);
  EXPECT_EQ(rows[1].status, "optimal");
  EXPECT_EQ(parse_csv(read_file(dir / "results.csv")), rows);
  EXPECT_TRUE(std::filesystem::exists(dir / "config.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "reports" / "tiny1.json"));
  std::filesystem::remove_all(dir);
}

TEST(RunBenchmark, InterruptedBatchKeepsCompletedRows) {
  ExperimentConfig c = tiny_config({testing::tiny1(), testing::tiny1()});
  const auto dir = std::filesystem::temp_directory_path() / "lsp_bench_stop";
  std::filesystem::remove_all(dir);
  c.output_dir = dir;
  int seen = 0;
  EXPECT_THROW(run_benchmark(c,
                             [&](const ResultRow&) {
                               if (++seen == 3) throw std::runtime_error("stop");
                             }),
               std::runtime_error);
  EXPECT_EQ(parse_csv(read_file(dir / "results.csv")).size(), 3u);
  std::filesystem::remove_all(dir);
}

TEST(RunBenchmark, ValidatesConfig) {
  ExperimentConfig c = tiny_config({testing::tiny1()});
  c.budget_seconds = 0;
  EXPECT_THROW(run_benchmark(c), std::invalid_argument);
  c = tiny_config({testing::tiny1()});
  c.methods.clear();
  EXPECT_THROW(run_benchmark(c), std::invalid_argument);
}

TEST(RunOne, InfeasibleInstance) {
  Instance inst = testing::tiny1();
  inst.plant_capacity = {5, 5};
  const ExperimentConfig c = tiny_config({inst});
  const ResultRow r = run_one(inst, Method::kRffo, c);
  EXPECT_FALSE(r.best);
  EXPECT_NE(r.status, "feasible");
  const ResultRow m = run_one(inst, Method::kMipEchelon, c);
  EXPECT_EQ(m.status, "infeasible");
}

TEST(Summary, Example) {
  const std::vector<ResultRow> rows{row("i1", "rffo", 100, std::nullopt, 110),
                                    row("i1", "mip-es", 105, 95),
                                    row("i2", "rffo", 50, std::nullopt, 50),
                                    row("i2", "mip-es", 50, 50)};
  const Summary s = emit_summary(rows, "all");
  ASSERT_EQ(s.rows.size(), 1u);
  const SummaryRow& r = s.rows[0];
  EXPECT_EQ(r.n_inst, 2);
  EXPECT_NEAR(r.ref_best, 77.5, 1e-9);
  EXPECT_EQ(r.ref_opt, 1);
  EXPECT_NEAR(r.rf_best, 80, 1e-9);
  EXPECT_NEAR(r.rffo_best, 75, 1e-9);
  EXPECT_NEAR(r.rffo_gap, 2.5, 1e-9);
  EXPECT_NEAR(r.impr_fo_rf, (100.0 / 11.0) / 2, 1e-9);
  EXPECT_NEAR(r.impr_rffo_ref, (500.0 / 105.0) / 2, 1e-9);
  EXPECT_EQ(r.n_le, 2);
  EXPECT_EQ(r.n_lt, 1);
  EXPECT_NEAR(r.fo_rounds, 2, 1e-9);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(Summary, MissingPairsWarn) {
  const std::vector<ResultRow> rows{row("i1", "rffo", 100), row("i1", "mip-es", std::nullopt)};
  const Summary s = emit_summary(rows, "all");
  EXPECT_EQ(s.rows[0].n_inst, 0);
  EXPECT_TRUE(std::isnan(s.rows[0].rffo_best));
  EXPECT_FALSE(s.warnings.empty());
  EXPECT_THROW(emit_summary(rows, "colour"), std::invalid_argument);
}

TEST(Summary, GroupByCapacity) {
  GenSpec a;
  a.num_retailers = 10;
  a.num_warehouses = 2;
  a.horizon = 6;
  a.plant_capacity_factor = 2.0;
  a.seed = 1;
  GenSpec b = a;
  b.plant_capacity_factor = 1.5;
  const std::string ia = a.instance_id(), ib = b.instance_id();
  const std::vector<ResultRow> rows{row(ia, "rffo", 10), row(ia, "mip-es", 10, 10),
                                    row(ib, "rffo", 20), row(ib, "mip-es", 21, 19)};
  const Summary s = emit_summary(rows, "C");
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_EQ(s.rows[0].value, "1.50");
  EXPECT_EQ(s.rows[1].value, "2.00");
  EXPECT_NEAR(s.rows[0].rffo_best, 20, 1e-9);
  const std::string csv = summary_to_csv(s);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Summary, RegroupFromCsvIsIdentical) {
  const std::vector<ResultRow> rows{row("i1", "rffo", 1.0 / 3.0, std::nullopt, 0.7),
                                    row("i1", "mip-es", 0.4, 0.3)};
  const std::string direct = summary_to_csv(emit_summary(rows, "all"));
  const std::string again = summary_to_csv(emit_summary(parse_csv(to_csv(rows)), "all"));
  EXPECT_EQ(direct, again);
}

TEST(Quantile, TypeSeven) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.3), 7);
  EXPECT_THROW(quantile({}, 0.5), std::invalid_argument);
  const BoxStats b = box_stats("x", {4, 1, 3, 2});
  EXPECT_EQ(b.min, 1);
  EXPECT_EQ(b.max, 4);
  EXPECT_DOUBLE_EQ(b.median, 2.5);
  EXPECT_EQ(b.values, (std::vector<double>{4, 1, 3, 2}));
}

TEST(Deviation, AgainstUncapacitatedTwin) {
  GenSpec u;
  u.num_retailers = 10;
  u.num_warehouses = 2;
  u.horizon = 6;
  u.seed = 4;
  GenSpec c = u;
  c.plant_capacity_factor = 1.5;
  GenSpec d = u;
  d.plant_capacity_factor = 2.0;
  EXPECT_EQ(uncapacitated_id(c.instance_id()), u.instance_id());
  EXPECT_EQ(uncapacitated_id("tiny1"), "tiny1");
  const std::vector<ResultRow> base{row(u.instance_id(), "rffo", 100)};
  const std::vector<ResultRow> res{row(c.instance_id(), "rffo", 196),
                                   row(d.instance_id(), "rffo", 99),
                                   row("lonely", "rffo", 5)};
  const DeviationData dd = emit_deviation_data(res, base);
  ASSERT_EQ(dd.records.size(), 2u);
  EXPECT_NEAR(dd.records[0].deviation, 96, 1e-9);
  EXPECT_NEAR(dd.records[1].deviation, -1, 1e-9);
  EXPECT_EQ(dd.unmatched, std::vector<std::string>{"lonely"});
  ASSERT_EQ(dd.boxes.size(), 2u);
  const auto j = nlohmann::json::parse(deviation_to_json(dd));
  EXPECT_EQ(j["boxes"].size(), 2u);
  EXPECT_EQ(j["records"][0]["baseline_id"], u.instance_id());
}

}  // namespace
}  // namespace lotsizing
