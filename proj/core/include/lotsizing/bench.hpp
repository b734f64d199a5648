// Batch experiments: instance grids, the results CSV, summary tables and
// boxplot data.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lotsizing/heuristic.hpp"
#include "lotsizing/instgen.hpp"

namespace lotsizing {

enum class Method { kRffo, kMipEchelon, kMipStandard };

const char* to_string(Method method);
Method parse_method(const std::string& text);

struct StorageConfig {
  StorageSite site = StorageSite::kNone;
  double factor = kInfinity;
};

struct GridSpec {
  std::vector<int> retailers;
  std::vector<int> warehouses;
  std::vector<int> horizons;
  std::vector<Balance> balances{Balance::kBalanced};
  std::vector<double> plant_capacity_factors;
  std::vector<StorageConfig> storage{StorageConfig{}};
  int replicates = 1;
  std::uint64_t seed_base = 1;

  // Cartesian product, replicate r seeded with seed_base + r. Combinations
  // with |W| > |R| are skipped.
  std::vector<GenSpec> expand() const;

  static GridSpec desk();
  static GridSpec full();
};

// `count` small feasible instances (|F| <= 4, |T| <= 3) cycling through
// plant and storage capacity configurations; seeds that give an infeasible
// instance are skipped.
std::vector<Instance> tiny_instances(int count, std::uint64_t seed_base);

struct ExperimentConfig {
  std::vector<Instance> instances;
  std::vector<Method> methods{Method::kRffo, Method::kMipEchelon};
  double budget_seconds = 10.0;
  // Heuristic parameters apart from the budgets, which follow
  // budget_seconds.
  HeuristicParams params;
  // > 0: budgets and elapsed_s in deterministic work-clock seconds.
  double work_units_per_second = 0.0;
  // Empty: nothing written to disk.
  std::filesystem::path output_dir;

  void validate() const;
};

struct ResultRow {
  std::string instance_id;
  std::string method;
  std::string status;
  std::optional<double> best;
  std::optional<double> bound;
  std::optional<double> gap_pct;
  double elapsed_s = 0.0;
  std::optional<double> rf_best;
  std::optional<int> fo_rounds;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr const char* kResultsHeader =
    "instance_id,method,status,best,bound,gap_pct,elapsed_s,rf_best,fo_rounds";

std::string format_number(double value);
std::string to_csv_line(const ResultRow& row);
std::string to_csv(const std::vector<ResultRow>& rows);
// Throws ParseError on a wrong header or malformed line.
std::vector<ResultRow> parse_csv(const std::string& text);

// One solve of `method` on `instance`; failures come back as rows with a
// failure status. `report` receives the heuristic run report for rffo.
ResultRow run_one(const Instance& instance, Method method, const ExperimentConfig& config,
                  RunReport* report = nullptr);

// Runs every (instance, method) pair in order. With an output directory,
// writes config.json, appends each row to results.csv as soon as it is
// done and stores heuristic run reports under reports/.
std::vector<ResultRow> run_benchmark(const ExperimentConfig& config,
                                     const std::function<void(const ResultRow&)>& on_row = {});

struct SummaryRow {
  std::string param;
  std::string value;
  int n_inst = 0;
  double ref_best = 0.0;
  double ref_gap = 0.0;
  int ref_opt = 0;
  double rf_best = 0.0;
  double rffo_best = 0.0;
  double rffo_gap = 0.0;
  double impr_fo_rf = 0.0;
  double impr_rffo_ref = 0.0;
  int n_le = 0;
  int n_lt = 0;
  double fo_rounds = 0.0;
};

struct Summary {
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;
};

// Group keys: all, R, W, T, balance, C, Cs, site. Instances are grouped by
// the fields of their generated id; ids in another format only join "all".
// Averages run over instances that have a solution from both rffo and the
// reference method; others are skipped with a warning.
Summary emit_summary(const std::vector<ResultRow>& rows, const std::string& group_by,
                     Method reference = Method::kMipEchelon);
std::string summary_to_csv(const Summary& summary);

struct BoxStats {
  std::string config;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::vector<double> values;
};

// Linear interpolation between order statistics (R type 7); `sorted` must be
// ascending and nonempty.
double quantile(const std::vector<double>& sorted, double p);
BoxStats box_stats(std::string config, std::vector<double> values);

struct DeviationRecord {
  std::string instance_id;
  std::string baseline_id;
  std::string config;
  double deviation = 0.0;
};

struct DeviationData {
  std::vector<DeviationRecord> records;
  std::vector<BoxStats> boxes;  // one per capacity configuration
  std::vector<std::string> unmatched;
};

// Id of the same generated instance without plant or storage capacities;
// other ids map to themselves.
std::string uncapacitated_id(const std::string& id);

// Deviation of each `method` row against the baseline row of its
// uncapacitated twin (or of the same id). Rows without a solution count
// as unmatched.
DeviationData emit_deviation_data(const std::vector<ResultRow>& results,
                                  const std::vector<ResultRow>& baseline,
                                  Method method = Method::kRffo);
std::string deviation_to_json(const DeviationData& data);

}  // namespace lotsizing
