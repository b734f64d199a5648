// lsp: generate instances, solve, validate, run batches and build reports.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lotsizing/bench.hpp"
#include "lotsizing/formulation.hpp"
#include "lotsizing/heuristic.hpp"
#include "lotsizing/instgen.hpp"
#include "lotsizing/io.hpp"
#include "lotsizing/mip/lp_writer.hpp"
#include "lotsizing/validate.hpp"

using namespace lotsizing;
using nlohmann::ordered_json;

namespace {

double parse_factor(const std::string& text) {
  if (text == "inf" || text == "none" || text == "unbounded") return kInfinity;
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad factor '" + text + "'");
  return v;
}

// "none", "w1.5" or "r2.0".
StorageConfig parse_storage(const std::string& text) {
  if (text == "none") return {};
  if (text.size() < 2 || (text[0] != 'w' && text[0] != 'r')) {
    throw std::invalid_argument("bad storage config '" + text + "' (want none, wF or rF)");
  }
  return {text[0] == 'w' ? StorageSite::kWarehouses : StorageSite::kRetailers,
          parse_factor(text.substr(1))};
}

struct ParamFlags {
  int rf_window = 5;
  int rf_fix = 3;
  double rf_budget = -1.0;
  int fo_window_min = 5;
  int fo_fix_min = 3;
  int fo_window_step = 0;
  int fo_fix_step = 1;
  int fo_min_rounds = 2;
  std::string rf_strategy = "S1";
  std::string formulation = "echelon";

  void add(CLI::App* app) {
    app->add_option("--rf-window", rf_window, "Relax-and-fix window size")->capture_default_str();
    app->add_option("--rf-fix", rf_fix, "Relax-and-fix periods fixed per step")->capture_default_str();
    app->add_option("--rf-budget", rf_budget, "Relax-and-fix budget in seconds (default ceil(0.1 * budget))");
    app->add_option("--fo-window-min", fo_window_min, "Initial fix-and-optimize window")->capture_default_str();
    app->add_option("--fo-fix-min", fo_fix_min, "Initial fix-and-optimize step")->capture_default_str();
    app->add_option("--fo-window-step", fo_window_step, "Window growth per idle round")->capture_default_str();
    app->add_option("--fo-fix-step", fo_fix_step, "Step growth per idle round")->capture_default_str();
    app->add_option("--fo-min-rounds", fo_min_rounds, "Rounds the budget is split over")->capture_default_str();
    app->add_option("--rf-strategy", rf_strategy, "S1 (fix ones) or S2 (fix all)")->capture_default_str();
    app->add_option("--formulation", formulation, "standard or echelon")->capture_default_str();
  }

  HeuristicParams build(double budget, double work_rate) const {
    HeuristicParams p = HeuristicParams::for_budget(budget);
    p.rf_window = rf_window;
    p.rf_fix = rf_fix;
    if (rf_budget > 0.0) p.rf_budget_seconds = rf_budget;
    p.fo_window_min = fo_window_min;
    p.fo_fix_min = fo_fix_min;
    p.fo_window_step = fo_window_step;
    p.fo_fix_step = fo_fix_step;
    p.fo_min_rounds = fo_min_rounds;
    p.rf_strategy = parse_rf_strategy(rf_strategy);
    p.formulation = parse_formulation(formulation);
    p.work_units_per_second = work_rate;
    p.validate();
    return p;
  }
};

struct GenerateCmd {
  GenSpec spec;
  std::string balance = "balanced";
  std::string plant = "inf";
  std::string storage_factor = "inf";
  std::string site = "none";
  std::string output;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("generate", "Generate a random instance");
    app->add_option("--retailers", spec.num_retailers)->capture_default_str();
    app->add_option("--warehouses", spec.num_warehouses)->capture_default_str();
    app->add_option("--horizon", spec.horizon)->capture_default_str();
    app->add_option("--balance", balance, "balanced or unbalanced")->capture_default_str();
    app->add_option("--plant-capacity-factor", plant, "C, or inf")->capture_default_str();
    app->add_option("--storage-capacity-factor", storage_factor, "C_s, or inf")->capture_default_str();
    app->add_option("--storage-site", site, "none, warehouses or retailers")->capture_default_str();
    app->add_option("--seed", spec.seed)->capture_default_str();
    app->add_option("-o,--output", output, "Output file (default stdout)");
    app->callback([this] { run(); });
  }

  void run() {
    spec.balance = parse_balance(balance);
    spec.plant_capacity_factor = parse_factor(plant);
    spec.storage_capacity_factor = parse_factor(storage_factor);
    spec.storage_site = parse_storage_site(site);
    const Instance inst = generate(spec);
    if (output.empty()) {
      std::cout << instance_to_json(inst) << '\n';
    } else {
      write_instance(inst, output);
      std::cerr << "wrote " << inst.meta.id << " to " << output << '\n';
    }
  }
};

struct SolveCmd {
  std::string instance_path;
  std::string method = "rffo";
  double budget = 60.0;
  double work_rate = kDefaultWorkRate;
  ParamFlags flags;
  std::string solution_out;
  std::string report_out;
  std::string export_lp;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("solve", "Solve one instance");
    app->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
    app->add_option("--method", method, "rffo, mip-es or mip-std")->capture_default_str();
    app->add_option("--budget", budget, "Total budget in seconds")->capture_default_str();
    app->add_option("--work-rate", work_rate,
                    "Work units per budget second; 0 measures wall-clock time")
        ->capture_default_str();
    flags.add(app);
    app->add_option("--solution-out", solution_out, "Write the plan as JSON");
    app->add_option("--report-out", report_out, "Write the heuristic run report as JSON");
    app->add_option("--export-lp", export_lp, "Write the model in LP format before solving");
    app->callback([this] { run(); });
  }

  void run() {
    const Instance inst = read_instance(instance_path);
    const Method m = parse_method(method);
    const HeuristicParams params = flags.build(budget, work_rate);
    if (!export_lp.empty()) {
      const FormulationKind kind = m == Method::kRffo        ? params.formulation
                                   : m == Method::kMipEchelon ? FormulationKind::kEchelon
                                                              : FormulationKind::kStandard;
      mip::export_model_text(build_model(inst, kind), export_lp);
    }
    ordered_json out;
    out["instance_id"] = inst.meta.id;
    out["seed"] = inst.meta.seed;
    out["method"] = method;
    out["budget"] = budget;
    out["work_rate"] = work_rate;
    if (m == Method::kRffo) {
      const HybridResult r = hybrid(inst, params);
      out["status"] = "feasible";
      out["objective"] = r.solution.objective;
      out["rf_objective"] = r.report.rf_cost;
      out["elapsed"] = r.report.rf_seconds + r.report.fo_seconds;
      out["fo_rounds"] = r.report.fo_rounds;
      out["params"] = ordered_json::parse(run_report_to_json(r.report, params))["params"];
      if (!solution_out.empty()) write_solution(r.solution, solution_out);
      if (!report_out.empty()) write_text_file(report_out, run_report_to_json(r.report, params) + "\n");
    } else {
      const FormulationKind kind =
          m == Method::kMipEchelon ? FormulationKind::kEchelon : FormulationKind::kStandard;
      const mip::MipModel model = build_model(inst, kind);
      WorkClock clock(work_rate);
      clock.set_wall_cap(budget);
      mip::SolveControl control;
      clock.limit(control, budget);
      const mip::SolveResult r = mip::solve_mip(model, control);
      clock.charge(r.work_units);
      out["status"] = mip::to_string(r.status);
      out["objective"] = r.incumbent ? ordered_json(r.incumbent->objective) : ordered_json(nullptr);
      out["bound"] = std::isfinite(r.dual_bound) ? ordered_json(r.dual_bound) : ordered_json(nullptr);
      out["elapsed"] = clock.deterministic() ? clock.elapsed() : r.seconds;
      out["nodes"] = r.nodes;
      if (r.incumbent && !solution_out.empty()) {
        write_solution(extract_solution(inst, model, r.incumbent->values), solution_out);
      }
    }
    std::cout << out.dump(2) << '\n';
  }
};

struct ValidateCmd {
  std::string instance_path;
  std::string solution_path;
  bool enumerate = false;
  int* exit_code = nullptr;

  void add(CLI::App& root, int* code) {
    exit_code = code;
    CLI::App* app = root.add_subcommand("validate", "Check a plan, or find the exact optimum");
    app->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
    app->add_option("solution", solution_path, "Plan JSON")->check(CLI::ExistingFile);
    app->add_flag("--enumerate", enumerate, "Also compute the optimum by enumeration (tiny instances)");
    app->callback([this] { run(); });
  }

  void run() {
    const Instance inst = read_instance(instance_path);
    ordered_json out;
    out["instance_id"] = inst.meta.id;
    if (!solution_path.empty()) {
      const Solution sol = read_solution(solution_path, inst.num_facilities(), inst.horizon);
      const FeasibilityReport rep = check_feasibility(inst, sol);
      out["feasibility"] = ordered_json::parse(report_to_json(rep));
      out["cost"] = total_cost(inst, sol);
      if (!rep.feasible) *exit_code = 1;
    }
    if (enumerate) {
      const EnumerationResult e = exact_optimum_enumerate(inst);
      out["optimum"] = e.solution ? ordered_json(e.solution->objective) : ordered_json(nullptr);
      out["patterns"] = e.patterns;
    }
    std::cout << out.dump(2) << '\n';
  }
};

struct BenchCmd {
  std::string grid = "desk";
  std::vector<std::string> instance_files;
  std::vector<std::string> methods{"rffo", "mip-es"};
  std::vector<int> retailers, warehouses, horizons;
  std::vector<std::string> plant_factors, storage, balances;
  int replicates = -1;
  std::uint64_t seed_base = 1;
  int tiny_count = 30;
  double budget = 10.0;
  double work_rate = kDefaultWorkRate;
  ParamFlags flags;
  std::string out_dir = "bench_out";

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("bench", "Run a batch and write results.csv");
    app->add_option("--grid", grid, "desk, full or tiny")->capture_default_str();
    app->add_option("--instances", instance_files, "Instance files instead of a grid");
    app->add_option("--methods", methods, "Any of rffo, mip-es, mip-std")->delimiter(',')->capture_default_str();
    app->add_option("--retailers", retailers, "Override |R| values")->delimiter(',');
    app->add_option("--warehouses", warehouses, "Override |W| values")->delimiter(',');
    app->add_option("--horizons", horizons, "Override |T| values")->delimiter(',');
    app->add_option("--plant-capacity-factors", plant_factors, "Override C values (inf allowed)")->delimiter(',');
    app->add_option("--storage", storage, "Storage configs: none, wF, rF")->delimiter(',');
    app->add_option("--balances", balances, "balanced, unbalanced")->delimiter(',');
    app->add_option("--replicates", replicates, "Instances per grid cell");
    app->add_option("--seed-base", seed_base)->capture_default_str();
    app->add_option("--tiny-count", tiny_count, "Instances for --grid tiny")->capture_default_str();
    app->add_option("--budget", budget, "Per-run budget in seconds")->capture_default_str();
    app->add_option("--work-rate", work_rate,
                    "Work units per budget second; 0 measures wall-clock time")
        ->capture_default_str();
    flags.add(app);
    app->add_option("--out", out_dir, "Output directory")->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() {
    ExperimentConfig config;
    if (!instance_files.empty()) {
      for (const auto& f : instance_files) config.instances.push_back(read_instance(f));
    } else if (grid == "tiny") {
      config.instances = tiny_instances(tiny_count, seed_base);
    } else {
      GridSpec g;
      if (grid == "desk") {
        g = GridSpec::desk();
      } else if (grid == "full") {
        g = GridSpec::full();
      } else {
        throw std::invalid_argument("unknown grid '" + grid + "'");
      }
      if (!retailers.empty()) g.retailers = retailers;
      if (!warehouses.empty()) g.warehouses = warehouses;
      if (!horizons.empty()) g.horizons = horizons;
      if (!plant_factors.empty()) {
        g.plant_capacity_factors.clear();
        for (const auto& f : plant_factors) g.plant_capacity_factors.push_back(parse_factor(f));
      }
      if (!storage.empty()) {
        g.storage.clear();
        for (const auto& s : storage) g.storage.push_back(parse_storage(s));
      }
      if (!balances.empty()) {
        g.balances.clear();
        for (const auto& b : balances) g.balances.push_back(parse_balance(b));
      }
      if (replicates > 0) g.replicates = replicates;
      g.seed_base = seed_base;
      for (const GenSpec& spec : g.expand()) config.instances.push_back(generate(spec));
    }
    config.methods.clear();
    for (const auto& m : methods) config.methods.push_back(parse_method(m));
    config.budget_seconds = budget;
    config.work_units_per_second = work_rate;
    config.params = flags.build(budget, work_rate);
    config.output_dir = out_dir;
    std::cerr << config.instances.size() << " instances x " << config.methods.size()
              << " methods -> " << out_dir << "/results.csv\n";
    std::cout << kResultsHeader << '\n';
    run_benchmark(config, [](const ResultRow& row) { std::cout << to_csv_line(row) << std::endl; });
  }
};

struct ReportCmd {
  std::string results_path;
  std::string group_by = "C";
  std::string reference = "mip-es";
  std::string baseline_path;
  std::string method = "rffo";
  std::string output;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "report", "Summary table, or boxplot data with --baseline");
    app->add_option("results", results_path, "results.csv")->required()->check(CLI::ExistingFile);
    app->add_option("--group-by", group_by, "all, R, W, T, balance, C, Cs or site")->capture_default_str();
    app->add_option("--reference", reference, "Reference method for the summary")->capture_default_str();
    app->add_option("--baseline", baseline_path, "Baseline results.csv for deviations")->check(CLI::ExistingFile);
    app->add_option("--method", method, "Method compared in deviation data")->capture_default_str();
    app->add_option("-o,--output", output, "Output file (default stdout)");
    app->callback([this] { run(); });
  }

  void run() {
    const auto rows = parse_csv(read_text_file(results_path));
    std::string text;
    if (!baseline_path.empty()) {
      const auto base = parse_csv(read_text_file(baseline_path));
      const DeviationData d = emit_deviation_data(rows, base, parse_method(method));
      for (const auto& id : d.unmatched) std::cerr << "warning: no baseline for " << id << '\n';
      text = deviation_to_json(d) + "\n";
    } else {
      const Summary s = emit_summary(rows, group_by, parse_method(reference));
      for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
      text = summary_to_csv(s);
    }
    if (output.empty()) {
      std::cout << text;
    } else {
      write_text_file(output, text);
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lot sizing in three-level distribution networks"};
  app.require_subcommand(1);
  int exit_code = 0;
  GenerateCmd generate_cmd;
  SolveCmd solve_cmd;
  ValidateCmd validate_cmd;
  BenchCmd bench_cmd;
  ReportCmd report_cmd;
  generate_cmd.add(app);
  solve_cmd.add(app);
  validate_cmd.add(app, &exit_code);
  bench_cmd.add(app);
  report_cmd.add(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}
