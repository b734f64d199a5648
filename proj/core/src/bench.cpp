#include "lotsizing/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lotsizing/formulation.hpp"
#include "lotsizing/io.hpp"
#include "lotsizing/validate.hpp"

namespace lotsizing {

namespace {

constexpr double kTieTolerance = 1e-6;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string factor_label(double f) {
  if (!std::isfinite(f)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", f);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::optional<double> parse_optional_number(const std::string& text, int line) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ParseError("results line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return v;
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

double mean_or_nan(double sum, int n) { return n > 0 ? sum / n : kNaN; }

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::kRffo:
      return "rffo";
    case Method::kMipEchelon:
      return "mip-es";
    case Method::kMipStandard:
      return "mip-std";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "rffo") return Method::kRffo;
  if (text == "mip-es") return Method::kMipEchelon;
  if (text == "mip-std") return Method::kMipStandard;
  throw std::invalid_argument("unknown method '" + text + "'");
}

std::vector<GenSpec> GridSpec::expand() const {
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  std::vector<GenSpec> out;
  for (int r : retailers) {
    for (int w : warehouses) {
      if (w > r) continue;
      for (int t : horizons) {
        for (Balance b : balances) {
          for (double c : plant_capacity_factors) {
            for (const StorageConfig& sc : storage) {
              for (int rep = 0; rep < replicates; ++rep) {
                GenSpec g;
                g.num_retailers = r;
                g.num_warehouses = w;
                g.horizon = t;
                g.balance = b;
                g.plant_capacity_factor = c;
                g.storage_site = sc.site;
                g.storage_capacity_factor = sc.factor;
                g.seed = seed_base + static_cast<std::uint64_t>(rep);
                g.validate();
                out.push_back(g);
              }
            }
          }
        }
      }
    }
  }
  return out;
}

GridSpec GridSpec::desk() {
  GridSpec g;
  g.retailers = {10, 25};
  g.warehouses = {2, 5};
  g.horizons = {6, 15};
  g.plant_capacity_factors = {1.5, 1.75, 2.0};
  g.replicates = 5;
  return g;
}

GridSpec GridSpec::full() {
  GridSpec g;
  g.retailers = {50, 100, 200};
  g.warehouses = {5, 10, 15, 20};
  g.horizons = {15, 30};
  g.plant_capacity_factors = {1.5, 1.75, 2.0};
  g.replicates = 5;
  return g;
}

std::vector<Instance> tiny_instances(int count, std::uint64_t seed_base) {
  static const double kPlant[] = {kInfinity, 1.5, 2.0, 1.75};
  static const StorageConfig kStorage[] = {{StorageSite::kNone, kInfinity},
                                           {StorageSite::kWarehouses, 1.5},
                                           {StorageSite::kRetailers, 2.0},
                                           {StorageSite::kRetailers, 1.5}};
  std::vector<Instance> out;
  for (int k = 0; static_cast<int>(out.size()) < count; ++k) {
    if (k > 100 * count + 100) throw std::runtime_error("too few feasible tiny instances");
    GenSpec g;
    g.num_retailers = 1 + k % 2;
    g.num_warehouses = 1;
    g.horizon = 2 + (k / 2) % 2;
    g.plant_capacity_factor = kPlant[k % 4];
    g.storage_site = kStorage[(k / 4) % 4].site;
    g.storage_capacity_factor = kStorage[(k / 4) % 4].factor;
    g.seed = seed_base + static_cast<std::uint64_t>(k);
    Instance inst = generate(g);
    if (all_setups_plan(inst)) out.push_back(std::move(inst));
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (!(budget_seconds > 0.0)) throw std::invalid_argument("budget must be positive");
  if (methods.empty()) throw std::invalid_argument("no methods selected");
  if (!(work_units_per_second >= 0.0)) throw std::invalid_argument("work rate must be >= 0");
}

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

std::string to_csv_line(const ResultRow& row) {
  for (const std::string* field : {&row.instance_id, &row.method, &row.status}) {
    if (field->find_first_of(",\n\r\"") != std::string::npos) {
      throw std::invalid_argument("CSV field contains a separator: " + *field);
    }
  }
  std::string s = row.instance_id + "," + row.method + "," + row.status + ",";
  s += optional_cell(row.best) + "," + optional_cell(row.bound) + "," +
       optional_cell(row.gap_pct) + "," + format_number(row.elapsed_s) + "," +
       optional_cell(row.rf_best) + ",";
  if (row.fo_rounds) s += std::to_string(*row.fo_rounds);
  return s;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string s = std::string(kResultsHeader) + "\n";
  for (const ResultRow& r : rows) s += to_csv_line(r) + "\n";
  return s;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("results file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw ParseError("unexpected results header: " + line);
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) {
      throw ParseError("results line " + std::to_string(lineno) + ": expected 9 fields, got " +
                       std::to_string(f.size()));
    }
    ResultRow r;
    r.instance_id = f[0];
    r.method = f[1];
    r.status = f[2];
    r.best = parse_optional_number(f[3], lineno);
    r.bound = parse_optional_number(f[4], lineno);
    r.gap_pct = parse_optional_number(f[5], lineno);
    const auto elapsed = parse_optional_number(f[6], lineno);
    if (!elapsed) throw ParseError("results line " + std::to_string(lineno) + ": missing elapsed_s");
    r.elapsed_s = *elapsed;
    r.rf_best = parse_optional_number(f[7], lineno);
    if (!f[8].empty()) {
      int v = 0;
      const auto [end, ec] = std::from_chars(f[8].data(), f[8].data() + f[8].size(), v);
      if (ec != std::errc() || end != f[8].data() + f[8].size()) {
        throw ParseError("results line " + std::to_string(lineno) + ": bad fo_rounds");
      }
      r.fo_rounds = v;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

ResultRow run_one(const Instance& inst, Method method, const ExperimentConfig& config,
                  RunReport* report) {
  ResultRow row;
  row.instance_id = inst.meta.id;
  row.method = to_string(method);
  if (method == Method::kRffo) {
    HeuristicParams p = config.params;
    p.total_budget_seconds = config.budget_seconds;
    p.rf_budget_seconds = HeuristicParams::for_budget(config.budget_seconds).rf_budget_seconds;
    p.work_units_per_second = config.work_units_per_second;
    try {
      HybridResult r = hybrid(inst, p);
      row.status = "feasible";
      row.best = r.solution.objective;
      row.rf_best = r.report.rf_cost;
      row.fo_rounds = r.report.fo_rounds;
      row.elapsed_s = r.report.rf_seconds + r.report.fo_seconds;
      if (report) *report = std::move(r.report);
    } catch (const ConstructionFailure&) {
      row.status = "construction-failure";
    } catch (const BudgetExhausted&) {
      row.status = "budget-exhausted";
    } catch (const std::exception&) {
      row.status = "error";
    }
    return row;
  }
  const auto kind =
      method == Method::kMipEchelon ? FormulationKind::kEchelon : FormulationKind::kStandard;
  try {
    const mip::MipModel model = build_model(inst, kind);
    WorkClock clock(config.work_units_per_second);
    clock.set_wall_cap(config.budget_seconds);
    mip::SolveControl control;
    clock.limit(control, config.budget_seconds);
    const mip::SolveResult r = mip::solve_mip(model, control);
    clock.charge(r.work_units);
    row.status = mip::to_string(r.status);
    row.elapsed_s = clock.deterministic() ? clock.elapsed() : r.seconds;
    if (r.incumbent) row.best = r.incumbent->objective;
    if (std::isfinite(r.dual_bound)) row.bound = r.dual_bound;
    if (row.best && row.bound && *row.best > 0.0) row.gap_pct = optimality_gap(*row.best, *row.bound);
  } catch (const std::exception&) {
    row.status = "error";
  }
  return row;
}

std::vector<ResultRow> run_benchmark(const ExperimentConfig& config,
                                     const std::function<void(const ResultRow&)>& on_row) {
  config.validate();
  config.params.validate();
  std::ofstream csv;
  const bool to_disk = !config.output_dir.empty();
  if (to_disk) {
    std::filesystem::create_directories(config.output_dir / "reports");
    nlohmann::ordered_json meta;
    std::vector<std::string> methods;
    for (Method m : config.methods) methods.emplace_back(to_string(m));
    meta["methods"] = methods;
    meta["budget_seconds"] = config.budget_seconds;
    meta["work_units_per_second"] = config.work_units_per_second;
    meta["params"] = nlohmann::ordered_json::parse(
        run_report_to_json(RunReport{}, config.params))["params"];
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const Instance& inst : config.instances) {
      list.push_back({{"id", inst.meta.id}, {"seed", inst.meta.seed}});
    }
    meta["instances"] = std::move(list);
    write_text_file(config.output_dir / "config.json", meta.dump(2) + "\n");
    csv.open(config.output_dir / "results.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + (config.output_dir / "results.csv").string());
    csv << kResultsHeader << '\n' << std::flush;
  }
  std::vector<ResultRow> rows;
  for (const Instance& inst : config.instances) {
    for (Method m : config.methods) {
      RunReport report;
      ResultRow row = run_one(inst, m, config, &report);
      if (to_disk) {
        csv << to_csv_line(row) << '\n' << std::flush;
        if (m == Method::kRffo && row.best) {
          HeuristicParams p = config.params;
          p.total_budget_seconds = config.budget_seconds;
          p.rf_budget_seconds = HeuristicParams::for_budget(config.budget_seconds).rf_budget_seconds;
          p.work_units_per_second = config.work_units_per_second;
          write_text_file(config.output_dir / "reports" / (inst.meta.id + ".json"),
                          run_report_to_json(report, p) + "\n");
        }
      }
      if (on_row) on_row(row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

Summary emit_summary(const std::vector<ResultRow>& rows, const std::string& group_by,
                     Method reference) {
  static const std::set<std::string> kKeys = {"all", "R", "W", "T", "balance", "C", "Cs", "site"};
  if (!kKeys.count(group_by)) throw std::invalid_argument("unknown group key '" + group_by + "'");
  const std::string ref_name = to_string(reference);

  std::vector<std::string> order;
  std::map<std::string, const ResultRow*> rffo, ref;
  for (const ResultRow& r : rows) {
    if (!rffo.count(r.instance_id) && !ref.count(r.instance_id)) order.push_back(r.instance_id);
    if (r.method == "rffo") rffo[r.instance_id] = &r;
    if (r.method == ref_name) ref[r.instance_id] = &r;
  }
  // Deduplicate while keeping first appearance.
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& id : order) {
    if (seen.insert(id).second) ids.push_back(id);
  }

  auto group_of = [&](const std::string& id) -> std::pair<double, std::string> {
    if (group_by == "all") return {0.0, "all"};
    const auto g = parse_instance_id(id);
    if (!g) return {kInfinity, "other"};
    if (group_by == "R") return {double(g->num_retailers), std::to_string(g->num_retailers)};
    if (group_by == "W") return {double(g->num_warehouses), std::to_string(g->num_warehouses)};
    if (group_by == "T") return {double(g->horizon), std::to_string(g->horizon)};
    if (group_by == "balance") return {double(g->balance), to_string(g->balance)};
    if (group_by == "C") {
      return {g->plant_capacity_factor, factor_label(g->plant_capacity_factor)};
    }
    if (group_by == "Cs") {
      return {g->storage_capacity_factor, factor_label(g->storage_capacity_factor)};
    }
    return {double(g->storage_site), to_string(g->storage_site)};
  };

  std::map<std::pair<double, std::string>, std::vector<std::string>> groups;
  for (const auto& id : ids) groups[group_of(id)].push_back(id);

  Summary out;
  for (const auto& [key, members] : groups) {
    SummaryRow s;
    s.param = group_by;
    s.value = key.second;
    double ref_best = 0, ref_gap = 0, rf_best = 0, rffo_best = 0, rffo_gap = 0, impr_fo = 0,
           impr_ref = 0, rounds = 0;
    int n_ref_gap = 0, n_rf = 0, n_rffo_gap = 0, n_impr_fo = 0, n_impr_ref = 0, n_rounds = 0;
    for (const auto& id : members) {
      const auto a = rffo.find(id);
      const auto b = ref.find(id);
      if (a == rffo.end() || b == ref.end() || !a->second->best || !b->second->best) {
        out.warnings.push_back(id + ": missing rffo or " + ref_name + " solution, skipped");
        continue;
      }
      const ResultRow& h = *a->second;
      const ResultRow& m = *b->second;
      ++s.n_inst;
      ref_best += *m.best;
      rffo_best += *h.best;
      if (m.gap_pct) {
        ref_gap += *m.gap_pct;
        ++n_ref_gap;
      }
      if (m.status == "optimal") ++s.ref_opt;
      if (h.rf_best) {
        rf_best += *h.rf_best;
        ++n_rf;
        if (*h.rf_best > 0.0) {
          impr_fo += improvement(*h.rf_best, *h.best);
          ++n_impr_fo;
        }
      }
      if (m.bound && *h.best > 0.0) {
        rffo_gap += optimality_gap(*h.best, *m.bound);
        ++n_rffo_gap;
      }
      if (*m.best > 0.0) {
        impr_ref += improvement(*m.best, *h.best);
        ++n_impr_ref;
      }
      if (*h.best <= *m.best + kTieTolerance) ++s.n_le;
      if (*h.best < *m.best - kTieTolerance) ++s.n_lt;
      if (h.fo_rounds) {
        rounds += *h.fo_rounds;
        ++n_rounds;
      }
    }
    if (s.n_inst == 0) out.warnings.push_back("group " + group_by + "=" + s.value + " has no complete pairs");
    s.ref_best = mean_or_nan(ref_best, s.n_inst);
    s.rffo_best = mean_or_nan(rffo_best, s.n_inst);
    s.ref_gap = mean_or_nan(ref_gap, n_ref_gap);
    s.rf_best = mean_or_nan(rf_best, n_rf);
    s.rffo_gap = mean_or_nan(rffo_gap, n_rffo_gap);
    s.impr_fo_rf = mean_or_nan(impr_fo, n_impr_fo);
    s.impr_rffo_ref = mean_or_nan(impr_ref, n_impr_ref);
    s.fo_rounds = mean_or_nan(rounds, n_rounds);
    out.rows.push_back(s);
  }
  return out;
}

std::string summary_to_csv(const Summary& summary) {
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_number(v); };
  std::string s =
      "param,value,n_inst,ref_best,ref_gap,ref_opt,rf_best,rffo_best,rffo_gap,impr_fo_rf,"
      "impr_rffo_ref,n_le,n_lt,fo_rounds\n";
  for (const SummaryRow& r : summary.rows) {
    s += r.param + "," + r.value + "," + std::to_string(r.n_inst) + "," + cell(r.ref_best) + "," +
         cell(r.ref_gap) + "," + std::to_string(r.ref_opt) + "," + cell(r.rf_best) + "," +
         cell(r.rffo_best) + "," + cell(r.rffo_gap) + "," + cell(r.impr_fo_rf) + "," +
         cell(r.impr_rffo_ref) + "," + std::to_string(r.n_le) + "," + std::to_string(r.n_lt) +
         "," + cell(r.fo_rounds) + "\n";
  }
  return s;
}

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::string config, std::vector<double> values) {
  BoxStats b;
  b.config = std::move(config);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  b.min = sorted.front();
  b.q1 = quantile(sorted, 0.25);
  b.median = quantile(sorted, 0.5);
  b.q3 = quantile(sorted, 0.75);
  b.max = sorted.back();
  b.values = std::move(values);
  return b;
}

std::string uncapacitated_id(const std::string& id) {
  auto g = parse_instance_id(id);
  if (!g) return id;
  g->plant_capacity_factor = kInfinity;
  g->storage_capacity_factor = kInfinity;
  g->storage_site = StorageSite::kNone;
  return g->instance_id();
}

DeviationData emit_deviation_data(const std::vector<ResultRow>& results,
                                  const std::vector<ResultRow>& baseline, Method method) {
  const std::string name = to_string(method);
  std::map<std::string, const ResultRow*> base;
  for (const ResultRow& r : baseline) {
    if (r.method == name) base[r.instance_id] = &r;
  }
  DeviationData out;
  std::map<std::string, std::vector<double>> by_config;
  for (const ResultRow& r : results) {
    if (r.method != name) continue;
    const std::string twin = uncapacitated_id(r.instance_id);
    auto it = base.find(twin);
    if (it == base.end()) it = base.find(r.instance_id);
    if (it == base.end() || !r.best || !it->second->best || *it->second->best <= 0.0) {
      out.unmatched.push_back(r.instance_id);
      continue;
    }
    std::string config = "all";
    if (const auto g = parse_instance_id(r.instance_id)) {
      config = "C" + factor_label(g->plant_capacity_factor) + "-Cs" +
               factor_label(g->storage_capacity_factor);
      if (g->storage_site == StorageSite::kWarehouses) config += "w";
      if (g->storage_site == StorageSite::kRetailers) config += "r";
    }
    const double dev = deviation(*r.best, *it->second->best);
    out.records.push_back({r.instance_id, it->second->instance_id, config, dev});
    by_config[config].push_back(dev);
  }
  for (auto& [config, values] : by_config) out.boxes.push_back(box_stats(config, values));
  return out;
}

std::string deviation_to_json(const DeviationData& data) {
  using nlohmann::ordered_json;
  ordered_json j;
  ordered_json boxes = ordered_json::array();
  for (const BoxStats& b : data.boxes) {
    boxes.push_back({{"config", b.config},
                     {"min", b.min},
                     {"q1", b.q1},
                     {"median", b.median},
                     {"q3", b.q3},
                     {"max", b.max},
                     {"values", b.values}});
  }
  j["boxes"] = std::move(boxes);
  ordered_json records = ordered_json::array();
  for (const DeviationRecord& r : data.records) {
    records.push_back({{"instance_id", r.instance_id},
                       {"baseline_id", r.baseline_id},
                       {"config", r.config},
                       {"deviation", r.deviation}});
  }
  j["records"] = std::move(records);
  j["unmatched"] = data.unmatched;
  return j.dump(2);
}

}  // namespace lotsizing
