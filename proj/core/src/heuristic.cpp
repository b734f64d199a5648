#include "lotsizing/heuristic.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace lotsizing {

using mip::MipModel;
using mip::SolveControl;
using mip::SolveResult;
using mip::VarKey;
using mip::VarRole;

namespace {

using Clock = std::chrono::steady_clock;

// Budgets below this are treated as exhausted by the time checks.
constexpr double kMinTimeLimit = 1e-3;

int ceil_div(int a, int b) { return (a + b - 1) / b; }

bool improves(double candidate, double best) {
  return candidate < best - 1e-9 * std::max(1.0, std::abs(best));
}

std::vector<int> setup_columns(const MipModel& model) {
  std::vector<int> cols;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variable(j).key.role == VarRole::kSetup) cols.push_back(j);
  }
  return cols;
}

std::optional<double> objective_of(const SolveResult& r) {
  if (!r.incumbent) return std::nullopt;
  return r.incumbent->objective;
}

}  // namespace

const char* to_string(RfStrategy strategy) {
  return strategy == RfStrategy::kS1 ? "S1" : "S2";
}

RfStrategy parse_rf_strategy(const std::string& text) {
  if (text == "S1" || text == "s1") return RfStrategy::kS1;
  if (text == "S2" || text == "s2") return RfStrategy::kS2;
  throw std::invalid_argument("unknown relax-and-fix strategy '" + text + "'");
}

HeuristicParams HeuristicParams::for_budget(double maxt) {
  HeuristicParams p;
  p.total_budget_seconds = maxt;
  p.rf_budget_seconds = std::ceil(0.1 * maxt);
  return p;
}

void HeuristicParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(rf_window >= 1 && rf_fix >= 1, "relax-and-fix window and fix sizes must be >= 1");
  require(rf_window >= rf_fix, "relax-and-fix window must be at least the fix size");
  require(fo_window_min >= 1 && fo_fix_min >= 1, "fix-and-optimize sizes must be >= 1");
  require(fo_window_min >= fo_fix_min, "fix-and-optimize window must be at least the fix size");
  require(fo_window_step >= 0 && fo_fix_step >= 0, "fix-and-optimize steps must be >= 0");
  require(fo_min_rounds >= 1, "minimum rounds must be >= 1");
  require(rf_budget_seconds > 0.0, "relax-and-fix budget must be positive");
  require(total_budget_seconds > 0.0, "total budget must be positive");
  require(work_units_per_second >= 0.0 && std::isfinite(work_units_per_second),
          "work rate must be finite and >= 0");
}

WorkClock::WorkClock(double units_per_second)
    : rate_(units_per_second), start_(Clock::now()) {}

double WorkClock::wall_elapsed() const {
  return std::chrono::duration<double>(Clock::now() - start_).count();
}

double WorkClock::elapsed() const {
  return deterministic() ? static_cast<double>(work_) / rate_ : wall_elapsed();
}

void WorkClock::limit(SolveControl& control, double seconds) const {
  const double wall_left = wall_cap_ - wall_elapsed();
  if (deterministic()) {
    control.work_limit =
        static_cast<std::int64_t>(std::floor(std::max(0.0, seconds) * rate_));
    control.time_limit_seconds = std::max(wall_left, kMinTimeLimit);
  } else {
    control.work_limit = -1;
    control.time_limit_seconds = std::max(std::min(seconds, wall_left), kMinTimeLimit);
  }
}

std::string run_report_to_json(const RunReport& report, const HeuristicParams& p) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["instance_id"] = report.instance_id;
  j["params"] = {{"rf_window", p.rf_window},
                 {"rf_fix", p.rf_fix},
                 {"rf_budget_seconds", p.rf_budget_seconds},
                 {"fo_window_min", p.fo_window_min},
                 {"fo_fix_min", p.fo_fix_min},
                 {"fo_window_step", p.fo_window_step},
                 {"fo_fix_step", p.fo_fix_step},
                 {"fo_min_rounds", p.fo_min_rounds},
                 {"total_budget_seconds", p.total_budget_seconds},
                 {"rf_strategy", to_string(p.rf_strategy)},
                 {"formulation", to_string(p.formulation)},
                 {"work_units_per_second", p.work_units_per_second}};
  j["rf_cost"] = report.rf_cost;
  j["final_cost"] = report.final_cost;
  j["rf_seconds"] = report.rf_seconds;
  j["fo_seconds"] = report.fo_seconds;
  j["rf_wall_seconds"] = report.rf_wall_seconds;
  j["fo_wall_seconds"] = report.fo_wall_seconds;
  j["fo_rounds"] = report.fo_rounds;
  j["work_units"] = report.work_units;
  j["fo_trajectory"] = report.fo_trajectory;
  ordered_json log = ordered_json::array();
  for (const SubproblemRecord& r : report.subproblem_log) {
    ordered_json e;
    e["stage"] = r.stage;
    e["round"] = r.round;
    e["first"] = r.first + 1;
    e["last"] = r.last + 1;
    e["budget"] = r.budget;
    e["status"] = r.status;
    e["objective"] = r.objective ? ordered_json(*r.objective) : ordered_json(nullptr);
    e["best"] = r.best ? ordered_json(*r.best) : ordered_json(nullptr);
    e["elapsed"] = r.elapsed;
    e["nodes"] = r.nodes;
    log.push_back(std::move(e));
  }
  j["subproblem_log"] = std::move(log);
  return j.dump(2);
}

std::optional<Solution> all_setups_plan(const Instance& inst) {
  const int f = inst.num_facilities();
  const int horizon = inst.horizon;
  const Grid<std::int64_t> agg = aggregate_demands(inst);
  Solution sol = Solution::zeros(f, horizon);
  for (int i = 0; i < f; ++i) {
    for (int t = 0; t < horizon; ++t) {
      sol.y(i, t) = 1.0;
      if (i != SupplyNetwork::plant()) sol.x(i, t) = static_cast<double>(agg(i, t));
    }
  }
  const int p = SupplyNetwork::plant();
  double carry = 0.0;
  for (int t = horizon - 1; t >= 0; --t) {
    const double need = static_cast<double>(agg(p, t)) + carry;
    sol.x(p, t) = std::min(inst.plant_capacity[static_cast<std::size_t>(t)], need);
    carry = need - sol.x(p, t);
  }
  if (carry > kTolerance) return std::nullopt;
  double stock = 0.0;
  for (int t = 0; t < horizon; ++t) {
    stock += sol.x(p, t) - static_cast<double>(agg(p, t));
    sol.s(p, t) = std::max(stock, 0.0);
  }
  sol.objective = total_cost(inst, sol);
  return sol;
}

SolveControl build_rf_subproblem(const MipModel& model, const std::map<VarKey, int>& fixings,
                                 int alpha, int beta, double budget_seconds) {
  if (alpha < 0 || alpha > beta) throw std::invalid_argument("bad relax-and-fix window");
  (void)model;
  SolveControl c;
  c.fixings = fixings;
  c.integer_window = mip::PeriodWindow{0, beta};
  c.time_limit_seconds = std::max(budget_seconds, kMinTimeLimit);
  return c;
}

RfResult relax_and_fix(const Instance& inst, const MipModel& model,
                       const HeuristicParams& params, WorkClock& clock, RunReport* report) {
  params.validate();
  const int horizon = inst.horizon;
  const double start = clock.elapsed();
  const double budget = params.rf_budget_seconds;
  const double sub_budget = budget / ceil_div(horizon, params.rf_fix);
  const std::vector<int> setups = setup_columns(model);

  std::map<VarKey, int> fixings;
  std::optional<std::vector<double>> warm;
  if (const auto plan = all_setups_plan(inst)) warm = to_assignment(inst, model, *plan);
  std::optional<mip::Basis> basis;

  RfResult out;
  for (int alpha = 0;; alpha += params.rf_fix) {
    const int beta = std::min(alpha + params.rf_window - 1, horizon - 1);
    const double left = budget - (clock.elapsed() - start);
    const double limit = std::clamp(left, 0.0, sub_budget);
    SolveControl control = build_rf_subproblem(model, fixings, alpha, beta, limit);
    control.warm_start = warm;
    control.start_basis = basis;
    clock.limit(control, limit);
    const SolveResult res = mip::solve_mip(model, control);
    clock.charge(res.work_units);
    ++out.subproblems;
    if (report) {
      report->subproblem_log.push_back({"rf", 0, alpha, beta, limit, mip::to_string(res.status),
                                        objective_of(res), objective_of(res),
                                        clock.elapsed() - start, res.nodes});
    }
    if (!res.incumbent) {
      if (res.status == mip::SolveStatus::kInfeasible) {
        throw ConstructionFailure("relax-and-fix subproblem for periods " +
                                      std::to_string(alpha + 1) + "-" +
                                      std::to_string(beta + 1) + " is infeasible",
                                  alpha, beta);
      }
      throw BudgetExhausted("relax-and-fix subproblem for periods " + std::to_string(alpha + 1) +
                            "-" + std::to_string(beta + 1) + " found no solution within " +
                            std::to_string(limit) + " s");
    }
    if (res.root_basis) basis = res.root_basis;
    std::vector<double> values = res.incumbent->values;
    if (beta == horizon - 1) {
      out.assignment = std::move(values);
      break;
    }
    const int fix_last = std::min(alpha + params.rf_fix - 1, beta);
    for (int j : setups) {
      const VarKey& key = model.variable(j).key;
      if (key.period < alpha || key.period > fix_last) continue;
      const int v = static_cast<int>(std::lround(values[static_cast<std::size_t>(j)]));
      if (params.rf_strategy == RfStrategy::kS2 || v == 1) fixings[key] = v;
    }
    // Opening every relaxed setup keeps the plan feasible for the next window.
    for (int j : setups) {
      double& v = values[static_cast<std::size_t>(j)];
      v = std::ceil(v - 1e-6);
    }
    warm = std::move(values);
  }
  out.solution = extract_solution(inst, model, out.assignment);
  out.elapsed = clock.elapsed() - start;
  return out;
}

SolveControl build_fo_subproblem(const MipModel& model, std::span<const double> incumbent,
                                 int alpha, int beta, double budget_seconds) {
  if (alpha < 0 || alpha > beta) throw std::invalid_argument("bad fix-and-optimize window");
  if (incumbent.size() != static_cast<std::size_t>(model.num_variables())) {
    throw std::invalid_argument("incumbent size does not match the model");
  }
  SolveControl c;
  for (int j = 0; j < model.num_variables(); ++j) {
    const VarKey& key = model.variable(j).key;
    if (key.role != VarRole::kSetup || (key.period >= alpha && key.period <= beta)) continue;
    c.fixings[key] = static_cast<int>(std::lround(incumbent[static_cast<std::size_t>(j)]));
  }
  c.integer_window = mip::PeriodWindow{alpha, beta};
  c.warm_start = std::vector<double>(incumbent.begin(), incumbent.end());
  c.time_limit_seconds = std::max(budget_seconds, kMinTimeLimit);
  return c;
}

FoResult fix_and_optimize(const Instance& inst, const MipModel& model,
                          std::span<const double> start_values, const HeuristicParams& params,
                          double budget, WorkClock& clock, RunReport* report) {
  params.validate();
  const int horizon = inst.horizon;
  const double start = clock.elapsed();
  auto elapsed = [&] { return clock.elapsed() - start; };

  std::vector<double> best(start_values.begin(), start_values.end());
  double best_z = model.objective_value(best);
  double previous_z = best_z;
  int k = params.fo_window_min;
  int k_fix = params.fo_fix_min;
  double sub_budget =
      budget / (params.fo_min_rounds * ceil_div(horizon, params.fo_fix_min));

  FoResult out;
  std::optional<mip::Basis> basis;
  // Costs are nonnegative, so a zero-cost plan cannot be improved.
  while (elapsed() < budget && best_z > kTolerance) {
    ++out.rounds;
    int alpha = 0;
    int beta = std::min(k - 1, horizon - 1);
    bool treated = false;
    while (elapsed() < budget && !treated) {
      const double limit = std::min(sub_budget, budget - elapsed());
      SolveControl control = build_fo_subproblem(model, best, alpha, beta, limit);
      control.start_basis = basis;
      clock.limit(control, limit);
      const SolveResult res = mip::solve_mip(model, control);
      clock.charge(res.work_units);
      if (res.root_basis) basis = res.root_basis;
      if (res.incumbent && improves(res.incumbent->objective, best_z)) {
        best = res.incumbent->values;
        best_z = res.incumbent->objective;
      }
      if (report) {
        report->fo_trajectory.push_back(best_z);
        report->subproblem_log.push_back({"fo", out.rounds, alpha, beta, limit,
                                          mip::to_string(res.status), objective_of(res), best_z,
                                          elapsed(), res.nodes});
      }
      treated = beta == horizon - 1;
      alpha = std::min(alpha + k_fix, horizon - 1);
      beta = std::min(alpha + k - 1, horizon - 1);
      if (elapsed() < budget && k < horizon) sub_budget = std::min(sub_budget, budget - elapsed());
    }
    if (improves(best_z, previous_z)) {
      previous_z = best_z;
    } else if (k < horizon) {
      k += params.fo_window_step;
      k_fix += params.fo_fix_step;
      if (k >= horizon) sub_budget = budget - elapsed();
    } else {
      break;
    }
  }
  out.solution = extract_solution(inst, model, best);
  out.assignment = std::move(best);
  out.elapsed = elapsed();
  return out;
}

HybridResult hybrid(const Instance& inst, const HeuristicParams& params) {
  params.validate();
  inst.validate();
  const MipModel model = build_model(inst, params.formulation);
  WorkClock clock(params.work_units_per_second);
  HybridResult out;
  out.report.instance_id = inst.meta.id;

  clock.set_wall_cap(params.rf_budget_seconds);
  const RfResult rf = relax_and_fix(inst, model, params, clock, &out.report);
  out.report.rf_cost = rf.solution.objective;
  out.report.rf_seconds = rf.elapsed;
  out.report.rf_wall_seconds = clock.wall_elapsed();
  out.rf_solution = rf.solution;

  clock.set_wall_cap(params.total_budget_seconds);
  const double fo_budget = params.total_budget_seconds - rf.elapsed;
  const FoResult fo =
      fix_and_optimize(inst, model, rf.assignment, params, fo_budget, clock, &out.report);
  out.solution = fo.solution;
  out.report.final_cost = fo.solution.objective;
  out.report.fo_seconds = fo.elapsed;
  out.report.fo_wall_seconds = clock.wall_elapsed() - out.report.rf_wall_seconds;
  out.report.fo_rounds = fo.rounds;
  out.report.work_units = clock.work();
  return out;
}

}  // namespace lotsizing
