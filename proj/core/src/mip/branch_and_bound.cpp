#include "lotsizing/mip/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace lotsizing::mip {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kIntegralityTolerance = 1e-6;
constexpr double kIncumbentTolerance = 1e-6;
constexpr int kRowsPerSetupUnit = 250;
constexpr int kRowsPerIterationUnit = 500;

std::int64_t iteration_weight(const MipModel& model) {
  return 1 + model.num_rows() / kRowsPerIterationUnit;
}

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

struct Branch {
  int column = 0;
  int value = 0;
};

struct Node {
  std::int64_t id = 0;
  double bound = -kInfinity;
  std::vector<Branch> branches;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id < b.id;
  }
};

// Bounds every solve starts from: model bounds with the fixings applied.
struct Setup {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> integer_columns;  // sorted by VarKey
  // Row entries of every binary column, for dropping unused setups.
  std::vector<std::vector<std::pair<int, double>>> binary_rows;
};

Setup make_setup(const MipModel& model, const SolveControl& control, bool keep_integrality) {
  if (!(control.time_limit_seconds > 0.0)) {
    throw std::invalid_argument("time limit must be positive");
  }
  if (!(control.gap_tolerance >= 0.0)) {
    throw std::invalid_argument("gap tolerance must be nonnegative");
  }
  Setup s;
  const int n = model.num_variables();
  s.lower.resize(idx(n));
  s.upper.resize(idx(n));
  for (int j = 0; j < n; ++j) {
    s.lower[idx(j)] = model.variable(j).lower;
    s.upper[idx(j)] = model.variable(j).upper;
  }
  std::vector<bool> fixed(idx(n), false);
  for (const auto& [key, value] : control.fixings) {
    const auto j = model.find(key);
    if (!j) throw std::invalid_argument("fixing refers to unknown variable " + var_name(key));
    if (value != 0 && value != 1) throw std::invalid_argument("fixing value must be 0 or 1");
    s.lower[idx(*j)] = s.upper[idx(*j)] = value;
    fixed[idx(*j)] = true;
  }
  if (keep_integrality) {
    for (int j = 0; j < n; ++j) {
      const Variable& v = model.variable(j);
      if (!v.binary || fixed[idx(j)]) continue;
      if (control.integer_window &&
          (v.key.period < control.integer_window->first ||
           v.key.period > control.integer_window->last)) {
        continue;
      }
      s.integer_columns.push_back(j);
    }
    std::sort(s.integer_columns.begin(), s.integer_columns.end(), [&](int a, int b) {
      return model.variable(a).key < model.variable(b).key;
    });
    s.binary_rows.resize(idx(n));
    for (int r = 0; r < model.num_rows(); ++r) {
      for (const Term& t : model.row_terms(r)) {
        if (model.variable(t.var).binary) s.binary_rows[idx(t.var)].emplace_back(r, t.coef);
      }
    }
  }
  return s;
}

bool is_integral(double v) { return std::abs(v - std::round(v)) <= kIntegralityTolerance; }

class BranchAndBound {
 public:
  BranchAndBound(const MipModel& model, const SolveControl& control)
      : model_(model),
        control_(control),
        setup_(make_setup(model, control, true)),
        lp_(model),
        start_(Clock::now()),
        setup_work_(1 + model.num_rows() / kRowsPerSetupUnit),
        iteration_weight_(iteration_weight(model)) {
    if (std::isfinite(control.time_limit_seconds)) {
      deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(control.time_limit_seconds));
    }
  }

  SolveResult run();

 private:
  void apply_node_bounds(const std::vector<Branch>& branches);
  // Solves the LP at current bounds, charging iterations to the work budget.
  LpStatus solve_lp_here();
  bool out_of_budget() const;
  void try_warm_start();
  // Fixes the integer columns to `values` (rounded) and re-solves; accepts
  // the result as incumbent when it improves.
  void try_fixed_integers(const std::vector<double>& values, bool round_up);
  void offer(std::vector<double> values);
  // Closes binaries at 1 whose removal keeps every row satisfied.
  void drop_unused(std::vector<double>& values) const;
  double cutoff() const;
  std::int64_t work() const { return setup_work_ + iterations_ * iteration_weight_ + lp_solves_; }
  SolveResult finish(SolveStatus status, double open_bound);

  const MipModel& model_;
  const SolveControl& control_;
  Setup setup_;
  LpSolver lp_;
  Clock::time_point start_;
  Clock::time_point deadline_ = Clock::time_point::max();
  std::int64_t iterations_ = 0;
  std::int64_t lp_solves_ = 0;
  // Building the solver and the starting factorization.
  std::int64_t setup_work_ = 0;
  std::int64_t iteration_weight_ = 1;
  std::int64_t nodes_ = 0;
  std::optional<Incumbent> incumbent_;
  double pruned_bound_ = kInfinity;
  std::optional<Basis> root_basis_;
};

bool BranchAndBound::out_of_budget() const {
  if (control_.work_limit >= 0 && work() >= control_.work_limit) return true;
  return Clock::now() >= deadline_;
}

void BranchAndBound::apply_node_bounds(const std::vector<Branch>& branches) {
  for (int j : setup_.integer_columns) {
    lp_.set_column_bounds(j, setup_.lower[idx(j)], setup_.upper[idx(j)]);
  }
  for (const Branch& b : branches) lp_.set_column_bounds(b.column, b.value, b.value);
}

LpStatus BranchAndBound::solve_lp_here() {
  LpLimits limits;
  limits.deadline = deadline_;
  if (control_.work_limit >= 0) {
    limits.max_iterations =
        std::max<std::int64_t>(0, (control_.work_limit - work() - 1) / iteration_weight_);
  }
  ++lp_solves_;
  const LpStatus status = lp_.solve(limits);
  iterations_ += lp_.last_iterations();
  return status;
}

double BranchAndBound::cutoff() const {
  if (!incumbent_) return kInfinity;
  const double z = incumbent_->objective;
  return z - std::max(control_.gap_tolerance * std::max(std::abs(z), 1.0), 1e-9);
}

void BranchAndBound::drop_unused(std::vector<double>& values) const {
  std::vector<int> candidates;
  for (int j : setup_.integer_columns) {
    if (values[idx(j)] == 1.0 && setup_.lower[idx(j)] == 0.0 && model_.variable(j).cost > 0.0) {
      candidates.push_back(j);
    }
  }
  if (candidates.empty()) return;
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return model_.variable(a).cost > model_.variable(b).cost;
  });
  std::vector<double> activity(idx(model_.num_rows()));
  for (int r = 0; r < model_.num_rows(); ++r) activity[idx(r)] = model_.row_activity(r, values);
  auto fits = [&](int r, double a) {
    const double rhs = model_.row_rhs(r);
    switch (model_.row_sense(r)) {
      case RowSense::kLessEqual:
        return a <= rhs + kIncumbentTolerance;
      case RowSense::kGreaterEqual:
        return a >= rhs - kIncumbentTolerance;
      case RowSense::kEqual:
        return std::abs(a - rhs) <= kIncumbentTolerance;
    }
    return false;
  };
  for (int j : candidates) {
    const auto& entries = setup_.binary_rows[idx(j)];
    const bool ok = std::all_of(entries.begin(), entries.end(), [&](const auto& e) {
      return fits(e.first, activity[idx(e.first)] - e.second);
    });
    if (!ok) continue;
    values[idx(j)] = 0.0;
    for (const auto& [r, a] : entries) activity[idx(r)] -= a;
  }
}

void BranchAndBound::offer(std::vector<double> values) {
  for (int j : setup_.integer_columns) values[idx(j)] = std::round(values[idx(j)]);
  if (model_.max_violation(values) > kIncumbentTolerance) return;
  drop_unused(values);
  const double z = model_.objective_value(values);
  if (incumbent_ && z >= incumbent_->objective) return;
  incumbent_ = Incumbent{std::move(values), z};
}

void BranchAndBound::try_warm_start() {
  if (!control_.warm_start) return;
  const std::vector<double>& ws = *control_.warm_start;
  if (ws.size() != idx(model_.num_variables())) {
    throw std::invalid_argument("warm start has the wrong size");
  }
  for (int j = 0; j < model_.num_variables(); ++j) {
    const double v = ws[idx(j)];
    if (v < setup_.lower[idx(j)] - kIncumbentTolerance ||
        v > setup_.upper[idx(j)] + kIncumbentTolerance) {
      return;
    }
  }
  for (int j : setup_.integer_columns) {
    if (!is_integral(ws[idx(j)])) return;
  }
  offer(ws);
}

void BranchAndBound::try_fixed_integers(const std::vector<double>& values, bool round_up) {
  for (int j : setup_.integer_columns) {
    const double v = values[idx(j)];
    const double r = round_up && !is_integral(v) ? std::ceil(v) : std::round(v);
    lp_.set_column_bounds(j, r, r);
  }
  if (solve_lp_here() != LpStatus::kOptimal) return;
  const auto x = lp_.column_values();
  offer(std::vector<double>(x.begin(), x.end()));
}

SolveResult BranchAndBound::finish(SolveStatus status, double open_bound) {
  SolveResult r;
  r.status = status;
  r.nodes = nodes_;
  r.lp_iterations = iterations_;
  r.work_units = work();
  r.root_basis = root_basis_;
  double bound = std::min(open_bound, pruned_bound_);
  if (incumbent_) bound = std::min(bound, incumbent_->objective);
  if (status == SolveStatus::kInfeasible) bound = kInfinity;
  r.dual_bound = bound;
  r.incumbent = incumbent_;
  if (status == SolveStatus::kOptimal && incumbent_) {
    const double z = incumbent_->objective;
    if (std::abs(z - bound) / std::max(std::abs(z), 1.0) > control_.gap_tolerance) {
      r.status = SolveStatus::kFeasible;
    }
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
  return r;
}

SolveResult BranchAndBound::run() {
  for (int j = 0; j < model_.num_variables(); ++j) {
    lp_.set_column_bounds(j, setup_.lower[idx(j)], setup_.upper[idx(j)]);
  }
  try_warm_start();
  const bool crashed = incumbent_ && lp_.crash_from_point(incumbent_->values);
  if (!crashed && control_.start_basis) lp_.load_basis(*control_.start_basis);

  std::vector<Node> stack;
  std::set<Node, NodeOrder> queue;
  std::int64_t next_id = 0;
  stack.push_back(Node{next_id++, -kInfinity, {}});
  bool numeric_trouble = false;

  auto open_bound = [&]() {
    double b = kInfinity;
    for (const Node& n : stack) b = std::min(b, n.bound);
    if (!queue.empty()) b = std::min(b, queue.begin()->bound);
    return b;
  };
  auto stop_status = [&]() {
    return incumbent_ ? SolveStatus::kFeasible : SolveStatus::kNoSolution;
  };

  while (!stack.empty() || !queue.empty()) {
    if (incumbent_ && stack.size() > 1) {
      for (Node& n : stack) queue.insert(std::move(n));
      stack.clear();
    }
    Node node;
    if (!stack.empty()) {
      node = std::move(stack.back());
      stack.pop_back();
    } else {
      node = queue.extract(queue.begin()).value();
    }
    if (node.bound >= cutoff()) {
      pruned_bound_ = std::min(pruned_bound_, node.bound);
      continue;
    }
    if (out_of_budget()) {
      stack.push_back(std::move(node));
      return finish(stop_status(), open_bound());
    }

    ++nodes_;
    apply_node_bounds(node.branches);
    const LpStatus status = solve_lp_here();
    if (node.id == 0 && status == LpStatus::kOptimal) root_basis_ = lp_.basis();
    if (status == LpStatus::kLimitReached) {
      stack.push_back(std::move(node));
      return finish(stop_status(), open_bound());
    }
    if (status == LpStatus::kUnbounded) return finish(SolveStatus::kUnbounded, -kInfinity);
    if (status == LpStatus::kNumericFailure) {
      numeric_trouble = true;
      pruned_bound_ = std::min(pruned_bound_, node.bound);
      continue;
    }
    if (status == LpStatus::kInfeasible) continue;

    const double z = lp_.objective();
    if (z >= cutoff()) {
      pruned_bound_ = std::min(pruned_bound_, z);
      continue;
    }
    const auto xs = lp_.column_values();
    std::vector<double> values(xs.begin(), xs.end());

    int branch_col = -1;
    double best_frac = kInfinity;
    for (int j : setup_.integer_columns) {
      const double v = values[idx(j)];
      if (is_integral(v)) continue;
      const double dist = std::abs(v - std::floor(v) - 0.5);
      if (dist < best_frac) {
        best_frac = dist;
        branch_col = j;
      }
    }

    if (branch_col < 0) {
      // Integral relaxation: polish with integers pinned for an exact value.
      try_fixed_integers(values, false);
      if (!incumbent_ || incumbent_->objective > z + kIncumbentTolerance) {
        // Polishing failed numerically; fall back on the raw LP point.
        offer(values);
      }
      pruned_bound_ = std::min(pruned_bound_, z);
      continue;
    }
    if (!incumbent_ || node.id == 0) try_fixed_integers(values, true);

    Node down{next_id++, z, node.branches};
    down.branches.push_back({branch_col, 0});
    Node up{next_id++, z, std::move(node.branches)};
    up.branches.push_back({branch_col, 1});
    if (incumbent_) {
      // Plunge into the up child; its sibling waits in the queue.
      queue.insert(std::move(down));
      stack.push_back(std::move(up));
    } else {
      stack.push_back(std::move(down));
      stack.push_back(std::move(up));
    }
  }

  if (incumbent_) return finish(SolveStatus::kOptimal, kInfinity);
  return finish(numeric_trouble ? SolveStatus::kNumericFailure : SolveStatus::kInfeasible,
                kInfinity);
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasible:
      return "feasible";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kNoSolution:
      return "no-solution";
    case SolveStatus::kNumericFailure:
      return "numeric-failure";
  }
  return "?";
}

SolveResult solve_lp(const MipModel& model, const SolveControl& control) {
  const auto start = Clock::now();
  const Setup setup = make_setup(model, control, false);
  LpSolver lp(model);
  for (int j = 0; j < model.num_variables(); ++j) {
    lp.set_column_bounds(j, setup.lower[idx(j)], setup.upper[idx(j)]);
  }
  if (control.start_basis) lp.load_basis(*control.start_basis);
  LpLimits limits;
  const std::int64_t weight = iteration_weight(model);
  if (control.work_limit >= 0) limits.max_iterations = control.work_limit / weight;
  if (std::isfinite(control.time_limit_seconds)) {
    limits.deadline = start + std::chrono::duration_cast<Clock::duration>(
                                  std::chrono::duration<double>(control.time_limit_seconds));
  }
  const LpStatus status = lp.solve(limits);

  SolveResult r;
  r.nodes = 1;
  r.lp_iterations = lp.last_iterations();
  r.work_units = r.lp_iterations * weight + 1;
  switch (status) {
    case LpStatus::kOptimal: {
      const auto x = lp.column_values();
      r.status = SolveStatus::kOptimal;
      r.incumbent = Incumbent{std::vector<double>(x.begin(), x.end()), lp.objective()};
      r.incumbent->objective = model.objective_value(r.incumbent->values);
      r.dual_bound = r.incumbent->objective;
      r.root_basis = lp.basis();
      break;
    }
    case LpStatus::kInfeasible:
      r.status = SolveStatus::kInfeasible;
      r.dual_bound = kInfinity;
      break;
    case LpStatus::kUnbounded:
      r.status = SolveStatus::kUnbounded;
      break;
    case LpStatus::kLimitReached:
      r.status = SolveStatus::kNoSolution;
      break;
    case LpStatus::kNumericFailure:
      r.status = SolveStatus::kNumericFailure;
      break;
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

SolveResult solve_mip(const MipModel& model, const SolveControl& control) {
  BranchAndBound bb(model, control);
  return bb.run();
}

std::string serialize(const SolveResult& result) {
  nlohmann::ordered_json j;
  j["status"] = to_string(result.status);
  if (result.incumbent) {
    j["objective"] = result.incumbent->objective;
    j["values"] = result.incumbent->values;
  } else {
    j["objective"] = nullptr;
  }
  if (std::isfinite(result.dual_bound)) {
    j["dual_bound"] = result.dual_bound;
  } else {
    j["dual_bound"] = result.dual_bound > 0 ? "inf" : "-inf";
  }
  j["nodes"] = result.nodes;
  j["lp_iterations"] = result.lp_iterations;
  j["work_units"] = result.work_units;
  return j.dump();
}

}  // namespace lotsizing::mip
