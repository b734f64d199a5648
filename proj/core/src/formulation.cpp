#include "lotsizing/formulation.hpp"

#include <algorithm>
#include <cmath>

namespace lotsizing {

using mip::MipModel;
using mip::RowSense;
using mip::Term;
using mip::VarKey;
using mip::VarRole;

namespace {

std::string row_label(const char* family, int facility, int period) {
  return std::string(family) + "_" + std::to_string(facility) + "_" + std::to_string(period + 1);
}

Grid<int> add_block(MipModel& model, const Instance& inst, VarRole role,
                    const Grid<double>* cost, bool binary) {
  const int f = inst.num_facilities();
  const int horizon = inst.horizon;
  Grid<int> ids(f, horizon, -1);
  for (int i = 0; i < f; ++i) {
    for (int t = 0; t < horizon; ++t) {
      ids(i, t) = model.add_variable(VarKey{role, i, t}, 0.0, binary ? 1.0 : kInfinity, binary,
                                     cost ? (*cost)(i, t) : 0.0);
    }
  }
  return ids;
}

// Setup-linking rows x^i_t <= M y^i_t; M is d^i_{t..T}, capped by the plant
// capacity at the plant.
void add_linking_rows(MipModel& model, const Instance& inst, const Grid<std::int64_t>& agg,
                      const Grid<int>& x, const Grid<int>& y) {
  for (int i = 0; i < inst.num_facilities(); ++i) {
    for (int t = 0; t < inst.horizon; ++t) {
      double big_m = static_cast<double>(cumulative_demand(agg, i, t, inst.horizon - 1));
      if (i == SupplyNetwork::plant()) big_m = std::min(big_m, inst.plant_capacity[static_cast<std::size_t>(t)]);
      const Term terms[] = {{x(i, t), 1.0}, {y(i, t), -big_m}};
      model.add_row(row_label("link", i, t), terms, RowSense::kLessEqual, 0.0);
    }
  }
}

double storage_bound(const Instance& inst, const Grid<std::int64_t>& agg, int i, int t) {
  return std::min(inst.storage_capacity(i, t),
                  static_cast<double>(cumulative_demand(agg, i, t, inst.horizon - 1)));
}

int column(const MipModel& model, VarRole role, int facility, int period) {
  const auto j = model.find(VarKey{role, facility, period});
  if (!j) {
    throw std::invalid_argument("model has no variable " + mip::var_name({role, facility, period}));
  }
  return *j;
}

}  // namespace

const char* to_string(FormulationKind kind) {
  return kind == FormulationKind::kStandard ? "standard" : "echelon";
}

FormulationKind parse_formulation(const std::string& text) {
  if (text == "standard" || text == "std") return FormulationKind::kStandard;
  if (text == "echelon" || text == "es") return FormulationKind::kEchelon;
  throw std::invalid_argument("unknown formulation '" + text + "'");
}

MipModel build_standard(const Instance& inst) {
  const SupplyNetwork& net = inst.network;
  const Grid<std::int64_t> agg = aggregate_demands(inst);
  MipModel model;
  const Grid<int> x = add_block(model, inst, VarRole::kFlow, nullptr, false);
  const Grid<int> s = add_block(model, inst, VarRole::kStock, &inst.holding_cost, false);
  const Grid<int> y = add_block(model, inst, VarRole::kSetup, &inst.setup_cost, true);

  std::vector<Term> terms;
  for (int i = 0; i < inst.num_facilities(); ++i) {
    const bool retailer = net.kind(i) == FacilityKind::kRetailer;
    for (int t = 0; t < inst.horizon; ++t) {
      terms.clear();
      if (t > 0) terms.push_back({s(i, t - 1), 1.0});
      terms.push_back({x(i, t), 1.0});
      for (int j : net.children(i)) terms.push_back({x(j, t), -1.0});
      terms.push_back({s(i, t), -1.0});
      const double rhs = retailer ? static_cast<double>(agg(i, t)) : 0.0;
      model.add_row(row_label("bal", i, t), terms, RowSense::kEqual, rhs);
    }
  }
  add_linking_rows(model, inst, agg, x, y);
  return model;
}

MipModel add_storage_capacity(MipModel model, const Instance& inst) {
  if (!inst.has_storage_capacity()) return model;
  const Grid<std::int64_t> agg = aggregate_demands(inst);
  for (int i = 0; i < inst.num_facilities(); ++i) {
    for (int t = 0; t < inst.horizon; ++t) {
      if (!std::isfinite(inst.storage_capacity(i, t))) continue;
      const int j = column(model, VarRole::kStock, i, t);
      const double hi = std::min(model.variable(j).upper, storage_bound(inst, agg, i, t));
      model.set_bounds(j, model.variable(j).lower, hi);
    }
  }
  return model;
}

MipModel build_echelon(const Instance& inst) {
  const SupplyNetwork& net = inst.network;
  const int horizon = inst.horizon;
  const Grid<std::int64_t> agg = aggregate_demands(inst);
  const Grid<double> echelon_cost = echelon_holding_cost(inst);
  MipModel model;
  const Grid<int> x = add_block(model, inst, VarRole::kFlow, nullptr, false);
  const Grid<int> e = add_block(model, inst, VarRole::kEchelon, &echelon_cost, false);
  const Grid<int> y = add_block(model, inst, VarRole::kSetup, &inst.setup_cost, true);

  std::vector<Term> terms;
  for (int i = 0; i < inst.num_facilities(); ++i) {
    for (int t = 0; t < horizon; ++t) {
      terms.clear();
      if (t > 0) terms.push_back({e(i, t - 1), 1.0});
      terms.push_back({x(i, t), 1.0});
      terms.push_back({e(i, t), -1.0});
      model.add_row(row_label("ebal", i, t), terms, RowSense::kEqual,
                    static_cast<double>(agg(i, t)));
    }
  }
  for (int i = 0; i < inst.num_facilities(); ++i) {
    if (net.children(i).empty()) continue;
    for (int t = 0; t < horizon; ++t) {
      terms.clear();
      terms.push_back({e(i, t), 1.0});
      for (int j : net.children(i)) terms.push_back({e(j, t), -1.0});
      model.add_row(row_label("nest", i, t), terms, RowSense::kGreaterEqual, 0.0);
    }
  }
  // I^i_{t-1} + sum_{u=t..l} d^i_{u..l} y^i_u >= d^i_{t..l}
  for (int i = 0; i < inst.num_facilities(); ++i) {
    for (int t = 0; t < horizon; ++t) {
      for (int l = t; l < horizon; ++l) {
        terms.clear();
        if (t > 0) terms.push_back({e(i, t - 1), 1.0});
        for (int u = t; u <= l; ++u) {
          terms.push_back({y(i, u), static_cast<double>(cumulative_demand(agg, i, u, l))});
        }
        model.add_row("ls_" + std::to_string(i) + "_" + std::to_string(t + 1) + "_" +
                          std::to_string(l + 1),
                      terms, RowSense::kGreaterEqual,
                      static_cast<double>(cumulative_demand(agg, i, t, l)));
      }
    }
  }
  add_linking_rows(model, inst, agg, x, y);
  for (int i = 0; i < inst.num_facilities(); ++i) {
    for (int t = 0; t < horizon; ++t) {
      if (!std::isfinite(inst.storage_capacity(i, t))) continue;
      terms.clear();
      terms.push_back({e(i, t), 1.0});
      for (int j : net.children(i)) terms.push_back({e(j, t), -1.0});
      model.add_row(row_label("cap", i, t), terms, RowSense::kLessEqual,
                    storage_bound(inst, agg, i, t));
    }
  }
  return model;
}

MipModel build_model(const Instance& inst, FormulationKind kind) {
  if (kind == FormulationKind::kEchelon) return build_echelon(inst);
  return add_storage_capacity(build_standard(inst), inst);
}

Solution extract_solution(const Instance& inst, const MipModel& model,
                          std::span<const double> assignment) {
  if (assignment.size() != static_cast<std::size_t>(model.num_variables())) {
    throw std::invalid_argument("assignment size does not match the model");
  }
  const int f = inst.num_facilities();
  const int horizon = inst.horizon;
  const bool echelon = model.has_role(VarRole::kEchelon);
  Solution sol = Solution::zeros(f, horizon);
  Grid<double> stock(f, horizon, 0.0);
  for (int i = 0; i < f; ++i) {
    for (int t = 0; t < horizon; ++t) {
      const double yv = assignment[static_cast<std::size_t>(column(model, VarRole::kSetup, i, t))];
      const double yr = std::round(yv);
      if (std::abs(yv - yr) > kTolerance || (yr != 0.0 && yr != 1.0)) {
        throw InfeasibleAssignment("fractional setup " + mip::var_name({VarRole::kSetup, i, t}));
      }
      sol.y(i, t) = yr;
      sol.x(i, t) = assignment[static_cast<std::size_t>(column(model, VarRole::kFlow, i, t))];
      stock(i, t) = assignment[static_cast<std::size_t>(
          column(model, echelon ? VarRole::kEchelon : VarRole::kStock, i, t))];
    }
  }
  sol.s = echelon ? stock_from_echelon(inst, stock) : stock;
  for (int i = 0; i < f; ++i) {
    for (int t = 0; t < horizon; ++t) {
      for (double* v : {&sol.s(i, t), &sol.x(i, t)}) {
        if (*v < -kTolerance) {
          throw InfeasibleAssignment("negative quantity at facility " + std::to_string(i) +
                                     ", period " + std::to_string(t + 1));
        }
        *v = std::max(*v, 0.0);
      }
    }
  }
  sol.objective = total_cost(inst, sol);

  std::vector<double> rounded(assignment.begin(), assignment.end());
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variable(j).binary) rounded[static_cast<std::size_t>(j)] = std::round(rounded[static_cast<std::size_t>(j)]);
  }
  const double model_z = model.objective_value(rounded);
  if (std::abs(model_z - sol.objective) > 1e-5 * std::max(1.0, std::abs(model_z))) {
    throw InfeasibleAssignment("plan cost does not match the model objective");
  }
  return sol;
}

std::vector<double> to_assignment(const Instance& inst, const MipModel& model,
                                  const Solution& solution) {
  const bool echelon = model.has_role(VarRole::kEchelon);
  const Grid<double> stock = echelon ? echelon_stock(inst, solution.s) : solution.s;
  std::vector<double> values(static_cast<std::size_t>(model.num_variables()), 0.0);
  for (int j = 0; j < model.num_variables(); ++j) {
    const VarKey& k = model.variable(j).key;
    double v = 0.0;
    switch (k.role) {
      case VarRole::kFlow:
        v = solution.x(k.facility, k.period);
        break;
      case VarRole::kSetup:
        v = solution.y(k.facility, k.period);
        break;
      case VarRole::kStock:
      case VarRole::kEchelon:
        v = stock(k.facility, k.period);
        break;
    }
    values[static_cast<std::size_t>(j)] = v;
  }
  return values;
}

}  // namespace lotsizing
