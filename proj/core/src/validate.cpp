#include "lotsizing/validate.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "lotsizing/formulation.hpp"
#include "lotsizing/mip/branch_and_bound.hpp"

namespace lotsizing {

const char* to_string(ConstraintFamily family) {
  switch (family) {
    case ConstraintFamily::kBalance:
      return "balance";
    case ConstraintFamily::kSetupLink:
      return "setup-link";
    case ConstraintFamily::kPlantCapacity:
      return "plant-capacity";
    case ConstraintFamily::kStorageCapacity:
      return "storage-capacity";
    case ConstraintFamily::kNonnegativity:
      return "nonnegativity";
    case ConstraintFamily::kBinarity:
      return "binarity";
  }
  return "?";
}

bool FeasibilityReport::has(ConstraintFamily family) const {
  return std::any_of(violations.begin(), violations.end(),
                     [family](const Violation& v) { return v.family == family; });
}

FeasibilityReport check_feasibility(const Instance& inst, const Solution& sol, double tol) {
  const int f = inst.num_facilities();
  const int horizon = inst.horizon;
  for (const Grid<double>* g : {&sol.x, &sol.s, &sol.y}) {
    if (g->rows() != f || g->cols() != horizon) {
      throw std::invalid_argument("solution dimensions do not match the instance");
    }
  }
  const SupplyNetwork& net = inst.network;
  const Grid<std::int64_t> agg = aggregate_demands(inst);
  FeasibilityReport report;
  auto flag = [&](ConstraintFamily family, int i, int t, double residual) {
    report.violations.push_back({family, i, t, residual});
  };

  for (int i = 0; i < f; ++i) {
    const bool retailer = net.kind(i) == FacilityKind::kRetailer;
    for (int t = 0; t < horizon; ++t) {
      const double x = sol.x(i, t);
      const double s = sol.s(i, t);
      const double y = sol.y(i, t);

      double residual = (t > 0 ? sol.s(i, t - 1) : 0.0) + x - s;
      for (int j : net.children(i)) residual -= sol.x(j, t);
      if (retailer) residual -= static_cast<double>(agg(i, t));
      if (std::abs(residual) > tol) flag(ConstraintFamily::kBalance, i, t, residual);

      const double to_go = static_cast<double>(cumulative_demand(agg, i, t, horizon - 1));
      const double link = x - to_go * y;
      if ((x > tol && y < 1.0 - tol) || link > tol) {
        flag(ConstraintFamily::kSetupLink, i, t, std::max(link, x));
      }
      if (i == SupplyNetwork::plant()) {
        const double over = x - inst.plant_capacity[static_cast<std::size_t>(t)];
        if (over > tol) flag(ConstraintFamily::kPlantCapacity, i, t, over);
      }
      const double cap = inst.storage_capacity(i, t);
      if (std::isfinite(cap)) {
        const double over = s - std::min(cap, to_go);
        if (over > tol) flag(ConstraintFamily::kStorageCapacity, i, t, over);
      }
      if (x < -tol) flag(ConstraintFamily::kNonnegativity, i, t, x);
      if (s < -tol) flag(ConstraintFamily::kNonnegativity, i, t, s);
      if (std::min(std::abs(y), std::abs(y - 1.0)) > tol) {
        flag(ConstraintFamily::kBinarity, i, t, y);
      }
    }
  }
  report.feasible = report.violations.empty();
  return report;
}

std::string report_to_json(const FeasibilityReport& report) {
  nlohmann::ordered_json j;
  j["feasible"] = report.feasible;
  j["violations"] = nlohmann::ordered_json::array();
  for (const Violation& v : report.violations) {
    j["violations"].push_back({{"family", to_string(v.family)},
                               {"facility", v.facility},
                               {"period", v.period + 1},
                               {"residual", v.residual}});
  }
  return j.dump(2);
}

EnumerationResult exact_optimum_enumerate(const Instance& inst) {
  const int f = inst.num_facilities();
  const int horizon = inst.horizon;
  const int cells = f * horizon;
  if (cells > kMaxEnumerationCells) {
    throw EnumerationTooLarge("enumeration needs |F|*|T| <= " +
                              std::to_string(kMaxEnumerationCells) + ", got " +
                              std::to_string(cells));
  }
  const mip::MipModel model = build_model(inst, FormulationKind::kStandard);
  EnumerationResult result;
  double best = kInfinity;
  std::vector<double> best_values;
  const std::uint32_t patterns = 1u << cells;
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    mip::SolveControl control;
    double setup_cost = 0.0;
    for (int c = 0; c < cells; ++c) {
      const int i = c / horizon;
      const int t = c % horizon;
      const int on = static_cast<int>((mask >> c) & 1u);
      control.fixings[{mip::VarRole::kSetup, i, t}] = on;
      if (on) setup_cost += inst.setup_cost(i, t);
    }
    // Holding costs are nonnegative, so setups alone bound the pattern cost.
    if (setup_cost >= best) continue;
    ++result.patterns;
    const mip::SolveResult r = mip::solve_lp(model, control);
    if (r.status != mip::SolveStatus::kOptimal) continue;
    if (r.incumbent->objective < best) {
      best = r.incumbent->objective;
      best_values = r.incumbent->values;
    }
  }
  if (std::isfinite(best)) result.solution = extract_solution(inst, model, best_values);
  return result;
}

double optimality_gap(double best, double bound) {
  if (!(best > 0.0)) throw std::domain_error("optimality gap needs a positive best value");
  return std::max(0.0, 100.0 * (best - bound) / best);
}

double improvement(double reference, double candidate) {
  if (!(reference > 0.0)) throw std::domain_error("improvement needs a positive reference");
  return 100.0 * (reference - candidate) / reference;
}

double deviation(double best, double baseline) {
  if (!(baseline > 0.0)) throw std::domain_error("deviation needs a positive baseline");
  return 100.0 * (best - baseline) / baseline;
}

}  // namespace lotsizing
