// MIP models of the lot-sizing problem and the mapping between model
// assignments and physical plans.
//
// Standard model: flows x, physical stock s and setups y. Echelon model:
// flows x, echelon stock I and setups y, with (l,S)-style rows that tighten
// the relaxation. Both carry storage capacities when the instance has them.

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lotsizing/instance.hpp"
#include "lotsizing/mip/model.hpp"

namespace lotsizing {

enum class FormulationKind { kStandard, kEchelon };

const char* to_string(FormulationKind kind);
// Accepts "standard" / "std" and "echelon" / "es". Throws std::invalid_argument.
FormulationKind parse_formulation(const std::string& text);

// Standard model without storage capacities.
mip::MipModel build_standard(const Instance& instance);

// Tightens s^i_t <= min(cap^i_t, d^i_{t..T}) for capacitated facilities.
mip::MipModel add_storage_capacity(mip::MipModel model, const Instance& instance);

// Echelon-stock model, including capacity rows when the instance has any.
mip::MipModel build_echelon(const Instance& instance);

// Standard (with capacities) or echelon model.
mip::MipModel build_model(const Instance& instance, FormulationKind kind);

class InfeasibleAssignment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Physical plan from a model assignment. Throws InfeasibleAssignment when
// setups are fractional, stock reconstructs negative, or the recomputed cost
// disagrees with the model objective.
Solution extract_solution(const Instance& instance, const mip::MipModel& model,
                          std::span<const double> assignment);

// Model assignment of a physical plan (inverse of extract_solution).
std::vector<double> to_assignment(const Instance& instance, const mip::MipModel& model,
                                  const Solution& solution);

}  // namespace lotsizing
