// Export of a MipModel in the CPLEX LP text format, readable by most external
// solvers. Variables are named role_facility_period (1-based period).

#pragma once

#include <string>

#include "lotsizing/mip/model.hpp"

namespace lotsizing::mip {

std::string model_to_lp_text(const MipModel& model);

// Throws std::runtime_error if the file cannot be written.
void export_model_text(const MipModel& model, const std::string& path);

}  // namespace lotsizing::mip
