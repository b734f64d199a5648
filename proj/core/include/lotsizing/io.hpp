// JSON files for instances and solutions (format_version "1").
//
// Instance document:
//   { "format_version": "1", "meta": {...}, "horizon": T,
//     "warehouses": [{"id": w, "retailers": [r, ...]}, ...],
//     "demands": {"r": [d_1, ..., d_T]},
//     "setup_cost": {"i": v | [v_1..v_T]}, "holding_cost": {...},
//     "plant_capacity": v | [v_1..v_T] | null,
//     "storage_capacity": {"i": v | [v_1..v_T]} }
// Ids are canonical facility indices. Time-invariant values are written as
// scalars; readers accept either form.
//
// Solution document: { "objective": z, "y": {"i": [...]}, "x": {...},
//                      "s": {...} }

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "lotsizing/instance.hpp"

namespace lotsizing {

inline constexpr const char* kFormatVersion = "1";

// Malformed or invariant-violating file. The message names the offending
// field (and line/column for syntax errors).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

void write_instance(const Instance& instance, const std::filesystem::path& path);
Instance read_instance(const std::filesystem::path& path);

std::string solution_to_json(const Solution& solution);
Solution solution_from_json(const std::string& text, int num_facilities,
                            int horizon);

void write_solution(const Solution& solution, const std::filesystem::path& path);
Solution read_solution(const std::filesystem::path& path, int num_facilities,
                       int horizon);

// Reads a whole file; throws std::runtime_error if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lotsizing
