// Abstract linear model: bounded variables, sparse rows, minimization
// objective. Lot-sizing formulations are built on top of it, but the type
// itself knows nothing about facilities beyond the VarKey labels.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lotsizing/instance.hpp"

namespace lotsizing::mip {

enum class VarRole : std::uint8_t {
  kFlow = 0,      // x
  kStock = 1,     // s
  kSetup = 2,     // y
  kEchelon = 3,   // I
};

char role_symbol(VarRole role);

struct VarKey {
  VarRole role = VarRole::kFlow;
  int facility = 0;
  int period = 0;  // 0-based

  friend auto operator<=>(const VarKey&, const VarKey&) = default;
};

// "role_facility_period" with a 1-based period, e.g. y_0_1.
std::string var_name(const VarKey& key);

enum class RowSense : std::uint8_t { kLessEqual, kEqual, kGreaterEqual };

struct Variable {
  VarKey key;
  double lower = 0.0;
  double upper = kInfinity;
  bool binary = false;
  double cost = 0.0;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

class MipModel {
 public:
  // Throws std::invalid_argument on duplicate keys, lower > upper or
  // non-finite costs.
  int add_variable(const VarKey& key, double lower, double upper, bool binary,
                   double cost);

  // Zero coefficients are dropped, duplicate variables are merged.
  int add_row(std::string name, std::span<const Term> terms, RowSense sense,
              double rhs);

  void set_bounds(int var, double lower, double upper);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(row_sense_.size()); }
  std::int64_t num_nonzeros() const {
    return static_cast<std::int64_t>(row_terms_.size());
  }

  const Variable& variable(int var) const {
    return vars_[static_cast<std::size_t>(var)];
  }
  const std::vector<Variable>& variables() const { return vars_; }
  std::optional<int> find(const VarKey& key) const;
  bool has_role(VarRole role) const;

  const std::string& row_name(int row) const {
    return row_names_[static_cast<std::size_t>(row)];
  }
  std::span<const Term> row_terms(int row) const;
  RowSense row_sense(int row) const {
    return row_sense_[static_cast<std::size_t>(row)];
  }
  double row_rhs(int row) const { return row_rhs_[static_cast<std::size_t>(row)]; }

  double row_activity(int row, std::span<const double> values) const;
  double objective_value(std::span<const double> values) const;

  // Largest bound or row violation of `values` (0 if feasible).
  double max_violation(std::span<const double> values) const;

 private:
  std::vector<Variable> vars_;
  std::map<VarKey, int> index_;
  std::vector<std::string> row_names_;
  std::vector<std::int64_t> row_start_{0};
  std::vector<Term> row_terms_;
  std::vector<RowSense> row_sense_;
  std::vector<double> row_rhs_;
};

}  // namespace lotsizing::mip
