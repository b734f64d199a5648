#include "lotsizing/mip/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lotsizing::mip {

char role_symbol(VarRole role) {
  switch (role) {
    case VarRole::kFlow:
      return 'x';
    case VarRole::kStock:
      return 's';
    case VarRole::kSetup:
      return 'y';
    case VarRole::kEchelon:
      return 'I';
  }
  return '?';
}

std::string var_name(const VarKey& key) {
  return std::string(1, role_symbol(key.role)) + "_" +
         std::to_string(key.facility) + "_" + std::to_string(key.period + 1);
}

int MipModel::add_variable(const VarKey& key, double lower, double upper,
                           bool binary, double cost) {
  if (lower > upper) throw std::invalid_argument("variable lower > upper");
  if (!std::isfinite(cost)) throw std::invalid_argument("non-finite cost");
  const int id = num_variables();
  if (!index_.emplace(key, id).second) {
    throw std::invalid_argument("duplicate variable " + var_name(key));
  }
  vars_.push_back({key, lower, upper, binary, cost});
  return id;
}

int MipModel::add_row(std::string name, std::span<const Term> terms,
                      RowSense sense, double rhs) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("non-finite rhs");
  std::vector<Term> sorted(terms.begin(), terms.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::size_t out = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (!std::isfinite(sorted[k].coef)) {
      throw std::invalid_argument("non-finite coefficient in row " + name);
    }
    if (sorted[k].var < 0 || sorted[k].var >= num_variables()) {
      throw std::invalid_argument("row " + name + " references unknown variable");
    }
    if (out > 0 && sorted[out - 1].var == sorted[k].var) {
      sorted[out - 1].coef += sorted[k].coef;
    } else {
      sorted[out++] = sorted[k];
    }
  }
  sorted.resize(out);
  std::erase_if(sorted, [](const Term& t) { return t.coef == 0.0; });

  row_terms_.insert(row_terms_.end(), sorted.begin(), sorted.end());
  row_start_.push_back(static_cast<std::int64_t>(row_terms_.size()));
  row_names_.push_back(std::move(name));
  row_sense_.push_back(sense);
  row_rhs_.push_back(rhs);
  return num_rows() - 1;
}

void MipModel::set_bounds(int var, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("variable lower > upper");
  Variable& v = vars_[static_cast<std::size_t>(var)];
  v.lower = lower;
  v.upper = upper;
}

std::optional<int> MipModel::find(const VarKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool MipModel::has_role(VarRole role) const {
  return std::any_of(vars_.begin(), vars_.end(),
                     [role](const Variable& v) { return v.key.role == role; });
}

std::span<const Term> MipModel::row_terms(int row) const {
  const auto begin = row_start_[static_cast<std::size_t>(row)];
  const auto end = row_start_[static_cast<std::size_t>(row) + 1];
  return {row_terms_.data() + begin, static_cast<std::size_t>(end - begin)};
}

double MipModel::row_activity(int row, std::span<const double> values) const {
  double sum = 0.0;
  for (const Term& t : row_terms(row)) {
    sum += t.coef * values[static_cast<std::size_t>(t.var)];
  }
  return sum;
}

double MipModel::objective_value(std::span<const double> values) const {
  double z = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) z += vars_[j].cost * values[j];
  return z;
}

double MipModel::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    worst = std::max({worst, vars_[j].lower - values[j], values[j] - vars_[j].upper});
  }
  for (int r = 0; r < num_rows(); ++r) {
    const double a = row_activity(r, values);
    const double rhs = row_rhs(r);
    switch (row_sense(r)) {
      case RowSense::kLessEqual:
        worst = std::max(worst, a - rhs);
        break;
      case RowSense::kGreaterEqual:
        worst = std::max(worst, rhs - a);
        break;
      case RowSense::kEqual:
        worst = std::max(worst, std::abs(a - rhs));
        break;
    }
  }
  return worst;
}

}  // namespace lotsizing::mip
