// Bounded-variable revised primal simplex.
//
// Rows are turned into equalities with one logical per row (A x + w = 0,
// w bounded by the row sense and rhs), so every variable is simply boxed.
// Phase 1 minimizes the sum of basic infeasibilities; pricing is Devex with a
// Bland fallback after long degenerate runs, which makes the pivot sequence
// deterministic and cycle-free. The solver keeps its basis between calls, so
// re-solving after bound changes warm-starts automatically.

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lotsizing/mip/model.hpp"

namespace lotsizing::mip {

namespace internal {
struct CscMatrix;
class BasisFactor;
}  // namespace internal

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree, kFixed };

// header[p]: variable basic at position p (ids >= num_columns are logicals of
// row id - num_columns). status: per variable, structurals then logicals.
struct Basis {
  std::vector<int> header;
  std::vector<VarStatus> status;

  friend bool operator==(const Basis&, const Basis&) = default;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kLimitReached, kNumericFailure };

const char* to_string(LpStatus status);

struct LpLimits {
  std::int64_t max_iterations = -1;  // < 0: unlimited
  std::chrono::steady_clock::time_point deadline =
      std::chrono::steady_clock::time_point::max();
};

struct LpTolerances {
  double primal_feasibility = 1e-7;
  double dual_feasibility = 1e-9;
  double pivot = 1e-9;
};

class LpSolver {
 public:
  explicit LpSolver(const MipModel& model, LpTolerances tolerances = {});
  ~LpSolver();
  LpSolver(const LpSolver&) = delete;
  LpSolver& operator=(const LpSolver&) = delete;

  int num_columns() const { return n_; }
  int num_rows() const { return m_; }

  void set_column_bounds(int column, double lower, double upper);
  double column_lower(int column) const { return lower_[static_cast<std::size_t>(column)]; }
  double column_upper(int column) const { return upper_[static_cast<std::size_t>(column)]; }

  LpStatus solve(const LpLimits& limits = {});

  // Valid after kOptimal.
  double objective() const;
  std::span<const double> column_values() const {
    return {x_.data(), static_cast<std::size_t>(n_)};
  }
  // Row activities a_i x.
  std::vector<double> row_activities() const;
  // Dual values y with reduced costs c - A^T y.
  const std::vector<double>& row_duals() const { return duals_; }

  Basis basis() const;
  // Returns false (and keeps the current basis) if `basis` has the wrong
  // shape or is not a permutation of basic variables.
  bool load_basis(const Basis& basis);
  void reset_to_slack_basis();
  // Basis whose vertex is `values` when that point is a vertex: variables
  // strictly inside their bounds become basic, slack rows keep their logical.
  // Returns false (slack basis restored) if no nonsingular basis results.
  bool crash_from_point(std::span<const double> values);

  std::int64_t last_iterations() const { return last_iterations_; }
  std::int64_t total_iterations() const { return total_iterations_; }

 private:
  bool refactor();
  void init_nonbasic_values();
  void compute_basic_values();
  bool limits_hit(const LpLimits& limits, std::int64_t iter) const;
  void column_of(int var, std::vector<double>& out) const;
  double dot_column(int var, const std::vector<double>& row_vec) const;

  int m_ = 0;
  int n_ = 0;
  LpTolerances tol_;
  std::unique_ptr<internal::CscMatrix> a_;
  std::unique_ptr<internal::BasisFactor> factor_;

  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> x_;
  std::vector<VarStatus> status_;
  std::vector<int> header_;
  std::vector<int> position_;
  std::vector<double> weights_;
  std::vector<double> duals_;

  std::int64_t last_iterations_ = 0;
  std::int64_t total_iterations_ = 0;
};

}  // namespace lotsizing::mip
