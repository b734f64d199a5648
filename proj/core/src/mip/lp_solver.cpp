#include "lotsizing/mip/lp_solver.hpp"

#include <algorithm>
#include <cmath>

#include "mip/basis_factor.hpp"

namespace lotsizing::mip {

using internal::BasisFactor;
using internal::CscMatrix;

namespace {

constexpr int kRefactorInterval = 100;
constexpr int kDegenerateBeforeBland = 50;
constexpr int kMaxRecoveries = 3;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

}  // namespace

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kLimitReached:
      return "limit";
    case LpStatus::kNumericFailure:
      return "numeric-failure";
  }
  return "?";
}

LpSolver::LpSolver(const MipModel& model, LpTolerances tolerances)
    : m_(model.num_rows()), n_(model.num_variables()), tol_(tolerances) {
  a_ = std::make_unique<CscMatrix>();
  a_->rows = m_;
  a_->cols = n_;
  a_->start.assign(idx(n_) + 1, 0);
  for (int r = 0; r < m_; ++r) {
    for (const Term& t : model.row_terms(r)) ++a_->start[idx(t.var) + 1];
  }
  for (int j = 0; j < n_; ++j) a_->start[idx(j) + 1] += a_->start[idx(j)];
  a_->index.resize(idx(a_->start.back()));
  a_->value.resize(idx(a_->start.back()));
  std::vector<int> fill(a_->start.begin(), a_->start.end() - 1);
  for (int r = 0; r < m_; ++r) {
    for (const Term& t : model.row_terms(r)) {
      const int pos = fill[idx(t.var)]++;
      a_->index[idx(pos)] = r;
      a_->value[idx(pos)] = t.coef;
    }
  }

  const std::size_t total = idx(n_ + m_);
  cost_.assign(total, 0.0);
  lower_.assign(total, 0.0);
  upper_.assign(total, 0.0);
  for (int j = 0; j < n_; ++j) {
    const Variable& v = model.variable(j);
    cost_[idx(j)] = v.cost;
    lower_[idx(j)] = v.lower;
    upper_[idx(j)] = v.upper;
  }
  // Logical w_i = -a_i x.
  for (int r = 0; r < m_; ++r) {
    const double rhs = model.row_rhs(r);
    double lo = -kInfinity;
    double hi = kInfinity;
    switch (model.row_sense(r)) {
      case RowSense::kLessEqual:
        lo = -rhs;
        break;
      case RowSense::kGreaterEqual:
        hi = -rhs;
        break;
      case RowSense::kEqual:
        lo = hi = -rhs;
        break;
    }
    lower_[idx(n_ + r)] = lo;
    upper_[idx(n_ + r)] = hi;
  }
  x_.assign(total, 0.0);
  weights_.assign(total, 1.0);
  duals_.assign(idx(m_), 0.0);
  factor_ = std::make_unique<BasisFactor>(*a_);
  reset_to_slack_basis();
}

LpSolver::~LpSolver() = default;

void LpSolver::set_column_bounds(int column, double lower, double upper) {
  lower_[idx(column)] = lower;
  upper_[idx(column)] = upper;
}

double LpSolver::objective() const {
  double z = 0.0;
  for (int j = 0; j < n_; ++j) z += cost_[idx(j)] * x_[idx(j)];
  return z;
}

std::vector<double> LpSolver::row_activities() const {
  std::vector<double> act(idx(m_));
  for (int r = 0; r < m_; ++r) act[idx(r)] = -x_[idx(n_ + r)];
  return act;
}

Basis LpSolver::basis() const { return {header_, status_}; }

bool LpSolver::load_basis(const Basis& basis) {
  const std::size_t total = idx(n_ + m_);
  if (basis.header.size() != idx(m_) || basis.status.size() != total) return false;
  std::vector<int> position(total, -1);
  for (int p = 0; p < m_; ++p) {
    const int var = basis.header[idx(p)];
    if (var < 0 || var >= n_ + m_ || position[idx(var)] != -1 ||
        basis.status[idx(var)] != VarStatus::kBasic) {
      return false;
    }
    position[idx(var)] = p;
  }
  const auto basic_count = std::count(basis.status.begin(), basis.status.end(),
                                      VarStatus::kBasic);
  if (basic_count != m_) return false;
  header_ = basis.header;
  status_ = basis.status;
  position_ = std::move(position);
  return true;
}

void LpSolver::reset_to_slack_basis() {
  const std::size_t total = idx(n_ + m_);
  status_.assign(total, VarStatus::kAtLower);
  position_.assign(total, -1);
  header_.resize(idx(m_));
  for (int r = 0; r < m_; ++r) {
    header_[idx(r)] = n_ + r;
    position_[idx(n_ + r)] = r;
    status_[idx(n_ + r)] = VarStatus::kBasic;
  }
}

bool LpSolver::crash_from_point(std::span<const double> values) {
  if (values.size() != idx(n_)) return false;
  constexpr double kAtBound = 1e-9;
  const std::size_t total = idx(n_ + m_);
  std::vector<VarStatus> status(total, VarStatus::kAtLower);
  std::vector<int> header;
  header.reserve(idx(m_));
  std::vector<double> activity(idx(m_), 0.0);
  for (int j = 0; j < n_; ++j) {
    const double lo = lower_[idx(j)];
    const double hi = upper_[idx(j)];
    const double v = std::clamp(values[idx(j)], lo, hi);
    for (int e = a_->start[idx(j)]; e < a_->start[idx(j) + 1]; ++e) {
      activity[idx(a_->index[idx(e)])] += a_->value[idx(e)] * v;
    }
    if (lo == hi) {
      status[idx(j)] = VarStatus::kFixed;
    } else if (std::abs(v - lo) <= kAtBound) {
      status[idx(j)] = VarStatus::kAtLower;
    } else if (std::abs(v - hi) <= kAtBound) {
      status[idx(j)] = VarStatus::kAtUpper;
    } else {
      status[idx(j)] = VarStatus::kBasic;
      header.push_back(j);
    }
  }
  std::vector<int> tight;
  for (int r = 0; r < m_; ++r) {
    const int var = n_ + r;
    const double w = -activity[idx(r)];
    const double lo = lower_[idx(var)];
    const double hi = upper_[idx(var)];
    const double slack = std::min(std::abs(w - lo), std::abs(w - hi));
    if (slack <= kAtBound * (1.0 + std::abs(w))) {
      status[idx(var)] = std::abs(w - hi) < std::abs(w - lo) ? VarStatus::kAtUpper
                                                             : VarStatus::kAtLower;
      if (lo == hi) status[idx(var)] = VarStatus::kFixed;
      tight.push_back(r);
    } else {
      status[idx(var)] = VarStatus::kBasic;
      header.push_back(var);
    }
  }
  if (header.size() > idx(m_)) return false;
  // Degenerate vertex: complete with logicals of tight inequality rows first.
  std::stable_partition(tight.begin(), tight.end(), [&](int r) {
    return lower_[idx(n_ + r)] != upper_[idx(n_ + r)];
  });
  for (std::size_t k = 0; header.size() < idx(m_) && k < tight.size(); ++k) {
    const int var = n_ + tight[k];
    status[idx(var)] = VarStatus::kBasic;
    header.push_back(var);
  }
  std::vector<int> position(total, -1);
  for (int p = 0; p < m_; ++p) position[idx(header[idx(p)])] = p;
  header_ = std::move(header);
  status_ = std::move(status);
  position_ = std::move(position);
  if (!refactor()) {
    reset_to_slack_basis();
    return false;
  }
  return true;
}

void LpSolver::init_nonbasic_values() {
  for (int j = 0; j < n_ + m_; ++j) {
    VarStatus& st = status_[idx(j)];
    if (st == VarStatus::kBasic) continue;
    const double lo = lower_[idx(j)];
    const double hi = upper_[idx(j)];
    if (lo == hi) {
      st = VarStatus::kFixed;
    } else if (st == VarStatus::kAtUpper && std::isfinite(hi)) {
      // keep
    } else if (st == VarStatus::kAtLower && std::isfinite(lo)) {
      // keep
    } else if (std::isfinite(lo)) {
      st = VarStatus::kAtLower;
    } else if (std::isfinite(hi)) {
      st = VarStatus::kAtUpper;
    } else {
      st = VarStatus::kFree;
    }
    switch (st) {
      case VarStatus::kFixed:
      case VarStatus::kAtLower:
        x_[idx(j)] = lo;
        break;
      case VarStatus::kAtUpper:
        x_[idx(j)] = hi;
        break;
      default:
        x_[idx(j)] = 0.0;
        break;
    }
  }
}

bool LpSolver::refactor() { return factor_->factorize(header_); }

void LpSolver::compute_basic_values() {
  std::vector<double> rhs(idx(m_), 0.0);
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[idx(j)] == VarStatus::kBasic) continue;
    const double xj = x_[idx(j)];
    if (xj == 0.0) continue;
    if (j < n_) {
      for (int e = a_->start[idx(j)]; e < a_->start[idx(j) + 1]; ++e) {
        rhs[idx(a_->index[idx(e)])] -= a_->value[idx(e)] * xj;
      }
    } else {
      rhs[idx(j - n_)] -= xj;
    }
  }
  factor_->ftran(rhs);
  for (int p = 0; p < m_; ++p) x_[idx(header_[idx(p)])] = rhs[idx(p)];
}

void LpSolver::column_of(int var, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (var < n_) {
    for (int e = a_->start[idx(var)]; e < a_->start[idx(var) + 1]; ++e) {
      out[idx(a_->index[idx(e)])] = a_->value[idx(e)];
    }
  } else {
    out[idx(var - n_)] = 1.0;
  }
}

double LpSolver::dot_column(int var, const std::vector<double>& row_vec) const {
  if (var >= n_) return row_vec[idx(var - n_)];
  double sum = 0.0;
  for (int e = a_->start[idx(var)]; e < a_->start[idx(var) + 1]; ++e) {
    sum += a_->value[idx(e)] * row_vec[idx(a_->index[idx(e)])];
  }
  return sum;
}

bool LpSolver::limits_hit(const LpLimits& limits, std::int64_t iter) const {
  if (limits.max_iterations >= 0 && iter >= limits.max_iterations) return true;
  if ((iter & 15) == 0 &&
      limits.deadline != std::chrono::steady_clock::time_point::max() &&
      std::chrono::steady_clock::now() >= limits.deadline) {
    return true;
  }
  return false;
}

LpStatus LpSolver::solve(const LpLimits& limits) {
  last_iterations_ = 0;
  const int total = n_ + m_;
  for (int j = 0; j < total; ++j) {
    if (lower_[idx(j)] > upper_[idx(j)] + tol_.primal_feasibility) {
      return LpStatus::kInfeasible;
    }
  }

  init_nonbasic_values();
  if (!refactor()) {
    reset_to_slack_basis();
    init_nonbasic_values();
    if (!refactor()) return LpStatus::kNumericFailure;
  }
  compute_basic_values();
  std::fill(weights_.begin(), weights_.end(), 1.0);

  const double ptol = tol_.primal_feasibility;
  const double dtol = tol_.dual_feasibility;
  std::vector<double> cb(idx(m_));
  std::vector<double> y(idx(m_));
  std::vector<double> col(idx(m_));
  std::vector<double> rho(idx(m_));
  std::vector<double> d(idx(total), 0.0);
  // Phase-2 reduced costs are updated from the pivot row between refactors.
  bool d_valid = false;
  int degenerate_run = 0;
  bool bland = false;
  bool need_refactor = false;
  int recoveries = 0;
  const std::int64_t iteration_cap = 50LL * (n_ + m_) + 10000;

  auto recover = [&]() {
    ++recoveries;
    reset_to_slack_basis();
    init_nonbasic_values();
    if (!refactor()) return false;
    compute_basic_values();
    std::fill(weights_.begin(), weights_.end(), 1.0);
    return true;
  };

  for (std::int64_t iter = 0;; ++iter) {
    if (limits_hit(limits, iter)) return LpStatus::kLimitReached;
    if (iter > iteration_cap) return LpStatus::kNumericFailure;

    if (need_refactor || factor_->num_updates() >= kRefactorInterval) {
      need_refactor = false;
      d_valid = false;
      if (!refactor()) {
        if (recoveries >= kMaxRecoveries || !recover()) return LpStatus::kNumericFailure;
      } else {
        compute_basic_values();
      }
    }

    bool phase1 = false;
    for (int p = 0; p < m_; ++p) {
      const int b = header_[idx(p)];
      const double xb = x_[idx(b)];
      if (xb < lower_[idx(b)] - ptol) {
        cb[idx(p)] = -1.0;
        phase1 = true;
      } else if (xb > upper_[idx(b)] + ptol) {
        cb[idx(p)] = 1.0;
        phase1 = true;
      } else {
        cb[idx(p)] = 0.0;
      }
    }
    if (phase1 || !d_valid) {
      if (!phase1) {
        for (int p = 0; p < m_; ++p) cb[idx(p)] = cost_[idx(header_[idx(p)])];
      }
      y = cb;
      factor_->btran(y);
      for (int j = 0; j < total; ++j) {
        const VarStatus st = status_[idx(j)];
        if (st == VarStatus::kBasic) continue;
        d[idx(j)] = (phase1 ? 0.0 : cost_[idx(j)]) - dot_column(j, y);
      }
      d_valid = !phase1;
    }

    // Pricing.
    int entering = -1;
    double entering_d = 0.0;
    double best_score = 0.0;
    for (int j = 0; j < total; ++j) {
      const VarStatus st = status_[idx(j)];
      if (st == VarStatus::kBasic || st == VarStatus::kFixed) continue;
      const double dj = d[idx(j)];
      const bool attractive = (st == VarStatus::kAtLower && dj < -dtol) ||
                              (st == VarStatus::kAtUpper && dj > dtol) ||
                              (st == VarStatus::kFree && std::abs(dj) > dtol);
      if (!attractive) continue;
      if (bland) {
        entering = j;
        entering_d = dj;
        break;
      }
      const double score = dj * dj / weights_[idx(j)];
      if (score > best_score) {
        best_score = score;
        entering = j;
        entering_d = dj;
      }
    }

    if (entering < 0) {
      if (factor_->num_updates() > 0) {
        // Confirm on a fresh factorization before declaring termination.
        need_refactor = true;
        continue;
      }
      if (phase1) return LpStatus::kInfeasible;
      duals_ = y;
      return LpStatus::kOptimal;
    }

    const double dir = entering_d < 0.0 ? 1.0 : -1.0;
    column_of(entering, col);
    factor_->ftran(col);

    // Harris two-pass ratio test (textbook min-ratio in Bland mode).
    double theta_max = kInfinity;
    for (int p = 0; p < m_; ++p) {
      const double a = col[idx(p)];
      if (std::abs(a) <= tol_.pivot) continue;
      const double delta = -dir * a;
      const int b = header_[idx(p)];
      const double xb = x_[idx(b)];
      const double lo = lower_[idx(b)];
      const double hi = upper_[idx(b)];
      const double relax = bland ? 0.0 : ptol;
      double r = kInfinity;
      if (delta < 0.0) {
        if (xb > hi + ptol) {
          r = (xb - hi + relax) / -delta;
        } else if (xb < lo - ptol || !std::isfinite(lo)) {
          continue;
        } else {
          r = (xb - lo + relax) / -delta;
        }
      } else {
        if (xb < lo - ptol) {
          r = (lo - xb + relax) / delta;
        } else if (xb > hi + ptol || !std::isfinite(hi)) {
          continue;
        } else {
          r = (hi - xb + relax) / delta;
        }
      }
      theta_max = std::min(theta_max, r);
    }

    int leave_pos = -1;
    double theta = kInfinity;
    double leave_value = 0.0;
    if (std::isfinite(theta_max)) {
      double best_pivot = 0.0;
      int best_var = -1;
      for (int p = 0; p < m_; ++p) {
        const double a = col[idx(p)];
        if (std::abs(a) <= tol_.pivot) continue;
        const double delta = -dir * a;
        const int b = header_[idx(p)];
        const double xb = x_[idx(b)];
        const double lo = lower_[idx(b)];
        const double hi = upper_[idx(b)];
        double target;
        if (delta < 0.0) {
          if (xb > hi + ptol) {
            target = hi;
          } else if (xb < lo - ptol || !std::isfinite(lo)) {
            continue;
          } else {
            target = lo;
          }
        } else {
          if (xb < lo - ptol) {
            target = lo;
          } else if (xb > hi + ptol || !std::isfinite(hi)) {
            continue;
          } else {
            target = hi;
          }
        }
        const double r = std::max(0.0, (target - xb) / delta);
        if (r > theta_max) continue;
        bool better;
        if (bland) {
          better = leave_pos < 0 || r < theta - 1e-12 ||
                   (r <= theta + 1e-12 && b < best_var);
        } else {
          better = std::abs(a) > best_pivot;
        }
        if (better) {
          best_pivot = std::abs(a);
          best_var = b;
          leave_pos = p;
          theta = r;
          leave_value = target;
        }
      }
    }

    const double lo_q = lower_[idx(entering)];
    const double hi_q = upper_[idx(entering)];
    const double flip_range =
        (std::isfinite(lo_q) && std::isfinite(hi_q)) ? hi_q - lo_q : kInfinity;

    if (leave_pos < 0 && !std::isfinite(flip_range)) {
      if (!phase1) return LpStatus::kUnbounded;
      if (recoveries >= kMaxRecoveries || !recover()) return LpStatus::kNumericFailure;
      continue;
    }

    ++last_iterations_;
    ++total_iterations_;

    const bool flip = flip_range <= theta;
    const double step = flip ? flip_range : theta;
    if (step * std::abs(entering_d) <= 1e-12) {
      if (++degenerate_run > kDegenerateBeforeBland) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    if (step != 0.0) {
      x_[idx(entering)] += dir * step;
      for (int p = 0; p < m_; ++p) {
        if (col[idx(p)] != 0.0) x_[idx(header_[idx(p)])] -= dir * col[idx(p)] * step;
      }
    }

    if (flip) {
      status_[idx(entering)] = dir > 0.0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
      x_[idx(entering)] = dir > 0.0 ? hi_q : lo_q;
      continue;
    }

    const int leaving = header_[idx(leave_pos)];
    const double alpha_rq = col[idx(leave_pos)];

    // Devex reference weights from the pivot row.
    std::fill(rho.begin(), rho.end(), 0.0);
    rho[idx(leave_pos)] = 1.0;
    factor_->btran(rho);
    const double row_alpha_q = dot_column(entering, rho);
    if (std::abs(row_alpha_q - alpha_rq) > 1e-9 * (1.0 + std::abs(alpha_rq))) {
      need_refactor = true;
    }
    const double w_q = weights_[idx(entering)];
    const double dual_step = entering_d / alpha_rq;
    for (int j = 0; j < total; ++j) {
      const VarStatus st = status_[idx(j)];
      if (st == VarStatus::kBasic || j == entering) continue;
      const double arj = dot_column(j, rho);
      if (arj == 0.0) continue;
      if (d_valid) d[idx(j)] -= dual_step * arj;
      if (st == VarStatus::kFixed) continue;
      const double ratio = arj / alpha_rq;
      weights_[idx(j)] = std::max(weights_[idx(j)], ratio * ratio * w_q);
    }
    weights_[idx(leaving)] = std::max(w_q / (alpha_rq * alpha_rq), 1.0);
    d[idx(leaving)] = -dual_step;
    d[idx(entering)] = 0.0;
    if (d_valid) {
      for (int i = 0; i < m_; ++i) y[idx(i)] += dual_step * rho[idx(i)];
    }

    x_[idx(leaving)] = leave_value;
    if (lower_[idx(leaving)] == upper_[idx(leaving)]) {
      status_[idx(leaving)] = VarStatus::kFixed;
    } else {
      status_[idx(leaving)] =
          leave_value == upper_[idx(leaving)] ? VarStatus::kAtUpper : VarStatus::kAtLower;
    }
    position_[idx(leaving)] = -1;
    header_[idx(leave_pos)] = entering;
    position_[idx(entering)] = leave_pos;
    status_[idx(entering)] = VarStatus::kBasic;
    factor_->update(leave_pos, col);
  }
}

}  // namespace lotsizing::mip
