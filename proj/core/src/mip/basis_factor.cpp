#include "mip/basis_factor.hpp"

#include <cmath>

namespace lotsizing::mip::internal {

namespace {
constexpr double kEtaDropTolerance = 1e-14;
}

BasisFactor::BasisFactor(const CscMatrix& a) : a_(a), m_(a.rows) {}

bool BasisFactor::factorize(std::span<const int> header) {
  header_.assign(header.begin(), header.end());
  etas_.clear();
  logical_position_.assign(static_cast<std::size_t>(m_), -1);
  kernel_positions_.clear();
  kernel_rows_.clear();
  row_to_kernel_.assign(static_cast<std::size_t>(m_), -1);

  for (int p = 0; p < m_; ++p) {
    const int var = header_[static_cast<std::size_t>(p)];
    if (var >= a_.cols) {
      const int row = var - a_.cols;
      if (logical_position_[static_cast<std::size_t>(row)] != -1) return false;
      logical_position_[static_cast<std::size_t>(row)] = p;
    } else {
      kernel_positions_.push_back(p);
    }
  }
  for (int i = 0; i < m_; ++i) {
    if (logical_position_[static_cast<std::size_t>(i)] == -1) {
      row_to_kernel_[static_cast<std::size_t>(i)] = static_cast<int>(kernel_rows_.size());
      kernel_rows_.push_back(i);
    }
  }
  const int k = kernel_size();
  if (static_cast<int>(kernel_positions_.size()) != k) return false;
  if (k == 0) return true;

  std::vector<Eigen::Triplet<double>> triplets;
  for (int c = 0; c < k; ++c) {
    const int var = header_[static_cast<std::size_t>(kernel_positions_[static_cast<std::size_t>(c)])];
    for (int e = a_.start[static_cast<std::size_t>(var)];
         e < a_.start[static_cast<std::size_t>(var) + 1]; ++e) {
      const int r = row_to_kernel_[static_cast<std::size_t>(a_.index[static_cast<std::size_t>(e)])];
      if (r >= 0) triplets.emplace_back(r, c, a_.value[static_cast<std::size_t>(e)]);
    }
  }
  Eigen::SparseMatrix<double> kernel(k, k);
  kernel.setFromTriplets(triplets.begin(), triplets.end());
  kernel.makeCompressed();
  lu_.analyzePattern(kernel);
  lu_.factorize(kernel);
  if (lu_.info() != Eigen::Success) return false;
  work_in_.resize(k);
  work_out_.resize(k);
  return true;
}

void BasisFactor::ftran(std::vector<double>& v) const {
  std::vector<double> z(static_cast<std::size_t>(m_), 0.0);
  const int k = kernel_size();
  if (k > 0) {
    for (int r = 0; r < k; ++r) work_in_[r] = v[static_cast<std::size_t>(kernel_rows_[static_cast<std::size_t>(r)])];
    work_out_ = lu_.solve(work_in_);
    for (int c = 0; c < k; ++c) {
      z[static_cast<std::size_t>(kernel_positions_[static_cast<std::size_t>(c)])] = work_out_[c];
    }
  }
  for (int i = 0; i < m_; ++i) {
    const int p = logical_position_[static_cast<std::size_t>(i)];
    if (p >= 0) z[static_cast<std::size_t>(p)] = v[static_cast<std::size_t>(i)];
  }
  for (int c = 0; c < k; ++c) {
    const double zc = work_out_[c];
    if (zc == 0.0) continue;
    const int var = header_[static_cast<std::size_t>(kernel_positions_[static_cast<std::size_t>(c)])];
    for (int e = a_.start[static_cast<std::size_t>(var)];
         e < a_.start[static_cast<std::size_t>(var) + 1]; ++e) {
      const int p = logical_position_[static_cast<std::size_t>(a_.index[static_cast<std::size_t>(e)])];
      if (p >= 0) z[static_cast<std::size_t>(p)] -= a_.value[static_cast<std::size_t>(e)] * zc;
    }
  }
  for (const Eta& eta : etas_) {
    double& zp = z[static_cast<std::size_t>(eta.position)];
    if (zp == 0.0) continue;
    zp /= eta.pivot;
    const double pivot_value = zp;
    for (std::size_t e = 0; e < eta.index.size(); ++e) {
      z[static_cast<std::size_t>(eta.index[e])] -= eta.value[e] * pivot_value;
    }
  }
  v.swap(z);
}

void BasisFactor::btran(std::vector<double>& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double sum = v[static_cast<std::size_t>(it->position)];
    for (std::size_t e = 0; e < it->index.size(); ++e) {
      sum -= it->value[e] * v[static_cast<std::size_t>(it->index[e])];
    }
    v[static_cast<std::size_t>(it->position)] = sum / it->pivot;
  }

  std::vector<double> w(static_cast<std::size_t>(m_), 0.0);
  for (int i = 0; i < m_; ++i) {
    const int p = logical_position_[static_cast<std::size_t>(i)];
    if (p >= 0) w[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(p)];
  }
  const int k = kernel_size();
  if (k > 0) {
    for (int c = 0; c < k; ++c) {
      const int p = kernel_positions_[static_cast<std::size_t>(c)];
      const int var = header_[static_cast<std::size_t>(p)];
      double rhs = v[static_cast<std::size_t>(p)];
      for (int e = a_.start[static_cast<std::size_t>(var)];
           e < a_.start[static_cast<std::size_t>(var) + 1]; ++e) {
        const int row = a_.index[static_cast<std::size_t>(e)];
        if (logical_position_[static_cast<std::size_t>(row)] >= 0) {
          rhs -= a_.value[static_cast<std::size_t>(e)] * w[static_cast<std::size_t>(row)];
        }
      }
      work_in_[c] = rhs;
    }
    work_out_ = lu_.transpose().solve(work_in_);
    for (int r = 0; r < k; ++r) {
      w[static_cast<std::size_t>(kernel_rows_[static_cast<std::size_t>(r)])] = work_out_[r];
    }
  }
  v.swap(w);
}

void BasisFactor::update(int position, std::span<const double> alpha) {
  Eta eta;
  eta.position = position;
  eta.pivot = alpha[static_cast<std::size_t>(position)];
  for (int i = 0; i < m_; ++i) {
    if (i == position) continue;
    const double a = alpha[static_cast<std::size_t>(i)];
    if (std::abs(a) > kEtaDropTolerance) {
      eta.index.push_back(i);
      eta.value.push_back(a);
    }
  }
  etas_.push_back(std::move(eta));
}

}  // namespace lotsizing::mip::internal
