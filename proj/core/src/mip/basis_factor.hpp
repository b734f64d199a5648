// LU factorization of a simplex basis [A | I]_B with product-form updates.
//
// Logical columns in the basis are unit vectors, so only the "kernel" (rows
// not covered by a basic logical x basic structural columns) needs a real
// factorization. Everything else is a triangular substitution.

#pragma once

#include <span>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace lotsizing::mip::internal {

// Column-compressed structural matrix.
struct CscMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> start;  // cols + 1
  std::vector<int> index;
  std::vector<double> value;
};

class BasisFactor {
 public:
  explicit BasisFactor(const CscMatrix& a);

  // header[p] is the variable basic at position p; ids >= a.cols are
  // logicals (id - a.cols is their row). Returns false if the basis is
  // structurally or numerically singular.
  bool factorize(std::span<const int> header);

  // In: right-hand side in row space. Out: B^{-1} v in position space.
  void ftran(std::vector<double>& v) const;

  // In: vector in position space. Out: B^{-T} v in row space.
  void btran(std::vector<double>& v) const;

  // Replace the column at `position` by the entering column whose FTRAN
  // result is `alpha`.
  void update(int position, std::span<const double> alpha);

  int num_updates() const { return static_cast<int>(etas_.size()); }
  int kernel_size() const { return static_cast<int>(kernel_rows_.size()); }

 private:
  struct Eta {
    int position = 0;
    double pivot = 1.0;
    std::vector<int> index;
    std::vector<double> value;
  };

  const CscMatrix& a_;
  int m_;
  std::vector<int> header_;
  std::vector<int> logical_position_;  // row -> position of its logical, or -1
  std::vector<int> kernel_rows_;       // kernel row -> row
  std::vector<int> kernel_positions_;  // kernel column -> basis position
  std::vector<int> row_to_kernel_;     // row -> kernel row, or -1

  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  mutable Eigen::VectorXd work_in_;
  mutable Eigen::VectorXd work_out_;
  std::vector<Eta> etas_;
};

}  // namespace lotsizing::mip::internal
