#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "chdd/core.hpp"

namespace chdd {

// One block row of a block tridiagonal matrix: lower couples to the previous
// line, upper to the next one.
struct BlockRow {
  Eigen::MatrixXd diag;
  Eigen::SparseMatrix<double> lower;
  Eigen::SparseMatrix<double> upper;
};

// Block LU without inter-block pivoting. Rows are assembled one line at a
// time so that only the factors are ever held in memory.
class BlockTridiagonalLU {
 public:
  using RowAssembler = std::function<void(int line, BlockRow& row)>;

  BlockTridiagonalLU() = default;

  BlockTridiagonalLU(int lines, int block, const RowAssembler& assemble)
      : lines_(lines), block_(block) {
    lu_.reserve(lines);
    lower_.resize(lines);
    upper_.resize(lines);
    BlockRow row;
    for (int i = 0; i < lines; ++i) {
      row.diag.setZero(block, block);
      row.lower.resize(block, block);
      row.upper.resize(block, block);
      row.lower.setZero();
      row.upper.setZero();
      assemble(i, row);
      Eigen::MatrixXd d = std::move(row.diag);
      if (i > 0 && row.lower.nonZeros() > 0 && upper_[i - 1].nonZeros() > 0) {
        Eigen::MatrixXd rhs = Eigen::MatrixXd(upper_[i - 1]);
        Eigen::MatrixXd x = lu_[i - 1].solve(rhs);
        d -= row.lower * x;
      }
      lu_.emplace_back(d);
      const double rc = lu_.back().rcond();
      if (!(rc > 0) || !std::isfinite(rc)) {
        throw SolverError("singular block in block tridiagonal factorization", infinity());
      }
      min_rcond_ = std::min(min_rcond_, rc);
      lower_[i] = std::move(row.lower);
      upper_[i] = std::move(row.upper);
    }
  }

  int lines() const { return lines_; }
  int block() const { return block_; }

  // Reciprocal of the worst per-block condition estimate after elimination.
  double condition_estimate() const { return 1.0 / min_rcond_; }

  void solve_in_place(std::span<double> x) const {
    const int m = block_;
    auto seg = [&](int i) { return Eigen::Map<Eigen::VectorXd>(x.data() + std::size_t(i) * m, m); };
    Eigen::VectorXd tmp(m);
    for (int i = 1; i < lines_; ++i) {
      if (lower_[i].nonZeros() == 0) continue;
      tmp = lu_[i - 1].solve(seg(i - 1));
      seg(i) -= lower_[i] * tmp;
    }
    for (int i = lines_ - 1; i >= 0; --i) {
      tmp = seg(i);
      if (i + 1 < lines_ && upper_[i].nonZeros() > 0) tmp -= upper_[i] * seg(i + 1);
      seg(i) = lu_[i].solve(tmp);
    }
    for (double v : x) {
      if (!std::isfinite(v)) throw SolverError("non-finite solution", condition_estimate());
    }
  }

 private:
  static double infinity() { return std::numeric_limits<double>::infinity(); }

  int lines_ = 0;
  int block_ = 0;
  double min_rcond_ = 1.0;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  std::vector<Eigen::SparseMatrix<double>> lower_;
  std::vector<Eigen::SparseMatrix<double>> upper_;
};

}  // namespace chdd
