#pragma once

#include <Eigen/Dense>

#include "khtrack/interval.hpp"

namespace kht {

// Non-certified complex matrix. Used for the preconditioner Y and for
// floating-point Newton/Euler steps; never part of a certified claim.
using PointMatrix = Eigen::MatrixXcd;

class IntervalMatrix {
 public:
  IntervalMatrix() = default;
  IntervalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static IntervalMatrix identity(std::size_t n);
  static IntervalMatrix from_point(const PointMatrix& a);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const ComplexInterval& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }
  ComplexInterval& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

  bool contains(const PointMatrix& a) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<ComplexInterval> entries_;
};

// Upper bound on max_{A in M} ||A||_inf: the largest row sum of entry
// magnitudes, accumulated with upward rounding.
double inorm(const IntervalMatrix& m);

struct InverseResult {
  PointMatrix inverse;
  double residual = 0.0;  // ||A*Y - 1||_inf in floating point
};

// LU with partial pivoting. Throws kSingularMatrix for a pivot below 1e-300
// or a non-finite result.
InverseResult mid_inverse(const PointMatrix& a);

// 1 - Y*M, all in interval arithmetic.
IntervalMatrix residual_matrix(const PointMatrix& y, const IntervalMatrix& m);

Box imatvec(const IntervalMatrix& m, const Box& v);
// Point matrix times interval vector.
Box pmatvec(const PointMatrix& y, const Box& v);

// Floating-point solve of A x = b by partial-pivot LU; same singularity rule
// as mid_inverse.
Eigen::VectorXcd solve_point(const PointMatrix& a, const Eigen::VectorXcd& b);

// Floating-point helpers shared by the predictor/corrector code.
Eigen::VectorXcd to_eigen(std::span<const Complex> x);
PointVector from_eigen(const Eigen::VectorXcd& v);
double inf_norm(std::span<const Complex> x);

}  // namespace kht
