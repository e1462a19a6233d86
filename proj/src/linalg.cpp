#include "khtrack/linalg.hpp"

#include <cmath>

namespace kht {

IntervalMatrix IntervalMatrix::identity(std::size_t n) {
  IntervalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = ComplexInterval(1.0);
  return m;
}

IntervalMatrix IntervalMatrix::from_point(const PointMatrix& a) {
  IntervalMatrix m(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = ComplexInterval(a(i, j));
  return m;
}

bool IntervalMatrix::contains(const PointMatrix& a) const {
  if (static_cast<std::size_t>(a.rows()) != rows_ || static_cast<std::size_t>(a.cols()) != cols_)
    return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (!(*this)(i, j).contains(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))))
        return false;
  return true;
}

double inorm(const IntervalMatrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) row = rounding::add_up(row, m(i, j).mag());
    best = std::max(best, row);
  }
  return best;
}

InverseResult mid_inverse(const PointMatrix& a) {
  if (a.rows() != a.cols())
    throw Error(ErrorCode::kDimensionMismatch, "mid_inverse needs a square matrix");
  const Eigen::PartialPivLU<PointMatrix> lu(a);
  const auto& packed = lu.matrixLU();
  for (Eigen::Index i = 0; i < packed.rows(); ++i)
    if (!(std::abs(packed(i, i)) >= 1e-300))
      throw Error(ErrorCode::kSingularMatrix, "pivot magnitude below 1e-300");
  InverseResult out;
  out.inverse = lu.inverse();
  if (!out.inverse.allFinite()) throw Error(ErrorCode::kSingularMatrix, "non-finite inverse");
  const PointMatrix r = a * out.inverse - PointMatrix::Identity(a.rows(), a.cols());
  out.residual = r.rowwise().lpNorm<1>().maxCoeff();
  return out;
}

Eigen::VectorXcd solve_point(const PointMatrix& a, const Eigen::VectorXcd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw Error(ErrorCode::kDimensionMismatch, "solve_point: non-conformable system");
  const Eigen::PartialPivLU<PointMatrix> lu(a);
  const auto& packed = lu.matrixLU();
  for (Eigen::Index i = 0; i < packed.rows(); ++i)
    if (!(std::abs(packed(i, i)) >= 1e-300))
      throw Error(ErrorCode::kSingularMatrix, "pivot magnitude below 1e-300");
  Eigen::VectorXcd x = lu.solve(b);
  if (!x.allFinite()) throw Error(ErrorCode::kSingularMatrix, "non-finite solution");
  return x;
}

IntervalMatrix residual_matrix(const PointMatrix& y, const IntervalMatrix& m) {
  const auto n = static_cast<std::size_t>(y.rows());
  if (static_cast<std::size_t>(y.cols()) != m.rows() || m.rows() != m.cols() || m.rows() != n)
    throw Error(ErrorCode::kDimensionMismatch, "residual_matrix needs conformable squares");
  IntervalMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ComplexInterval acc(i == j ? 1.0 : 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        const Complex yik = y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        if (yik == Complex(0.0, 0.0)) continue;
        acc = acc - ComplexInterval(yik) * m(k, j);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Box imatvec(const IntervalMatrix& m, const Box& v) {
  if (m.cols() != v.size())
    throw Error(ErrorCode::kDimensionMismatch, "imatvec: matrix/vector size mismatch");
  Box out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ComplexInterval acc(0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) acc = acc + m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

Box pmatvec(const PointMatrix& y, const Box& v) {
  if (static_cast<std::size_t>(y.cols()) != v.size())
    throw Error(ErrorCode::kDimensionMismatch, "pmatvec: matrix/vector size mismatch");
  Box out(static_cast<std::size_t>(y.rows()));
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    ComplexInterval acc(0.0);
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      acc = acc + ComplexInterval(y(i, j)) * v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

Eigen::VectorXcd to_eigen(std::span<const Complex> x) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = x[i];
  return v;
}

PointVector from_eigen(const Eigen::VectorXcd& v) { return PointVector(v.data(), v.data() + v.size()); }

double inf_norm(std::span<const Complex> x) {
  double n = 0.0;
  for (const auto& z : x) n = std::max(n, std::abs(z));
  return n;
}

}  // namespace kht
