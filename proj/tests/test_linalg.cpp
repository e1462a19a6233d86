#include <doctest.h>

#include "khtrack/linalg.hpp"
#include "oracle.hpp"

using namespace kht;
using oracle::BigComplex;

namespace {

PointMatrix random_matrix(oracle::Gen& gen, int n, double scale = 1.0) {
  PointMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gen.complex(scale);
  return a;
}

IntervalMatrix random_interval_matrix(oracle::Gen& gen, std::size_t n) {
  IntervalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = gen.complex_interval();
  return m;
}

}  // namespace

TEST_CASE("inorm") {
  CHECK(inorm(IntervalMatrix::identity(3)) == 1.0);
  IntervalMatrix one(1, 1);
  one(0, 0) = ComplexInterval(RealInterval(-2, 2), RealInterval(0));
  CHECK(inorm(one) == 2.0);

  oracle::Gen gen(21);
  for (int k = 0; k < 200; ++k) {
    const PointMatrix a = random_matrix(gen, 3, 5.0);
    double best = 0.0;
    for (int i = 0; i < 3; ++i) best = std::max(best, a.row(i).cwiseAbs().sum());
    CHECK(inorm(IntervalMatrix::from_point(a)) >= best);
  }
}

TEST_CASE("mid_inverse") {
  const PointMatrix id = PointMatrix::Identity(4, 4);
  CHECK(mid_inverse(id).inverse == id);

  PointMatrix d = PointMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = Complex(0, 4);
  const PointMatrix inv = mid_inverse(d).inverse;
  CHECK(inv(0, 0) == Complex(0.5, 0));
  CHECK(inv(1, 1) == Complex(0, -0.25));
  CHECK(inv(0, 1) == Complex(0, 0));

  oracle::Gen gen(4);
  for (int k = 0; k < 100; ++k) {
    PointMatrix a = random_matrix(gen, 5);
    a += 5.0 * PointMatrix::Identity(5, 5);
    const InverseResult r = mid_inverse(a);
    CHECK(r.residual < 1e-12);
    const double res = (a * r.inverse - PointMatrix::Identity(5, 5)).cwiseAbs().rowwise().sum().maxCoeff();
    CHECK(res < 1e-12);
  }

  CHECK_THROWS_AS(mid_inverse(PointMatrix::Zero(3, 3)), Error);
  PointMatrix rank1(2, 2);
  rank1 << 1.0, 2.0, 2.0, 4.0;
  try {
    mid_inverse(rank1);
    FAIL("expected SingularMatrix");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularMatrix);
  }
}

TEST_CASE("residual_matrix") {
  oracle::Gen gen(8);
  PointMatrix a = random_matrix(gen, 3) + 3.0 * PointMatrix::Identity(3, 3);
  const PointMatrix y = mid_inverse(a).inverse;
  const IntervalMatrix r = residual_matrix(y, IntervalMatrix::from_point(a));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(r(i, j).mag() <= 1e-10);

  const IntervalMatrix z = residual_matrix(PointMatrix::Zero(3, 3), random_interval_matrix(gen, 3));
  CHECK(z.contains(PointMatrix::Identity(3, 3)));

  for (int k = 0; k < 200; ++k) {
    const IntervalMatrix m = random_interval_matrix(gen, 3);
    const PointMatrix yy = random_matrix(gen, 3, 2.0);
    const IntervalMatrix rm = residual_matrix(yy, m);
    for (int s = 0; s < 5; ++s) {
      PointMatrix sample(3, 3);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) sample(i, j) = gen.in(m(i, j));
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          BigComplex acc(Complex(i == j ? 1.0 : 0.0, 0.0));
          for (std::size_t l = 0; l < 3; ++l)
            acc = acc - BigComplex(yy(i, l)) * BigComplex(sample(l, j));
          CHECK(oracle::contains(rm(i, j), acc));
        }
    }
  }

  CHECK_THROWS_AS(residual_matrix(PointMatrix::Zero(2, 3), IntervalMatrix::identity(2)), Error);
}

TEST_CASE("imatvec and pmatvec") {
  oracle::Gen gen(12);
  Box v(3);
  for (std::size_t i = 0; i < 3; ++i) v[i] = gen.complex_interval();
  CHECK(box_contains(imatvec(IntervalMatrix::identity(3), v), v));
  const Box z = imatvec(IntervalMatrix(3, 3), v);
  for (std::size_t i = 0; i < 3; ++i) CHECK(z[i] == ComplexInterval(0.0));

  for (int k = 0; k < 200; ++k) {
    const IntervalMatrix m = random_interval_matrix(gen, 3);
    Box x(3);
    for (std::size_t i = 0; i < 3; ++i) x[i] = gen.complex_interval();
    const Box r = imatvec(m, x);
    const PointMatrix y = random_matrix(gen, 3, 3.0);
    const Box q = pmatvec(y, x);
    for (int s = 0; s < 5; ++s) {
      PointVector xs(3);
      for (std::size_t i = 0; i < 3; ++i) xs[i] = gen.in(x[i]);
      for (std::size_t i = 0; i < 3; ++i) {
        BigComplex acc, accy;
        for (std::size_t j = 0; j < 3; ++j) {
          acc = acc + BigComplex(gen.in(m(i, j))) * BigComplex(xs[j]);
          accy = accy + BigComplex(y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) *
                            BigComplex(xs[j]);
        }
        CHECK(oracle::contains(r[i], acc));
        CHECK(oracle::contains(q[i], accy));
      }
    }
  }
  CHECK_THROWS_AS(imatvec(IntervalMatrix::identity(2), v), Error);
}

TEST_CASE("solve_point") {
  oracle::Gen gen(2);
  const PointMatrix a = random_matrix(gen, 4) + 4.0 * PointMatrix::Identity(4, 4);
  Eigen::VectorXcd x(4);
  for (int i = 0; i < 4; ++i) x(i) = gen.complex();
  const Eigen::VectorXcd sol = solve_point(a, a * x);
  CHECK((sol - x).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(solve_point(PointMatrix::Zero(2, 2), Eigen::VectorXcd::Ones(2)), Error);
}
