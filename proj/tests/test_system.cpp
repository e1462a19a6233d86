#include <doctest.h>

#include <cmath>

#include "khtrack/benchmarks.hpp"
#include "oracle.hpp"

using namespace kht;
using oracle::BigComplex;

namespace {

Box random_box(oracle::Gen& gen, std::size_t n, double scale, double r) {
  PointVector c(n);
  for (auto& z : c) z = gen.complex(scale);
  return box_centered(c, r);
}

RealInterval random_time(oracle::Gen& gen) {
  const double a = gen.uniform(0.0, 0.9);
  return {a, a + gen.uniform(0.0, 0.1)};
}

Homotopy random_quadratic_homotopy(std::uint64_t seed) {
  // Replace the decoupled start parameters with random ones so both ends are generic.
  Problem p = gen_random_quadratic(3, seed);
  oracle::Gen gen(seed + 100);
  PointVector p0(p.homotopy.p0().size());
  for (auto& z : p0) z = gen.complex();
  return Homotopy(p.homotopy.system_ptr(), p0, p.homotopy.p1());
}

}  // namespace

TEST_CASE("newton homotopy evaluation") {
  const Homotopy h = gen_newton_homotopy(10).homotopy;
  const PointVector one{Complex(1.0)};
  CHECK(eval_point(h, one, 1.0)[0] == Complex(0.0));
  CHECK(jac_x_point(h, one, 1.0)(0, 0) == Complex(2.0));
  const PointVector x0{Complex(std::sqrt(11.0))};
  CHECK(std::abs(eval_point(h, x0, 0.0)[0]) < 1e-14);
  // F1(x; m) = m, independent of x.
  const PointVector dp{Complex(10.0)};
  CHECK(f1_eval(h.system(), one, dp)[0] == Complex(10.0));
  CHECK(f1_eval(h.system(), x0, dp)[0] == Complex(10.0));
}

TEST_CASE("point evaluation matches an independent evaluator") {
  oracle::Gen gen(31);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Homotopy h = random_quadratic_homotopy(seed);
    for (int k = 0; k < 50; ++k) {
      const PointVector x{gen.complex(2.0), gen.complex(2.0), gen.complex(2.0)};
      const double t = gen.uniform(0.0, 1.0);
      const PointVector v = eval_point(h, x, t);
      const auto ref = oracle::eval(h, x, t);
      for (std::size_t i = 0; i < 3; ++i) {
        const Complex r(ref[i].re.to_double(), ref[i].im.to_double());
        CHECK(std::abs(v[i] - r) <= 1e-12 * (1.0 + std::abs(r)));
      }
    }
  }
}

TEST_CASE("interval evaluation encloses sampled values") {
  oracle::Gen gen(41);
  for (const TimeExtension ext : {TimeExtension::kTaylor, TimeExtension::kNaive}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Homotopy h = random_quadratic_homotopy(seed);
      for (int trial = 0; trial < 10; ++trial) {
        const Box box = random_box(gen, 3, 1.5, gen.uniform(1e-4, 0.3));
        const RealInterval time = random_time(gen);
        const Box value = eval_interval(h, box, time, ext);
        const IntervalMatrix jac = jac_x_interval(h, box, time, ext);
        for (int s = 0; s < 100; ++s) {
          const PointVector x{gen.in(box[0]), gen.in(box[1]), gen.in(box[2])};
          const double t = gen.in(time);
          const auto ref = oracle::eval(h, x, t);
          for (std::size_t i = 0; i < 3; ++i) {
            CHECK(oracle::contains(value[i], ref[i]));
            for (std::size_t j = 0; j < 3; ++j) CHECK(oracle::contains(jac(i, j), oracle::jac(h, x, t, i, j)));
          }
        }
      }
    }
  }
}

TEST_CASE("degenerate interval evaluation") {
  const Homotopy h = gen_newton_homotopy(10).homotopy;
  const PointVector one{Complex(1.0)};
  const Box at_root = point_box(one);
  CHECK(eval_interval(h, at_root, RealInterval(1.0))[0].contains(Complex(0.0)));

  oracle::Gen gen(5);
  const Homotopy q = random_quadratic_homotopy(2);
  const PointVector x{gen.complex(), gen.complex(), gen.complex()};
  const IntervalMatrix ij = jac_x_interval(q, point_box(x), RealInterval(0.3));
  CHECK(ij.contains(jac_x_point(q, x, 0.3)));
}

TEST_CASE("time enclosure of the newton homotopy at a refined point") {
  // With I = [x*] and T = [t0, t0 + dt], |H| <= dt * |F1(x*; p1 - p0)| = dt * m.
  for (const double m : {10.0, 40.0, 100.0, 2000.0}) {
    const Homotopy h = gen_newton_homotopy(m).homotopy;
    const double t0 = 0.25;
    const double dt = 0.02;
    const PointVector x{Complex(std::sqrt(1.0 + m - m * t0))};
    const Box v = eval_interval(h, point_box(x), RealInterval(t0, t0 + dt));
    CHECK(v[0].mag() <= dt * m * (1 + 1e-12) + 1e-12);
  }
}

TEST_CASE("finite-difference jacobian") {
  oracle::Gen gen(17);
  const Homotopy h = random_quadratic_homotopy(4);
  const double step = 1e-7;
  for (int k = 0; k < 10; ++k) {
    const PointVector x{gen.complex(), gen.complex(), gen.complex()};
    const double t = gen.uniform(0, 1);
    const PointMatrix j = jac_x_point(h, x, t);
    for (std::size_t c = 0; c < 3; ++c) {
      PointVector xp = x, xm = x;
      xp[c] += step;
      xm[c] -= step;
      const PointVector fp = eval_point(h, xp, t), fm = eval_point(h, xm, t);
      for (std::size_t r = 0; r < 3; ++r) {
        const Complex fd = (fp[r] - fm[r]) / (2 * step);
        const Complex an = j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
      }
    }
  }
}

TEST_CASE("f1 is linear in dp") {
  oracle::Gen gen(23);
  const Homotopy h = random_quadratic_homotopy(1);
  const std::size_t m = h.system().m();
  const PointVector x{gen.complex(), gen.complex(), gen.complex()};
  const PointVector zero(m, Complex(0.0));
  for (const Complex& v : f1_eval(h.system(), x, zero)) CHECK(v == Complex(0.0));
  for (int k = 0; k < 20; ++k) {
    PointVector dp(m);
    for (auto& z : dp) z = gen.complex();
    const double a = gen.uniform(-3, 3);
    PointVector adp(m);
    for (std::size_t i = 0; i < m; ++i) adp[i] = a * dp[i];
    const PointVector f = f1_eval(h.system(), x, dp);
    const PointVector fa = f1_eval(h.system(), x, adp);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(fa[i] - a * f[i]) <= 1e-12 * (1 + std::abs(fa[i])));
  }
  CHECK_THROWS_AS(f1_eval(h.system(), x, PointVector(m + 1)), Error);
}

TEST_CASE("shear") {
  oracle::Gen gen(29);
  const Homotopy h = random_quadratic_homotopy(3);
  const PointVector zero(3, Complex(0.0));
  const Homotopy flat = apply_shear(h, zero, zero, 0.2, 0.4);
  for (int k = 0; k < 20; ++k) {
    const PointVector x{gen.complex(), gen.complex(), gen.complex()};
    const double t = gen.uniform(0, 1);
    CHECK(eval_point(flat, x, t) == eval_point(h, x, t));
  }

  try {
    (void)apply_shear(h, zero, zero, 0.4, 0.4);
    FAIL("expected DegenerateTimeInterval");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateTimeInterval);
  }

  // Direct substitution: H^(y, t) = H(y + s(t), t).
  const PointVector x0{gen.complex(), gen.complex(), gen.complex()};
  const PointVector x1{gen.complex(), gen.complex(), gen.complex()};
  const Homotopy sh = apply_shear(h, x0, x1, 0.3, 0.35);
  for (int k = 0; k < 1000; ++k) {
    const PointVector y{gen.complex(0.1), gen.complex(0.1), gen.complex(0.1)};
    const double t = gen.uniform(0, 1);
    const PointVector s = sh.shift_at(t);
    PointVector x(3);
    for (std::size_t i = 0; i < 3; ++i) x[i] = y[i] + s[i];
    const PointVector a = eval_point(sh, y, t), b = eval_point(h, x, t);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12 * (1 + std::abs(b[i])));
  }

  // Sheared interval extensions enclose the substituted values.
  for (const TimeExtension ext : {TimeExtension::kTaylor, TimeExtension::kNaive}) {
    const Box box = box_centered(zero, 0.05);
    const RealInterval time(0.3, 0.35);
    const Box v = eval_interval(sh, box, time, ext);
    const IntervalMatrix j = jac_x_interval(sh, box, time, ext);
    for (int k = 0; k < 500; ++k) {
      const PointVector y{gen.in(box[0]), gen.in(box[1]), gen.in(box[2])};
      const double t = gen.in(time);
      const auto x = oracle::unshear(sh, y, t);
      const auto ref = oracle::eval(sh, x, t);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(oracle::contains(v[i], ref[i]));
        for (std::size_t c = 0; c < 3; ++c) CHECK(oracle::contains(j(i, c), oracle::jac(sh, x, t, i, c)));
      }
    }
  }
}

TEST_CASE("shear through refined roots vanishes at both ends") {
  const Homotopy h = gen_newton_homotopy(10).homotopy;
  const PointVector x0{Complex(std::sqrt(11.0))};
  const PointVector x1{Complex(std::sqrt(11.0 - 10.0 * 0.02))};
  const Homotopy sh = apply_shear(h, x0, x1, 0.0, 0.02);
  const PointVector origin{Complex(0.0)};
  CHECK(std::abs(eval_point(sh, origin, 0.0)[0]) < 1e-13);
  CHECK(std::abs(eval_point(sh, origin, 0.02)[0]) < 1e-13);

  // Along the chord of a concave path, H^(0, t) = s(t)^2 - x(t)^2 lies in
  // [-dx^2 / 4, 0] with dx = x1 - x0; the local-time extension resolves this
  // up to rounding, the naive one does not.
  const double dx = x1[0].real() - x0[0].real();
  const Box taylor = eval_interval(sh, point_box(origin), RealInterval(0.0, 0.02));
  const Box naive = eval_interval(sh, point_box(origin), RealInterval(0.0, 0.02), TimeExtension::kNaive);
  CHECK(taylor[0].re().lo() >= -dx * dx / 4 - 1e-13);
  CHECK(taylor[0].re().hi() <= 1e-13);
  CHECK(naive[0].re().width() > 10 * taylor[0].re().width());
}

TEST_CASE("dimension checks") {
  const Homotopy h = random_quadratic_homotopy(1);
  const PointVector two(2, Complex(0.0));
  CHECK_THROWS_AS(eval_point(h, two, 0.0), Error);
  CHECK_THROWS_AS(jac_x_point(h, two, 0.0), Error);
  CHECK_THROWS_AS(eval_interval(h, point_box(two), RealInterval(0.0)), Error);
  CHECK_THROWS_AS(jac_x_interval(h, point_box(two), RealInterval(0.0)), Error);
}
