#include <doctest.h>

#include <cmath>
#include <limits>

#include "khtrack/interval.hpp"
#include "oracle.hpp"

using namespace kht;
using oracle::Big;
using oracle::BigComplex;

namespace {

bool raises(ErrorCode code, auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("real interval arithmetic on small cases") {
  const RealInterval s = RealInterval(1, 2) + RealInterval(3, 4);
  CHECK(s.lo() == 4.0);
  CHECK(s.hi() == 6.0);

  const double a = 0.1;
  const RealInterval p = RealInterval(a) * RealInterval(1.0);
  CHECK(p.contains(a));
  CHECK(p.hi() <= std::nextafter(std::nextafter(p.lo(), 1.0), 1.0));

  const RealInterval q = RealInterval(1, 2) * RealInterval(-3, 4);
  CHECK(q.contains(RealInterval(-6, 8)));
  CHECK(q == RealInterval(-6, 8));

  CHECK(RealInterval(1, 3).width() == 2.0);
  CHECK(sqr(RealInterval(-1, 2)) == RealInterval(0, 4));
  CHECK(hull(RealInterval(0, 1), RealInterval(3, 4)) == RealInterval(0, 4));
}

TEST_CASE("real interval errors") {
  CHECK(raises(ErrorCode::kDivisionByIntervalContainingZero,
               [] { (void)(RealInterval(1, 2) / RealInterval(-1, 1)); }));
  CHECK(raises(ErrorCode::kNonFiniteEndpoint,
               [] { (void)(RealInterval(1e308) * RealInterval(10.0)); }));
  CHECK(raises(ErrorCode::kNonFiniteEndpoint,
               [] { (void)RealInterval(std::numeric_limits<double>::quiet_NaN()); }));
  CHECK(raises(ErrorCode::kNonFiniteEndpoint,
               [] { (void)RealInterval(0.0, std::numeric_limits<double>::infinity()); }));
  CHECK(raises(ErrorCode::kInvalidArgument, [] { (void)RealInterval(2.0, 1.0); }));
}

TEST_CASE("rounding is outward and tight against directed MPFR rounding") {
  oracle::Gen gen(7);
  for (int i = 0; i < 20000; ++i) {
    const RealInterval a = gen.interval();
    const RealInterval b = gen.interval();
    CHECK((a + b) == oracle::tight(oracle::Op::kAdd, a, b));
    CHECK((a - b) == oracle::tight(oracle::Op::kSub, a, b));
    CHECK((a * b) == oracle::tight(oracle::Op::kMul, a, b));
    const RealInterval c = gen.interval_without_zero();
    CHECK((a / c) == oracle::tight(oracle::Op::kDiv, a, c));
  }
}

TEST_CASE("exact operations stay exact") {
  CHECK((RealInterval(0.5) + RealInterval(0.25)).is_point());
  CHECK((RealInterval(3.0) * RealInterval(7.0)).is_point());
  CHECK((RealInterval(1.0) / RealInterval(4.0)).is_point());
  const RealInterval third = RealInterval(1.0) / RealInterval(3.0);
  CHECK(!third.is_point());
  CHECK(std::nextafter(third.lo(), 1.0) == third.hi());
}

TEST_CASE("complex interval arithmetic") {
  const ComplexInterval one(RealInterval(1), RealInterval(0));
  const ComplexInterval i(RealInterval(0), RealInterval(1));
  const ComplexInterval p = one * i;
  CHECK(p.re() == RealInterval(0));
  CHECK(p.im() == RealInterval(1));

  const ComplexInterval z(RealInterval(1, 2), RealInterval(1, 2));
  CHECK((z / one).contains(z));

  const ComplexInterval u(RealInterval(0, 1), RealInterval(0, 1));
  const ComplexInterval sq = u * u;
  CHECK(sq.contains(ComplexInterval(RealInterval(-1, 1), RealInterval(0, 2))));
  oracle::Gen gen(3);
  for (int k = 0; k < 10000; ++k) {
    const Complex a = gen.in(u);
    const Complex b = gen.in(u);
    CHECK(oracle::contains(sq, BigComplex(a) * BigComplex(b)));
  }

  CHECK(raises(ErrorCode::kDivisionByIntervalContainingZero, [] {
    const ComplexInterval zero_ish(RealInterval(-1, 1), RealInterval(-1, 1));
    (void)(ComplexInterval(1.0) / zero_ish);
  }));
}

TEST_CASE("complex division containment") {
  oracle::Gen gen(11);
  for (int k = 0; k < 5000; ++k) {
    const ComplexInterval a = gen.complex_interval();
    const ComplexInterval b = gen.complex_interval_without_zero();
    const ComplexInterval q = a / b;
    const Complex x = gen.in(a);
    const Complex y = gen.in(b);
    const BigComplex bx(x), by(y);
    const Big den = by.re * by.re + by.im * by.im;
    CHECK(oracle::quotient_in(q.re(), bx.re * by.re + bx.im * by.im, den));
    CHECK(oracle::quotient_in(q.im(), bx.im * by.re - bx.re * by.im, den));
  }
}

TEST_CASE("magnitudes and norms") {
  const ComplexInterval z(RealInterval(3), RealInterval(4));
  CHECK(z.mag() >= 5.0);
  CHECK(z.mag() <= std::nextafter(5.0, 6.0));
  Box b(2);
  b[0] = ComplexInterval(RealInterval(0, 1), RealInterval(0));
  b[1] = ComplexInterval(RealInterval(0), RealInterval(0, 2));
  CHECK(box_norm(b) == 2.0);
  CHECK(b.norm() == 2.0);
}

TEST_CASE("box construction") {
  const PointVector zero{Complex(0, 0)};
  const Box b = box_centered(zero, 1.0);
  CHECK(b[0].re() == RealInterval(-1, 1));
  CHECK(b[0].im() == RealInterval(-1, 1));

  const PointVector x{Complex(1, 2)};
  const Box c = box_centered(x, 0.5);
  CHECK(c[0].re() == RealInterval(0.5, 1.5));
  CHECK(c[0].im() == RealInterval(1.5, 2.5));

  CHECK(raises(ErrorCode::kNonPositiveRadius, [&] { (void)box_centered(x, 0.0); }));
  CHECK(raises(ErrorCode::kNonPositiveRadius, [&] { (void)box_centered(x, -1.0); }));

  oracle::Gen gen(5);
  for (int k = 0; k < 2000; ++k) {
    const double r = gen.uniform(1e-6, 1.0);
    const PointVector v{Complex(gen.integer(-4, 4), gen.integer(-4, 4))};
    CHECK(box_centered(v, r).radius() == doctest::Approx(r).epsilon(1e-15));
  }
}

TEST_CASE("box containment, midpoint and shift") {
  const PointVector zero{Complex(0, 0), Complex(0, 0)};
  const Box unit = box_centered(zero, 1.0);
  CHECK(box_contains(unit, unit));
  CHECK(!box_contains(unit, box_centered(zero, 1.01)));
  CHECK(midpoint(unit) == zero);
  CHECK(box_contains(unit, std::span<const Complex>(zero)));
  CHECK_THROWS_AS(box_contains(unit, box_centered(PointVector{Complex(0, 0)}, 1.0)), Error);

  oracle::Gen gen(9);
  for (int k = 0; k < 2000; ++k) {
    const double r = gen.uniform(1e-3, 2.0);
    const PointVector v{gen.complex(10.0), gen.complex(10.0)};
    const Box shifted = minkowski_shift(box_centered(zero, r), v);
    CHECK(box_contains(shifted, box_centered(v, r * (1 - 1e-15))));
  }
}

TEST_CASE("intersection") {
  const Box a = box_centered(PointVector{Complex(0, 0)}, 1.0);
  const Box b = box_centered(PointVector{Complex(1.5, 0)}, 1.0);
  Box out;
  REQUIRE(intersect(a, b, out));
  CHECK(out[0].re() == RealInterval(0.5, 1.0));
  const Box c = box_centered(PointVector{Complex(3, 0)}, 1.0);
  CHECK(!intersect(a, c, out));
}

TEST_CASE("decimal round trip") {
  oracle::Gen gen(1);
  for (int k = 0; k < 5000; ++k) {
    const double v = gen.value();
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK_THROWS_AS(parse_double("abc"), Error);
}
