#include "khtrack/interval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace kht {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude the FMA residual of a product or quotient may itself
// underflow, so the sign test is no longer reliable.
const double kTiny = std::ldexp(1.0, -969);

double down(double v) { return std::nextafter(v, -kInf); }
double up(double v) { return std::nextafter(v, kInf); }

double finite_or_throw(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteEndpoint, "interval endpoint overflow");
  return v;
}

// Error of round-to-nearest a+b (TwoSum): exact = s + err.
double two_sum_err(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

}  // namespace

namespace rounding {

double add_down(double a, double b) {
  const double s = finite_or_throw(a + b);
  return two_sum_err(a, b, s) < 0.0 ? down(s) : s;
}

double add_up(double a, double b) {
  const double s = finite_or_throw(a + b);
  return two_sum_err(a, b, s) > 0.0 ? up(s) : s;
}

double sub_down(double a, double b) { return add_down(a, -b); }
double sub_up(double a, double b) { return add_up(a, -b); }

double mul_down(double a, double b) {
  const double p = finite_or_throw(a * b);
  if (a == 0.0 || b == 0.0) return p;
  if (std::fabs(p) < kTiny) return down(p);
  return std::fma(a, b, -p) < 0.0 ? down(p) : p;
}

double mul_up(double a, double b) {
  const double p = finite_or_throw(a * b);
  if (a == 0.0 || b == 0.0) return p;
  if (std::fabs(p) < kTiny) return up(p);
  return std::fma(a, b, -p) > 0.0 ? up(p) : p;
}

namespace {
// Sign of (exact a/b) - q, or 2 when it cannot be determined reliably.
int quotient_side(double a, double b, double q) {
  if (a == 0.0) return 0;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return 2;
  const double r = std::fma(-q, b, a);  // a - q*b, exact
  if (r == 0.0) return 0;
  return ((r > 0.0) == (b > 0.0)) ? 1 : -1;
}
}  // namespace

double div_down(double a, double b) {
  const double q = finite_or_throw(a / b);
  const int side = quotient_side(a, b, q);
  return (side == -1 || side == 2) ? down(q) : q;
}

double div_up(double a, double b) {
  const double q = finite_or_throw(a / b);
  const int side = quotient_side(a, b, q);
  return (side == 1 || side == 2) ? up(q) : q;
}

double sqrt_up(double a) {
  const double s = std::sqrt(a);
  if (s == 0.0) return s;
  return std::fma(-s, s, a) > 0.0 ? up(s) : s;
}

double sqrt_down(double a) {
  const double s = std::sqrt(a);
  if (s == 0.0) return s;
  return std::fma(-s, s, a) < 0.0 ? down(s) : s;
}

}  // namespace rounding

using namespace rounding;

// ---------------------------------------------------------------- real

RealInterval::RealInterval(double v) : lo_(v), hi_(v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteEndpoint, "non-finite point");
}

RealInterval::RealInterval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorCode::kNonFiniteEndpoint, "non-finite endpoint");
  if (!(lo <= hi)) throw Error(ErrorCode::kInvalidArgument, "interval with lo > hi");
}

double RealInterval::width() const { return sub_up(hi_, lo_); }

double RealInterval::mid() const { return 0.5 * lo_ + 0.5 * hi_; }

double RealInterval::mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }

RealInterval operator+(const RealInterval& a, const RealInterval& b) {
  return {add_down(a.lo(), b.lo()), add_up(a.hi(), b.hi())};
}

RealInterval operator-(const RealInterval& a, const RealInterval& b) {
  return {sub_down(a.lo(), b.hi()), sub_up(a.hi(), b.lo())};
}

RealInterval operator-(const RealInterval& a) { return {-a.hi(), -a.lo()}; }

RealInterval operator*(const RealInterval& a, const RealInterval& b) {
  if (a.is_point() && b.is_point()) return {mul_down(a.lo(), b.lo()), mul_up(a.lo(), b.lo())};
  const double l1 = mul_down(a.lo(), b.lo()), l2 = mul_down(a.lo(), b.hi());
  const double l3 = mul_down(a.hi(), b.lo()), l4 = mul_down(a.hi(), b.hi());
  const double h1 = mul_up(a.lo(), b.lo()), h2 = mul_up(a.lo(), b.hi());
  const double h3 = mul_up(a.hi(), b.lo()), h4 = mul_up(a.hi(), b.hi());
  return {std::min({l1, l2, l3, l4}), std::max({h1, h2, h3, h4})};
}

RealInterval operator/(const RealInterval& a, const RealInterval& b) {
  if (b.contains_zero())
    throw Error(ErrorCode::kDivisionByIntervalContainingZero, "divisor contains 0");
  const double l1 = div_down(a.lo(), b.lo()), l2 = div_down(a.lo(), b.hi());
  const double l3 = div_down(a.hi(), b.lo()), l4 = div_down(a.hi(), b.hi());
  const double h1 = div_up(a.lo(), b.lo()), h2 = div_up(a.lo(), b.hi());
  const double h3 = div_up(a.hi(), b.lo()), h4 = div_up(a.hi(), b.hi());
  return {std::min({l1, l2, l3, l4}), std::max({h1, h2, h3, h4})};
}

RealInterval sqr(const RealInterval& a) {
  if (a.lo() >= 0.0) return {mul_down(a.lo(), a.lo()), mul_up(a.hi(), a.hi())};
  if (a.hi() <= 0.0) return {mul_down(a.hi(), a.hi()), mul_up(a.lo(), a.lo())};
  return {0.0, std::max(mul_up(a.lo(), a.lo()), mul_up(a.hi(), a.hi()))};
}

RealInterval hull(const RealInterval& a, const RealInterval& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

// ---------------------------------------------------------------- complex

double ComplexInterval::mag() const {
  const double a = re_.mag();
  const double b = im_.mag();
  if (b == 0.0) return a;
  if (a == 0.0) return b;
  return finite_or_throw(sqrt_up(add_up(mul_up(a, a), mul_up(b, b))));
}

ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b) {
  return {a.re() + b.re(), a.im() + b.im()};
}

ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b) {
  return {a.re() - b.re(), a.im() - b.im()};
}

ComplexInterval operator-(const ComplexInterval& a) { return {-a.re(), -a.im()}; }

ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b) {
  return {a.re() * b.re() - a.im() * b.im(), a.re() * b.im() + a.im() * b.re()};
}

ComplexInterval operator*(const RealInterval& a, const ComplexInterval& b) {
  return {a * b.re(), a * b.im()};
}

ComplexInterval operator/(const ComplexInterval& a, const ComplexInterval& b) {
  const RealInterval denom = sqr(b.re()) + sqr(b.im());
  if (denom.contains_zero())
    throw Error(ErrorCode::kDivisionByIntervalContainingZero, "complex divisor contains 0");
  return {(a.re() * b.re() + a.im() * b.im()) / denom, (a.im() * b.re() - a.re() * b.im()) / denom};
}

ComplexInterval sqr(const ComplexInterval& a) {
  const RealInterval two(2.0);
  return {sqr(a.re()) - sqr(a.im()), two * (a.re() * a.im())};
}

// ---------------------------------------------------------------- boxes

double Box::norm() const {
  double n = 0.0;
  for (const auto& e : entries_) n = std::max(n, e.mag());
  return n;
}

double Box::radius() const {
  double w = 0.0;
  for (const auto& e : entries_) w = std::max({w, e.re().width(), e.im().width()});
  return 0.5 * w;
}

namespace {
void check_dims(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorCode::kDimensionMismatch,
                "dimension " + std::to_string(a) + " vs " + std::to_string(b));
}
}  // namespace

Box point_box(std::span<const Complex> x) {
  Box b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) b[i] = ComplexInterval(x[i]);
  return b;
}

Box box_centered(std::span<const Complex> x, double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw Error(ErrorCode::kNonPositiveRadius, "radius must be positive and finite");
  Box b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double re = x[i].real(), im = x[i].imag();
    b[i] = ComplexInterval({sub_down(re, r), add_up(re, r)}, {sub_down(im, r), add_up(im, r)});
  }
  return b;
}

bool box_contains(const Box& outer, const Box& inner) {
  check_dims(outer.size(), inner.size());
  for (std::size_t i = 0; i < outer.size(); ++i)
    if (!outer[i].contains(inner[i])) return false;
  return true;
}

bool box_contains(const Box& outer, std::span<const Complex> point) {
  check_dims(outer.size(), point.size());
  for (std::size_t i = 0; i < outer.size(); ++i)
    if (!outer[i].contains(point[i])) return false;
  return true;
}

PointVector midpoint(const Box& b) {
  PointVector m(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) m[i] = b[i].mid();
  return m;
}

Box minkowski_shift(const Box& b, std::span<const Complex> v) {
  check_dims(b.size(), v.size());
  Box out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i] + ComplexInterval(v[i]);
  return out;
}

Box add(const Box& a, const Box& b) {
  check_dims(a.size(), b.size());
  Box out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Box sub(const Box& a, const Box& b) {
  check_dims(a.size(), b.size());
  Box out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

bool intersect(const Box& a, const Box& b, Box& out) {
  check_dims(a.size(), b.size());
  Box r(a.size());
  auto meet = [](const RealInterval& x, const RealInterval& y, RealInterval& z) {
    const double lo = std::max(x.lo(), y.lo());
    const double hi = std::min(x.hi(), y.hi());
    if (lo > hi) return false;
    z = RealInterval(lo, hi);
    return true;
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    RealInterval re, im;
    if (!meet(a[i].re(), b[i].re(), re) || !meet(a[i].im(), b[i].im(), im)) return false;
    r[i] = ComplexInterval(re, im);
  }
  out = std::move(r);
  return true;
}

double width(const RealInterval& a) { return a.width(); }
double mag(const ComplexInterval& a) { return a.mag(); }
double box_norm(const Box& b) { return b.norm(); }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw Error(ErrorCode::kParseError, "not a binary64 literal: '" + s + "'");
  return v;
}

}  // namespace kht
