#pragma once

// Real and complex rectangular interval arithmetic over binary64.
//
// Every operation rounds its endpoints outward: the result is the tightest
// binary64 interval containing the exact real result set, obtained from
// round-to-nearest arithmetic plus error-free transformations (TwoSum, FMA
// residuals). An endpoint is moved one ulp outward only when the
// round-to-nearest value lies on the wrong side of the exact value, so exact
// operations stay exact.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "khtrack/error.hpp"

namespace kht {

using Complex = std::complex<double>;

namespace rounding {

double add_down(double a, double b);
double add_up(double a, double b);
double sub_down(double a, double b);
double sub_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);
double div_down(double a, double b);
double div_up(double a, double b);
double sqrt_up(double a);
double sqrt_down(double a);

}  // namespace rounding

class RealInterval {
 public:
  constexpr RealInterval() = default;
  // Degenerate interval [v, v].
  RealInterval(double v);  // NOLINT(google-explicit-constructor)
  RealInterval(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double width() const;  // hi - lo, rounded up
  double mid() const;    // non-certified center
  double mag() const;    // max |x| over the interval
  bool contains(double v) const { return lo_ <= v && v <= hi_; }
  bool contains(const RealInterval& other) const {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  bool is_point() const { return lo_ == hi_; }

  friend bool operator==(const RealInterval&, const RealInterval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

RealInterval operator+(const RealInterval& a, const RealInterval& b);
RealInterval operator-(const RealInterval& a, const RealInterval& b);
RealInterval operator-(const RealInterval& a);
RealInterval operator*(const RealInterval& a, const RealInterval& b);
RealInterval operator/(const RealInterval& a, const RealInterval& b);
// x*x with the dependency removed: sqr([-1,2]) = [0,4], not [-2,4].
RealInterval sqr(const RealInterval& a);
RealInterval hull(const RealInterval& a, const RealInterval& b);

class ComplexInterval {
 public:
  ComplexInterval() = default;
  ComplexInterval(const RealInterval& re, const RealInterval& im) : re_(re), im_(im) {}
  ComplexInterval(Complex z) : re_(z.real()), im_(z.imag()) {}  // NOLINT
  ComplexInterval(double v) : re_(v), im_(0.0) {}                // NOLINT

  const RealInterval& re() const { return re_; }
  const RealInterval& im() const { return im_; }

  // Upper bound of max |z| over the rectangle.
  double mag() const;
  Complex mid() const { return {re_.mid(), im_.mid()}; }
  bool contains(Complex z) const { return re_.contains(z.real()) && im_.contains(z.imag()); }
  bool contains(const ComplexInterval& other) const {
    return re_.contains(other.re_) && im_.contains(other.im_);
  }

  friend bool operator==(const ComplexInterval&, const ComplexInterval&) = default;

 private:
  RealInterval re_;
  RealInterval im_;
};

ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator-(const ComplexInterval& a);
ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator*(const RealInterval& a, const ComplexInterval& b);
ComplexInterval operator/(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval sqr(const ComplexInterval& a);

// n-dimensional vector of complex intervals.
class Box {
 public:
  Box() = default;
  explicit Box(std::size_t n) : entries_(n) {}
  explicit Box(std::vector<ComplexInterval> entries) : entries_(std::move(entries)) {}

  std::size_t size() const { return entries_.size(); }
  const ComplexInterval& operator[](std::size_t i) const { return entries_[i]; }
  ComplexInterval& operator[](std::size_t i) { return entries_[i]; }
  std::span<const ComplexInterval> entries() const { return entries_; }

  // max_i mag(entries[i])
  double norm() const;
  // Largest half-width over all real and imaginary components; equals the
  // radius for a square box.
  double radius() const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<ComplexInterval> entries_;
};

using PointVector = std::vector<Complex>;

Box point_box(std::span<const Complex> x);
Box box_centered(std::span<const Complex> x, double r);
bool box_contains(const Box& outer, const Box& inner);
bool box_contains(const Box& outer, std::span<const Complex> point);
PointVector midpoint(const Box& b);
Box minkowski_shift(const Box& b, std::span<const Complex> v);
// Component-wise sum of two boxes.
Box add(const Box& a, const Box& b);
Box sub(const Box& a, const Box& b);
// Component-wise intersection; returns false when empty.
bool intersect(const Box& a, const Box& b, Box& out);

double width(const RealInterval& a);
double mag(const ComplexInterval& a);
double box_norm(const Box& b);

// Shortest round-trip decimal text for a binary64 value, and its inverse.
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace kht
