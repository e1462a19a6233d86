#pragma once

// Square parametric polynomial systems F(x; p), affine-linear in p, and the
// segment homotopy H(x, t) = F(x; (1-t) p0 + t p1) with an optional shear
// H^(x, t) = H(x + s(t), t) along a line segment s through (t0, x0), (t1, x1).

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "khtrack/interval.hpp"
#include "khtrack/linalg.hpp"

namespace kht {

struct Term {
  Complex coeff;
  // Index of the parameter multiplying this term, or -1 for a parameter-free
  // term. Parameter terms form F1(x; p), the rest form F2(x).
  int param = -1;
  std::vector<int> exponents;

  friend bool operator==(const Term&, const Term&) = default;
};

using Polynomial = std::vector<Term>;

// Term of a partial derivative; `scale` is the integer exponent that came down
// and is applied in interval arithmetic at evaluation time.
struct ScaledTerm {
  Complex coeff;
  int scale = 1;
  int param = -1;
  std::vector<int> exponents;
};

class ParametricSystem {
 public:
  ParametricSystem(std::size_t n, std::size_t m, std::vector<Polynomial> equations);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  const std::vector<Polynomial>& equations() const { return equations_; }
  const std::vector<std::vector<ScaledTerm>>& scaled_equations() const { return scaled_; }
  // Terms of dF_i/dx_j.
  const std::vector<ScaledTerm>& jacobian_terms(std::size_t i, std::size_t j) const {
    return jacobian_[i * n_ + j];
  }
  int max_degree() const { return max_degree_; }

  friend bool operator==(const ParametricSystem& a, const ParametricSystem& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.equations_ == b.equations_;
  }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<Polynomial> equations_;
  std::vector<std::vector<ScaledTerm>> scaled_;
  std::vector<std::vector<ScaledTerm>> jacobian_;
  int max_degree_ = 0;
};

struct Shear {
  PointVector x0;
  PointVector x1;
  double t0 = 0.0;
  double t1 = 1.0;

  friend bool operator==(const Shear&, const Shear&) = default;
};

// How the t-dependence enters an interval extension over a time interval T.
enum class TimeExtension {
  // Polynomial arithmetic in the local time offset t - c (c the midpoint of T) with interval
  // coefficients; the offset is enclosed only once at the end. First-order
  // t-terms of different monomials cancel, which is what makes the sheared
  // boxes effective.
  kTaylor,
  // Plain term-wise evaluation with p(T) and s(T) as intervals.
  kNaive,
};

const char* to_string(TimeExtension e) noexcept;
TimeExtension time_extension_from_string(const std::string& s);

class Homotopy {
 public:
  Homotopy(std::shared_ptr<const ParametricSystem> system, PointVector p0, PointVector p1);

  const ParametricSystem& system() const { return *system_; }
  std::shared_ptr<const ParametricSystem> system_ptr() const { return system_; }
  std::size_t n() const { return system_->n(); }
  const PointVector& p0() const { return p0_; }
  const PointVector& p1() const { return p1_; }
  const std::optional<Shear>& shear() const { return shear_; }

  // Same homotopy with the shear replaced.
  Homotopy with_shear(std::optional<Shear> shear) const;

  // p(t) in floating point.
  PointVector params_at(double t) const;
  // s(t) in floating point (zero vector when unsheared).
  PointVector shift_at(double t) const;

 private:
  std::shared_ptr<const ParametricSystem> system_;
  PointVector p0_;
  PointVector p1_;
  std::optional<Shear> shear_;
};

PointVector eval_point(const Homotopy& h, std::span<const Complex> x, double t);
PointMatrix jac_x_point(const Homotopy& h, std::span<const Complex> x, double t);

// Interval extension of H (or the sheared H^) over I x T. T must lie in [0, 1].
Box eval_interval(const Homotopy& h, const Box& box, const RealInterval& time,
                  TimeExtension ext = TimeExtension::kTaylor);
IntervalMatrix jac_x_interval(const Homotopy& h, const Box& box, const RealInterval& time,
                              TimeExtension ext = TimeExtension::kTaylor);

// Parameter-linear part F1(x; dp). For the segment path F1(x; p1 - p0) is the
// t-derivative of H.
PointVector f1_eval(const ParametricSystem& sys, std::span<const Complex> x,
                    std::span<const Complex> dp);

Homotopy apply_shear(const Homotopy& h, PointVector x0, PointVector x1, double t0, double t1);

}  // namespace kht
