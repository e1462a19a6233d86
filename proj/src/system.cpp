#include "khtrack/system.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace kht {

namespace {

void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

// Polynomial in the local time offset d = t - c, c the midpoint of T, with
// complex interval coefficients.
class TauPoly {
 public:
  static constexpr int kCapacity = 16;

  TauPoly() = default;
  explicit TauPoly(const ComplexInterval& c) : deg_(0) { c_[0] = c; }
  TauPoly(const ComplexInterval& c0, const ComplexInterval& c1) : deg_(1) {
    c_[0] = c0;
    c_[1] = c1;
  }

  int degree() const { return deg_; }
  const ComplexInterval& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }

  friend TauPoly operator+(const TauPoly& a, const TauPoly& b) {
    TauPoly r;
    r.deg_ = std::max(a.deg_, b.deg_);
    for (int k = 0; k <= r.deg_; ++k) {
      if (k > a.deg_) r.at(k) = b[k];
      else if (k > b.deg_) r.at(k) = a[k];
      else r.at(k) = a[k] + b[k];
    }
    return r;
  }

  friend TauPoly operator*(const TauPoly& a, const TauPoly& b) {
    TauPoly r;
    r.deg_ = a.deg_ + b.deg_;
    require(r.deg_ < kCapacity, ErrorCode::kInvalidArgument, "time polynomial degree too high");
    for (int k = 0; k <= r.deg_; ++k) r.at(k) = ComplexInterval(0.0);
    for (int i = 0; i <= a.deg_; ++i)
      for (int j = 0; j <= b.deg_; ++j) r.at(i + j) = r[i + j] + a[i] * b[j];
    return r;
  }

  friend TauPoly operator*(const TauPoly& a, const ComplexInterval& s) {
    TauPoly r;
    r.deg_ = a.deg_;
    for (int k = 0; k <= a.deg_; ++k) r.at(k) = a[k] * s;
    return r;
  }

  friend TauPoly sqr(const TauPoly& a) {
    TauPoly r;
    r.deg_ = 2 * a.deg_;
    require(r.deg_ < kCapacity, ErrorCode::kInvalidArgument, "time polynomial degree too high");
    for (int k = 0; k <= r.deg_; ++k) r.at(k) = ComplexInterval(0.0);
    const RealInterval two(2.0);
    for (int i = 0; i <= a.deg_; ++i) {
      r.at(2 * i) = r[2 * i] + sqr(a[i]);
      for (int j = i + 1; j <= a.deg_; ++j) r.at(i + j) = r[i + j] + two * (a[i] * a[j]);
    }
    return r;
  }

  // Enclosure of sum_k c_k d^k over d in [-h, h]; even powers lie in [0, h^k].
  ComplexInterval enclose(double h) const {
    ComplexInterval acc = c_[0];
    double hk = 1.0;
    for (int k = 1; k <= deg_; ++k) {
      hk = rounding::mul_up(hk, h);
      const RealInterval range = (k % 2 == 0) ? RealInterval(0.0, hk) : RealInterval(-hk, hk);
      acc = acc + range * c_[static_cast<std::size_t>(k)];
    }
    return acc;
  }

 private:
  ComplexInterval& at(int k) { return c_[static_cast<std::size_t>(k)]; }

  int deg_ = 0;
  std::array<ComplexInterval, kCapacity> c_{};
};

// Ring-generic pieces used by the term evaluator.
inline Complex coef_value(const Complex& c, int scale, const Complex*) {
  return scale == 1 ? c : c * static_cast<double>(scale);
}
inline ComplexInterval coef_value(const Complex& c, int scale, const ComplexInterval*) {
  if (scale == 1) return ComplexInterval(c);
  return RealInterval(static_cast<double>(scale)) * ComplexInterval(c);
}
inline ComplexInterval coef_value(const Complex& c, int scale, const TauPoly*) {
  return coef_value(c, scale, static_cast<const ComplexInterval*>(nullptr));
}

inline Complex sqr(const Complex& z) { return z * z; }

inline Complex scale_by(const Complex& v, const Complex& c) { return v * c; }
inline ComplexInterval scale_by(const ComplexInterval& v, const ComplexInterval& c) { return v * c; }
inline TauPoly scale_by(const TauPoly& v, const ComplexInterval& c) { return v * c; }

template <class R>
R ring_one() {
  if constexpr (std::is_same_v<R, TauPoly>) return TauPoly(ComplexInterval(1.0));
  else return R(1.0);
}

template <class R>
R ring_zero() {
  if constexpr (std::is_same_v<R, TauPoly>) return TauPoly(ComplexInterval(0.0));
  else return R(0.0);
}

// Lazily computed powers of each variable: repeated squaring for even
// exponents, one extra multiplication for odd ones.
template <class R>
class PowerCache {
 public:
  explicit PowerCache(std::vector<R> vars) : pw_(vars.size()) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      pw_[i].push_back(ring_one<R>());
      pw_[i].push_back(std::move(vars[i]));
    }
  }

  const R& get(std::size_t i, int d) {
    auto& row = pw_[i];
    while (static_cast<int>(row.size()) <= d) {
      const int k = static_cast<int>(row.size());
      if (k % 2 == 0) row.push_back(sqr(row[static_cast<std::size_t>(k / 2)]));
      else row.push_back(row[static_cast<std::size_t>(k - 1)] * row[1]);
    }
    return row[static_cast<std::size_t>(d)];
  }

 private:
  std::vector<std::vector<R>> pw_;
};

template <class R>
R eval_terms(const std::vector<ScaledTerm>& terms, PowerCache<R>& pw, const std::vector<R>& params) {
  using Coef = std::conditional_t<std::is_same_v<R, Complex>, Complex, ComplexInterval>;
  R acc = ring_zero<R>();
  bool first = true;
  for (const auto& term : terms) {
    R mono = ring_one<R>();
    bool have = false;
    for (std::size_t i = 0; i < term.exponents.size(); ++i) {
      const int e = term.exponents[i];
      if (e == 0) continue;
      mono = have ? mono * pw.get(i, e) : pw.get(i, e);
      have = true;
    }
    if (term.param >= 0) {
      const R& p = params[static_cast<std::size_t>(term.param)];
      mono = have ? mono * p : p;
    }
    const Coef c = coef_value(term.coeff, term.scale, static_cast<const R*>(nullptr));
    R value = scale_by(mono, c);
    acc = first ? std::move(value) : acc + value;
    first = false;
  }
  return acc;
}

ScaledTerm to_scaled(const Term& t) { return {t.coeff, 1, t.param, t.exponents}; }

// --------------------------------------------------------------- setup

struct PointSetup {
  std::vector<Complex> vars;
  std::vector<Complex> params;
};

PointSetup point_setup(const Homotopy& h, std::span<const Complex> x, double t) {
  require(x.size() == h.n(), ErrorCode::kDimensionMismatch, "point dimension mismatch");
  PointSetup s;
  s.params = h.params_at(t);
  const PointVector shift = h.shift_at(t);
  s.vars.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s.vars[i] = x[i] + shift[i];
  return s;
}

template <class R>
struct IntervalSetup {
  std::vector<R> vars;
  std::vector<R> params;
  double offset_radius = 0.0;  // Taylor only
};

void check_time(const RealInterval& time) {
  require(time.lo() >= 0.0 && time.hi() <= 1.0, ErrorCode::kInvalidArgument,
          "time interval must lie in [0, 1]");
}

IntervalSetup<ComplexInterval> naive_setup(const Homotopy& h, const Box& box,
                                           const RealInterval& time) {
  require(box.size() == h.n(), ErrorCode::kDimensionMismatch, "box dimension mismatch");
  check_time(time);
  IntervalSetup<ComplexInterval> s;
  const std::size_t m = h.system().m();
  s.params.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const ComplexInterval p0(h.p0()[k]);
    const ComplexInterval dp = ComplexInterval(h.p1()[k]) - p0;
    s.params[k] = p0 + time * dp;
  }
  s.vars.resize(box.size());
  if (const auto& sh = h.shear()) {
    const RealInterval tau = (time - RealInterval(sh->t0)) / (RealInterval(sh->t1) - RealInterval(sh->t0));
    for (std::size_t i = 0; i < box.size(); ++i) {
      const ComplexInterval x0(sh->x0[i]);
      const ComplexInterval delta = ComplexInterval(sh->x1[i]) - x0;
      s.vars[i] = box[i] + (x0 + tau * delta);
    }
  } else {
    for (std::size_t i = 0; i < box.size(); ++i) s.vars[i] = box[i];
  }
  return s;
}

IntervalSetup<TauPoly> taylor_setup(const Homotopy& h, const Box& box, const RealInterval& time) {
  require(box.size() == h.n(), ErrorCode::kDimensionMismatch, "box dimension mismatch");
  check_time(time);
  IntervalSetup<TauPoly> s;
  const double c = time.lo() + 0.5 * (time.hi() - time.lo());
  const RealInterval anchor(c);
  s.offset_radius = std::max(rounding::sub_up(c, time.lo()), rounding::sub_up(time.hi(), c));
  const std::size_t m = h.system().m();
  s.params.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const ComplexInterval p0(h.p0()[k]);
    const ComplexInterval dp = ComplexInterval(h.p1()[k]) - p0;
    s.params[k] = TauPoly(p0 + anchor * dp, dp);
  }
  s.vars.resize(box.size());
  if (const auto& sh = h.shear()) {
    const RealInterval span = RealInterval(sh->t1) - RealInterval(sh->t0);
    const RealInterval tau0 = (anchor - RealInterval(sh->t0)) / span;
    const RealInterval slope = RealInterval(1.0) / span;
    for (std::size_t i = 0; i < box.size(); ++i) {
      const ComplexInterval x0(sh->x0[i]);
      const ComplexInterval delta = ComplexInterval(sh->x1[i]) - x0;
      s.vars[i] = TauPoly(box[i] + (x0 + tau0 * delta), slope * delta);
    }
  } else {
    for (std::size_t i = 0; i < box.size(); ++i) s.vars[i] = TauPoly(box[i]);
  }
  return s;
}

}  // namespace

// --------------------------------------------------------------- system

ParametricSystem::ParametricSystem(std::size_t n, std::size_t m, std::vector<Polynomial> equations)
    : n_(n), m_(m), equations_(std::move(equations)) {
  require(n > 0, ErrorCode::kInvalidArgument, "system needs at least one variable");
  require(equations_.size() == n, ErrorCode::kDimensionMismatch,
          "system is not square: " + std::to_string(equations_.size()) + " equations, " +
              std::to_string(n) + " variables");
  for (const auto& eq : equations_) {
    for (const auto& t : eq) {
      require(t.exponents.size() == n, ErrorCode::kDimensionMismatch,
              "term exponent vector has wrong length");
      require(t.param >= -1 && t.param < static_cast<int>(m), ErrorCode::kInvalidArgument,
              "parameter index out of range");
      require(std::isfinite(t.coeff.real()) && std::isfinite(t.coeff.imag()),
              ErrorCode::kInvalidArgument, "non-finite coefficient");
      int deg = 0;
      for (int e : t.exponents) {
        require(e >= 0, ErrorCode::kInvalidArgument, "negative exponent");
        deg += e;
      }
      max_degree_ = std::max(max_degree_, deg);
    }
  }

  scaled_.resize(n);
  jacobian_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& t : equations_[i]) {
      scaled_[i].push_back(to_scaled(t));
      for (std::size_t j = 0; j < n; ++j) {
        const int e = t.exponents[j];
        if (e == 0) continue;
        ScaledTerm d = to_scaled(t);
        d.scale = e;
        d.exponents[j] = e - 1;
        jacobian_[i * n + j].push_back(std::move(d));
      }
    }
  }
}

const char* to_string(TimeExtension e) noexcept {
  return e == TimeExtension::kTaylor ? "taylor" : "naive";
}

TimeExtension time_extension_from_string(const std::string& s) {
  if (s == "taylor") return TimeExtension::kTaylor;
  if (s == "naive") return TimeExtension::kNaive;
  throw Error(ErrorCode::kInvalidArgument, "unknown time extension '" + s + "'");
}

// --------------------------------------------------------------- homotopy

Homotopy::Homotopy(std::shared_ptr<const ParametricSystem> system, PointVector p0, PointVector p1)
    : system_(std::move(system)), p0_(std::move(p0)), p1_(std::move(p1)) {
  require(system_ != nullptr, ErrorCode::kInvalidArgument, "null system");
  require(p0_.size() == system_->m() && p1_.size() == system_->m(), ErrorCode::kDimensionMismatch,
          "parameter vector length differs from system parameter count");
}

Homotopy Homotopy::with_shear(std::optional<Shear> shear) const {
  Homotopy h = *this;
  h.shear_ = std::move(shear);
  return h;
}

PointVector Homotopy::params_at(double t) const {
  PointVector p(p0_.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = p0_[k] + t * (p1_[k] - p0_[k]);
  return p;
}

PointVector Homotopy::shift_at(double t) const {
  PointVector s(n(), Complex(0.0, 0.0));
  if (!shear_) return s;
  const double tau = (t - shear_->t0) / (shear_->t1 - shear_->t0);
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = shear_->x0[i] + tau * (shear_->x1[i] - shear_->x0[i]);
  return s;
}

PointVector eval_point(const Homotopy& h, std::span<const Complex> x, double t) {
  PointSetup s = point_setup(h, x, t);
  PowerCache<Complex> pw(std::move(s.vars));
  const auto& eqs = h.system().scaled_equations();
  PointVector out(eqs.size());
  for (std::size_t i = 0; i < eqs.size(); ++i) out[i] = eval_terms<Complex>(eqs[i], pw, s.params);
  return out;
}

PointMatrix jac_x_point(const Homotopy& h, std::span<const Complex> x, double t) {
  PointSetup s = point_setup(h, x, t);
  PowerCache<Complex> pw(std::move(s.vars));
  const std::size_t n = h.n();
  PointMatrix j(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          eval_terms<Complex>(h.system().jacobian_terms(r, c), pw, s.params);
  return j;
}

Box eval_interval(const Homotopy& h, const Box& box, const RealInterval& time, TimeExtension ext) {
  const auto& eqs = h.system().scaled_equations();
  Box out(eqs.size());
  if (ext == TimeExtension::kNaive) {
    auto s = naive_setup(h, box, time);
    PowerCache<ComplexInterval> pw(std::move(s.vars));
    for (std::size_t i = 0; i < eqs.size(); ++i)
      out[i] = eval_terms<ComplexInterval>(eqs[i], pw, s.params);
  } else {
    auto s = taylor_setup(h, box, time);
    PowerCache<TauPoly> pw(std::move(s.vars));
    for (std::size_t i = 0; i < eqs.size(); ++i)
      out[i] = eval_terms<TauPoly>(eqs[i], pw, s.params).enclose(s.offset_radius);
  }
  return out;
}

IntervalMatrix jac_x_interval(const Homotopy& h, const Box& box, const RealInterval& time,
                              TimeExtension ext) {
  const std::size_t n = h.n();
  IntervalMatrix out(n, n);
  if (ext == TimeExtension::kNaive) {
    auto s = naive_setup(h, box, time);
    PowerCache<ComplexInterval> pw(std::move(s.vars));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        out(r, c) = eval_terms<ComplexInterval>(h.system().jacobian_terms(r, c), pw, s.params);
  } else {
    auto s = taylor_setup(h, box, time);
    PowerCache<TauPoly> pw(std::move(s.vars));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        out(r, c) = eval_terms<TauPoly>(h.system().jacobian_terms(r, c), pw, s.params)
                        .enclose(s.offset_radius);
  }
  return out;
}

PointVector f1_eval(const ParametricSystem& sys, std::span<const Complex> x,
                    std::span<const Complex> dp) {
  require(x.size() == sys.n() && dp.size() == sys.m(), ErrorCode::kDimensionMismatch,
          "f1_eval dimension mismatch");
  PowerCache<Complex> pw(std::vector<Complex>(x.begin(), x.end()));
  PointVector out(sys.n(), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < sys.n(); ++i) {
    for (const auto& t : sys.scaled_equations()[i]) {
      if (t.param < 0) continue;
      Complex mono = t.coeff * dp[static_cast<std::size_t>(t.param)];
      for (std::size_t j = 0; j < t.exponents.size(); ++j)
        if (t.exponents[j] != 0) mono *= pw.get(j, t.exponents[j]);
      out[i] += mono;
    }
  }
  return out;
}

Homotopy apply_shear(const Homotopy& h, PointVector x0, PointVector x1, double t0, double t1) {
  require(t0 < t1, ErrorCode::kDegenerateTimeInterval, "shear needs t0 < t1");
  require(x0.size() == h.n() && x1.size() == h.n(), ErrorCode::kDimensionMismatch,
          "shear endpoints have wrong dimension");
  return h.with_shear(Shear{std::move(x0), std::move(x1), t0, t1});
}

}  // namespace kht
