#include "khtrack/krawczyk.hpp"

#include <cmath>
#include <limits>

namespace kht {

namespace {

struct OperatorParts {
  Box image;
  double residual_norm = 0.0;
};

OperatorParts compute(const Homotopy& h, std::span<const Complex> x, const PointMatrix& y,
                      const Box& box, const RealInterval& time, TimeExtension ext) {
  const std::size_t n = h.n();
  if (x.size() != n || box.size() != n || static_cast<std::size_t>(y.rows()) != n ||
      static_cast<std::size_t>(y.cols()) != n)
    throw Error(ErrorCode::kDimensionMismatch, "krawczyk operator inputs disagree on n");

  const Box center = point_box(x);
  const Box h_center = eval_interval(h, center, time, ext);
  const IntervalMatrix jac = jac_x_interval(h, box, time, ext);
  const IntervalMatrix resid = residual_matrix(y, jac);

  const Box newton = sub(center, pmatvec(y, h_center));
  const Box spread = imatvec(resid, sub(box, center));
  return {add(newton, spread), inorm(resid)};
}

}  // namespace

bool uniqueness_bound_holds(double residual_norm) {
  // sqrt(2) rounded up.
  const double sqrt2_up = rounding::sqrt_up(2.0);
  return rounding::mul_up(sqrt2_up, residual_norm) < 1.0;
}

Box krawczyk_operator(const Homotopy& h, std::span<const Complex> x, const PointMatrix& y,
                      const Box& box, const RealInterval& time, TimeExtension ext) {
  return compute(h, x, y, box, time, ext).image;
}

KrawczykVerdict parametric_krawczyk_test(const Homotopy& h, std::span<const Complex> x,
                                         const PointMatrix& y, const Box& box,
                                         const RealInterval& time, TimeExtension ext) {
  KrawczykVerdict v;
  try {
    OperatorParts parts = compute(h, x, y, box, time, ext);
    v.existence = box_contains(box, parts.image);
    v.residual_norm = parts.residual_norm;
    v.uniqueness = uniqueness_bound_holds(parts.residual_norm);
    v.operator_image = std::move(parts.image);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDimensionMismatch) throw;
    v.existence = false;
    v.uniqueness = false;
    v.residual_norm = std::numeric_limits<double>::infinity();
    v.failure = e.what();
  }
  return v;
}

}  // namespace kht
