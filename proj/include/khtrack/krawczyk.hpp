#pragma once

#include "khtrack/system.hpp"

namespace kht {

struct KrawczykVerdict {
  bool existence = false;   // K subset of I
  bool uniqueness = false;  // sqrt(2) * residual_norm < 1
  // Upper bound on ||1 - Y * dH/dx(I, T)||; +inf when the evaluation failed.
  double residual_norm = 0.0;
  Box operator_image;
  std::string failure;  // non-empty when an arithmetic error aborted the test

  bool passed() const { return existence && uniqueness; }
};

// K_{x,Y}(I, T) = x - Y * H(x, T) + (1 - Y * dH/dx(I, T)) * (I - x).
Box krawczyk_operator(const Homotopy& h, std::span<const Complex> x, const PointMatrix& y,
                      const Box& box, const RealInterval& time,
                      TimeExtension ext = TimeExtension::kTaylor);

// True/true is a proof that I holds exactly one root of H(., t) for every t in T.
// Arithmetic errors (overflow, dimension trouble inside the extension) are
// reported as a failed verdict, never as success.
KrawczykVerdict parametric_krawczyk_test(const Homotopy& h, std::span<const Complex> x,
                                         const PointMatrix& y, const Box& box,
                                         const RealInterval& time,
                                         TimeExtension ext = TimeExtension::kTaylor);

// sqrt(2) * norm < 1, evaluated with an upward-rounded product.
bool uniqueness_bound_holds(double residual_norm);

}  // namespace kht
