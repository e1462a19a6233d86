#pragma once

// Certified path trackers.
//
// track_rect: boxes centered at the refined current point; on success both dt
// and r grow by lambda, on failure both shrink by lambda.
//
// track_tilted: before every Krawczyk test the path is predicted to t1
// (Euler + Newton), the homotopy is sheared along the segment s(t) through
// (t0, x0) and (t1, x1), and the test runs on a box around the origin in the
// sheared coordinates.

#include <functional>
#include <vector>

#include "khtrack/certificate.hpp"

namespace kht {

struct TrackerConfig {
  double dt0 = 0.1;
  double r0 = 0.1;
  double lambda = 3.0;
  int newton_iters = 10;
  double newton_tol = 1e-12;
  long max_steps = 1'000'000;
  TrackMode mode = TrackMode::kTilted;
  TimeExtension extension = TimeExtension::kTaylor;
  int max_consecutive_failures = 60;
  double min_dt = 1e-14;

  double ratio() const { return dt0 / r0; }
  // Throws kInvalidArgument when lambda <= 1, dt0 outside (0, 1) or r0 <= 0.
  void validate() const;
};

struct StepRecord {
  double t0 = 0.0;
  double dt = 0.0;
  double r = 0.0;
  bool accepted = false;
  double residual_norm = 0.0;
};

struct TrackState {
  double t0 = 0.0;
  double t1 = 0.0;
  double dt = 0.0;
  double r = 0.0;
  // dt = dt0 * lambda^scale_exponent, r = r0 * lambda^scale_exponent, so
  // dt / r never drifts from the configured ratio.
  int scale_exponent = 0;
  int consecutive_failures = 0;
  PointVector x0;
  PointVector x1;
  std::vector<StepRecord> step_log;

  static TrackState initial(const TrackerConfig& cfg, PointVector x0);
};

// Appends the step (with the pre-update t0, dt, r) to the log and applies the
// success or failure scaling. t1 is clamped to 1. Throws kStepUnderflow when
// dt drops below cfg.min_dt or the consecutive-failure cap is exceeded.
void step_update(TrackState& state, bool accepted, const TrackerConfig& cfg,
                 double residual_norm = 0.0);

struct NewtonResult {
  PointVector x;
  double residual = 0.0;
  int iterations = 0;
};

// Throws kSingularMatrix or kNoConvergence.
NewtonResult newton_refine(const Homotopy& h, std::span<const Complex> x, double t,
                           const TrackerConfig& cfg);

// x - dt * (dH/dx)^-1 * dH/dt, the Euler step of x' = -(dH/dx)^-1 dH/dt.
PointVector euler_predict(const Homotopy& h, std::span<const Complex> x, double t0, double dt);

struct Preconditioned {
  PointVector x1;
  Homotopy sheared;
  Box box;
  RealInterval time;
};

Preconditioned precondition(const Homotopy& h, std::span<const Complex> x0, double r, double t0,
                            double t1, const TrackerConfig& cfg);

struct TrackResult {
  PointVector final_point;
  double final_residual = 0.0;
  PathCertificate certificate;
  std::vector<StepRecord> steps;
  int accepted = 0;
  int rejected = 0;

  int iterations() const { return accepted + rejected; }
};

// Receives every step as it is logged; survives a path that later aborts.
using StepObserver = std::function<void(const StepRecord&)>;

// Failures throw kStepUnderflow, kMaxStepsExceeded, kSingularMatrix or
// kNoConvergence; no certificate is produced for an aborted path.
TrackResult track_rect(const Homotopy& h, std::span<const Complex> x0, const TrackerConfig& cfg,
                       const StepObserver& observer = {});
TrackResult track_tilted(const Homotopy& h, std::span<const Complex> x0, const TrackerConfig& cfg,
                         const StepObserver& observer = {});
// Dispatches on cfg.mode.
TrackResult track(const Homotopy& h, std::span<const Complex> x0, const TrackerConfig& cfg,
                  const StepObserver& observer = {});

}  // namespace kht
