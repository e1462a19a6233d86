#pragma once

// Path certificates: a chain of (time interval, box, preconditioner) records
// whose parametric Krawczyk tests together prove that one solution path runs
// uniquely through the boxes from t = 0 to t = 1. The verifier replays every
// test from the recorded claims and recomputes all interval quantities itself.

#include <optional>
#include <string>
#include <vector>

#include "khtrack/krawczyk.hpp"

namespace kht {

enum class TrackMode { kRect, kTilted };

const char* to_string(TrackMode m) noexcept;
TrackMode track_mode_from_string(const std::string& s);

struct Segment {
  double t_lo = 0.0;
  double t_hi = 0.0;
  // Rect mode: box around `center`. Tilted mode: box around the origin in the
  // sheared coordinates, i.e. the region s(t) + box.
  Box box;
  PointMatrix y;
  // Shear endpoints at t_lo / t_hi (tilted mode only).
  std::optional<PointVector> shear_x0;
  std::optional<PointVector> shear_x1;
  // Krawczyk center; zero vector in tilted mode.
  PointVector center;
  double recorded_residual_norm = 0.0;

  friend bool operator==(const Segment& a, const Segment& b) {
    return a.t_lo == b.t_lo && a.t_hi == b.t_hi && a.box == b.box && a.y.rows() == b.y.rows() &&
           a.y.cols() == b.y.cols() && a.y == b.y && a.shear_x0 == b.shear_x0 &&
           a.shear_x1 == b.shear_x1 && a.center == b.center &&
           a.recorded_residual_norm == b.recorded_residual_norm;
  }
};

struct PathCertificate {
  std::shared_ptr<const ParametricSystem> system;
  PointVector p0;
  PointVector p1;
  TrackMode mode = TrackMode::kTilted;
  TimeExtension extension = TimeExtension::kTaylor;
  std::vector<Segment> segments;
  PointVector final_point;
  double final_residual = 0.0;

  friend bool operator==(const PathCertificate& a, const PathCertificate& b) {
    const bool same_system =
        (a.system == b.system) || (a.system && b.system && *a.system == *b.system);
    return same_system && a.p0 == b.p0 && a.p1 == b.p1 && a.mode == b.mode &&
           a.extension == b.extension && a.segments == b.segments &&
           a.final_point == b.final_point && a.final_residual == b.final_residual;
  }
};

// Homotopy a segment claims to certify (sheared in tilted mode).
Homotopy segment_homotopy(const PathCertificate& cert, const Segment& seg);
// The region of the segment's box in original coordinates at time t.
Box segment_region_at(const PathCertificate& cert, const Segment& seg, double t);

struct SegmentCheck {
  bool existence = false;
  bool uniqueness = false;
  double residual_norm = 0.0;
  // Solution hand-off from the previous segment (true for the first one).
  bool handoff = false;
  std::string note;

  bool passed() const { return existence && uniqueness && handoff; }
};

struct VerificationReport {
  std::vector<SegmentCheck> segments;
  bool chain_ok = false;  // times tile [0, 1]
  bool final_ok = false;  // final point inside the last region with the claimed residual
  std::vector<std::string> problems;

  bool passed() const;
  std::size_t failed_segments() const;
};

// Throws kMalformedCertificate for structurally broken input (no segments,
// missing fields) and kDimensionMismatch when sizes disagree with the system.
VerificationReport verify(const PathCertificate& cert);

std::string serialize(const PathCertificate& cert);
// Throws kParseError with the byte offset or JSON path of the problem.
PathCertificate deserialize(const std::string& text);

// Parametric system JSON ({n, m, equations: [[{coeff: [re, im], param,
// exponents}]]}); numbers may be JSON numbers or exact decimal strings.
std::string system_to_json(const ParametricSystem& sys);
std::shared_ptr<const ParametricSystem> system_from_json(const std::string& text);

}  // namespace kht
