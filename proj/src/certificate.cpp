#include "khtrack/certificate.hpp"

#include <cmath>

#include "json_io.hpp"
#include "khtrack/tracker.hpp"

namespace kht {

namespace {

using jsonio::json;

constexpr int kWitnessShrinkSteps = 4;
constexpr double kFinalResidualSlack = 1e-9;

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_dim(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kDimensionMismatch, what);
}

void check_shapes(const PathCertificate& cert) {
  if (!cert.system) throw Error(ErrorCode::kMalformedCertificate, "certificate has no system");
  if (cert.segments.empty()) throw Error(ErrorCode::kMalformedCertificate, "certificate has no segments");
  const std::size_t n = cert.system->n();
  const std::size_t m = cert.system->m();
  require_dim(cert.p0.size() == m && cert.p1.size() == m, "parameter vectors disagree with system");
  require_dim(cert.final_point.size() == n, "final point has wrong dimension");
  for (std::size_t i = 0; i < cert.segments.size(); ++i) {
    const Segment& s = cert.segments[i];
    const std::string tag = "segment " + std::to_string(i) + ": ";
    require_dim(s.box.size() == n, tag + "box has wrong dimension");
    require_dim(s.center.size() == n, tag + "center has wrong dimension");
    require_dim(static_cast<std::size_t>(s.y.rows()) == n && static_cast<std::size_t>(s.y.cols()) == n,
                tag + "preconditioner has wrong shape");
    if (cert.mode == TrackMode::kTilted) {
      if (!s.shear_x0 || !s.shear_x1)
        throw Error(ErrorCode::kMalformedCertificate, tag + "tilted segment without shear");
      require_dim(s.shear_x0->size() == n && s.shear_x1->size() == n, tag + "shear has wrong dimension");
    }
  }
}

bool times_valid(const Segment& s) {
  return std::isfinite(s.t_lo) && std::isfinite(s.t_hi) && 0.0 <= s.t_lo && s.t_lo < s.t_hi &&
         s.t_hi <= 1.0;
}

Homotopy base_homotopy(const PathCertificate& cert) { return Homotopy(cert.system, cert.p0, cert.p1); }

// A point-time Krawczyk existence proof on a box inside both regions shows the
// root each neighbouring segment isolates at t is the same root.
bool handoff_holds(const PathCertificate& cert, const Segment& prev, const Segment& next,
                   std::string& note) {
  const double t = next.t_lo;
  Box overlap;
  if (!intersect(segment_region_at(cert, prev, t), segment_region_at(cert, next, t), overlap)) {
    note = "regions do not meet at t=" + format_double(t);
    return false;
  }
  const Homotopy h = base_homotopy(cert);
  const RealInterval time(t);
  PointVector guess = midpoint(overlap);
  TrackerConfig cfg;
  try {
    guess = newton_refine(h, guess, t, cfg).x;
  } catch (const Error&) {
  }
  PointMatrix y;
  try {
    y = mid_inverse(jac_x_point(h, guess, t)).inverse;
  } catch (const Error&) {
    note = "singular Jacobian at the hand-off point t=" + format_double(t);
    return false;
  }

  std::vector<Box> witnesses{overlap};
  const double rad = overlap.radius();
  for (int k = 1; k <= kWitnessShrinkSteps; ++k) {
    const double rho = rad * std::pow(10.0, -2.0 * k);
    if (!(rho > 0.0)) break;
    Box clipped;
    if (intersect(box_centered(guess, rho), overlap, clipped)) witnesses.push_back(std::move(clipped));
  }
  for (const Box& w : witnesses) {
    const PointVector center = box_contains(w, guess) ? guess : midpoint(w);
    const KrawczykVerdict v = parametric_krawczyk_test(h, center, y, w, time, cert.extension);
    if (v.existence) return true;
  }
  note = "no root proven in the region overlap at t=" + format_double(t);
  return false;
}

json system_json(const ParametricSystem& sys) {
  json eqs = json::array();
  for (const auto& eq : sys.equations()) {
    json terms = json::array();
    for (const auto& t : eq)
      terms.push_back({{"coeff", jsonio::encode(t.coeff)}, {"param", t.param}, {"exponents", t.exponents}});
    eqs.push_back(std::move(terms));
  }
  return {{"n", sys.n()}, {"m", sys.m()}, {"equations", std::move(eqs)}};
}

std::shared_ptr<const ParametricSystem> system_from(const json& j, const std::string& path) {
  const long n = jsonio::decode_int(jsonio::field(j, "n", path), path + ".n");
  const long m = jsonio::decode_int(jsonio::field(j, "m", path), path + ".m");
  if (n <= 0 || m < 0) jsonio::fail(path, "n must be positive and m non-negative");
  const std::string ep = path + ".equations";
  const json& eqs = jsonio::array(jsonio::field(j, "equations", path), ep);
  std::vector<Polynomial> polys;
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const std::string pp = at(ep, i);
    const json& terms = jsonio::array(eqs[i], pp);
    Polynomial poly;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const std::string tp = at(pp, k);
      Term t;
      t.coeff = jsonio::decode_complex(jsonio::field(terms[k], "coeff", tp), tp + ".coeff");
      t.param = static_cast<int>(jsonio::decode_int(jsonio::field(terms[k], "param", tp), tp + ".param"));
      const std::string xp = tp + ".exponents";
      const json& ex = jsonio::array(jsonio::field(terms[k], "exponents", tp), xp);
      for (std::size_t e = 0; e < ex.size(); ++e)
        t.exponents.push_back(static_cast<int>(jsonio::decode_int(ex[e], at(xp, e))));
      poly.push_back(std::move(t));
    }
    polys.push_back(std::move(poly));
  }
  try {
    return std::make_shared<const ParametricSystem>(static_cast<std::size_t>(n),
                                                    static_cast<std::size_t>(m), std::move(polys));
  } catch (const Error& e) {
    jsonio::fail(path, e.what());
  }
}

}  // namespace

const char* to_string(TrackMode m) noexcept { return m == TrackMode::kRect ? "rect" : "tilted"; }

TrackMode track_mode_from_string(const std::string& s) {
  if (s == "rect") return TrackMode::kRect;
  if (s == "tilted") return TrackMode::kTilted;
  throw Error(ErrorCode::kInvalidArgument, "unknown track mode '" + s + "'");
}

Homotopy segment_homotopy(const PathCertificate& cert, const Segment& seg) {
  Homotopy h = base_homotopy(cert);
  if (cert.mode == TrackMode::kRect) return h;
  return apply_shear(h, *seg.shear_x0, *seg.shear_x1, seg.t_lo, seg.t_hi);
}

Box segment_region_at(const PathCertificate& cert, const Segment& seg, double t) {
  if (cert.mode == TrackMode::kRect) return seg.box;
  const RealInterval tau =
      (RealInterval(t) - RealInterval(seg.t_lo)) / (RealInterval(seg.t_hi) - RealInterval(seg.t_lo));
  Box region(seg.box.size());
  for (std::size_t i = 0; i < region.size(); ++i) {
    const ComplexInterval x0((*seg.shear_x0)[i]);
    const ComplexInterval x1((*seg.shear_x1)[i]);
    region[i] = seg.box[i] + (x0 + tau * (x1 - x0));
  }
  return region;
}

bool VerificationReport::passed() const {
  return chain_ok && final_ok && failed_segments() == 0 && !segments.empty();
}

std::size_t VerificationReport::failed_segments() const {
  std::size_t bad = 0;
  for (const auto& s : segments) bad += s.passed() ? 0 : 1;
  return bad;
}

VerificationReport verify(const PathCertificate& cert) {
  check_shapes(cert);
  VerificationReport report;
  const auto& segs = cert.segments;

  report.chain_ok = segs.front().t_lo == 0.0 && segs.back().t_hi == 1.0;
  if (segs.front().t_lo != 0.0) report.problems.push_back("first segment does not start at t=0");
  if (segs.back().t_hi != 1.0) report.problems.push_back("last segment does not end at t=1");
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    if (segs[i].t_hi != segs[i + 1].t_lo) {
      report.chain_ok = false;
      report.problems.push_back("gap or overlap between segments " + std::to_string(i) + " and " +
                                std::to_string(i + 1));
    }
  }

  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& s = segs[i];
    SegmentCheck check;
    if (!times_valid(s)) {
      check.note = "invalid time interval";
      check.residual_norm = std::numeric_limits<double>::infinity();
      report.segments.push_back(std::move(check));
      continue;
    }
    const KrawczykVerdict v = parametric_krawczyk_test(segment_homotopy(cert, s), s.center, s.y, s.box,
                                                       RealInterval(s.t_lo, s.t_hi), cert.extension);
    check.existence = v.existence;
    check.uniqueness = v.uniqueness;
    check.residual_norm = v.residual_norm;
    if (!v.failure.empty()) check.note = v.failure;
    else if (!v.existence) check.note = "Krawczyk image not inside the box";
    else if (!v.uniqueness) check.note = "contraction bound not below 1/sqrt(2)";
    check.handoff = true;
    if (i > 0 && segs[i - 1].t_hi == s.t_lo && times_valid(segs[i - 1])) {
      std::string note;
      check.handoff = handoff_holds(cert, segs[i - 1], s, note);
      if (!check.handoff) check.note += (check.note.empty() ? "" : "; ") + note;
    } else if (i > 0) {
      check.handoff = false;
      check.note += (check.note.empty() ? "" : "; ") + std::string("no shared endpoint with the previous segment");
    }
    report.segments.push_back(std::move(check));
  }

  const Segment& last = segs.back();
  if (times_valid(last) && last.t_hi == 1.0) {
    const Homotopy h = base_homotopy(cert);
    const double residual = inf_norm(eval_point(h, cert.final_point, 1.0));
    const bool residual_ok =
        std::isfinite(residual) && residual <= cert.final_residual * (1.0 + kFinalResidualSlack);
    const bool inside = box_contains(segment_region_at(cert, last, 1.0), cert.final_point);
    report.final_ok = residual_ok && inside;
    if (!residual_ok)
      report.problems.push_back("final residual " + format_double(residual) + " exceeds claimed " +
                                format_double(cert.final_residual));
    if (!inside) report.problems.push_back("final point lies outside the last region");
  } else {
    report.problems.push_back("final point cannot be checked: last segment does not reach t=1");
  }
  return report;
}

std::string serialize(const PathCertificate& cert) {
  if (!cert.system) throw Error(ErrorCode::kMalformedCertificate, "certificate has no system");
  json segs = json::array();
  for (const auto& s : cert.segments) {
    json js = {{"t_lo", jsonio::encode(s.t_lo)},
               {"t_hi", jsonio::encode(s.t_hi)},
               {"box", jsonio::encode(s.box)},
               {"y", jsonio::encode(s.y)},
               {"center", jsonio::encode(std::span<const Complex>(s.center))},
               {"recorded_residual_norm", jsonio::encode(s.recorded_residual_norm)}};
    if (s.shear_x0) js["shear_x0"] = jsonio::encode(std::span<const Complex>(*s.shear_x0));
    if (s.shear_x1) js["shear_x1"] = jsonio::encode(std::span<const Complex>(*s.shear_x1));
    segs.push_back(std::move(js));
  }
  const json doc = {{"format", "khtrack-path-certificate"},
                    {"version", 1},
                    {"mode", to_string(cert.mode)},
                    {"extension", to_string(cert.extension)},
                    {"system", system_json(*cert.system)},
                    {"p0", jsonio::encode(std::span<const Complex>(cert.p0))},
                    {"p1", jsonio::encode(std::span<const Complex>(cert.p1))},
                    {"segments", std::move(segs)},
                    {"final_point", jsonio::encode(std::span<const Complex>(cert.final_point))},
                    {"final_residual", jsonio::encode(cert.final_residual)}};
  return doc.dump(1);
}

PathCertificate deserialize(const std::string& text) {
  const json doc = jsonio::parse(text);
  const std::string root = "$";
  PathCertificate cert;
  try {
    cert.mode = track_mode_from_string(jsonio::decode_string(jsonio::field(doc, "mode", root), "$.mode"));
    cert.extension = time_extension_from_string(
        jsonio::decode_string(jsonio::field(doc, "extension", root), "$.extension"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    jsonio::fail(root, e.what());
  }
  cert.system = system_from(jsonio::field(doc, "system", root), "$.system");
  cert.p0 = jsonio::decode_vector(jsonio::field(doc, "p0", root), "$.p0");
  cert.p1 = jsonio::decode_vector(jsonio::field(doc, "p1", root), "$.p1");
  const json& segs = jsonio::array(jsonio::field(doc, "segments", root), "$.segments");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string p = at("$.segments", i);
    const json& js = segs[i];
    Segment s;
    s.t_lo = jsonio::decode_double(jsonio::field(js, "t_lo", p), p + ".t_lo");
    s.t_hi = jsonio::decode_double(jsonio::field(js, "t_hi", p), p + ".t_hi");
    s.box = jsonio::decode_box(jsonio::field(js, "box", p), p + ".box");
    s.y = jsonio::decode_matrix(jsonio::field(js, "y", p), p + ".y");
    s.center = jsonio::decode_vector(jsonio::field(js, "center", p), p + ".center");
    s.recorded_residual_norm = jsonio::decode_double(jsonio::field(js, "recorded_residual_norm", p),
                                                     p + ".recorded_residual_norm");
    if (js.contains("shear_x0")) s.shear_x0 = jsonio::decode_vector(js["shear_x0"], p + ".shear_x0");
    if (js.contains("shear_x1")) s.shear_x1 = jsonio::decode_vector(js["shear_x1"], p + ".shear_x1");
    cert.segments.push_back(std::move(s));
  }
  cert.final_point = jsonio::decode_vector(jsonio::field(doc, "final_point", root), "$.final_point");
  cert.final_residual =
      jsonio::decode_double(jsonio::field(doc, "final_residual", root), "$.final_residual");
  return cert;
}

std::string system_to_json(const ParametricSystem& sys) { return system_json(sys).dump(); }

std::shared_ptr<const ParametricSystem> system_from_json(const std::string& text) {
  return system_from(jsonio::parse(text), "$");
}

}  // namespace kht
