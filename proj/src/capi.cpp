#include "khtrack/khtrack.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "khtrack/benchmarks.hpp"

struct kht_problem {
  kht::Problem problem;
};

struct kht_certificate {
  kht::PathCertificate cert;
};

struct kht_verification {
  kht::VerificationReport report;
};

struct kht_bench_report {
  kht::BenchmarkReport report;
};

struct kht_dir_verification {
  kht::DirectoryVerification result;
};

namespace {

thread_local std::string g_last_error;

kht_status from_code(kht::ErrorCode c) {
  return static_cast<kht_status>(static_cast<int>(c) + 1);
}

kht_status fail(kht_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
kht_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return KHT_OK;
  } catch (const kht::Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(KHT_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(KHT_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(KHT_INTERNAL_ERROR, "unknown exception");
  }
}

kht::TrackerConfig to_config(const kht_tracker_config& c) {
  kht::TrackerConfig cfg;
  cfg.dt0 = c.dt0;
  cfg.r0 = c.r0;
  cfg.lambda = c.lambda;
  cfg.newton_iters = c.newton_iters;
  cfg.newton_tol = c.newton_tol;
  cfg.max_steps = c.max_steps;
  cfg.mode = c.mode == KHT_MODE_RECT ? kht::TrackMode::kRect : kht::TrackMode::kTilted;
  cfg.extension =
      c.extension == KHT_EXT_NAIVE ? kht::TimeExtension::kNaive : kht::TimeExtension::kTaylor;
  if (c.mode != KHT_MODE_RECT && c.mode != KHT_MODE_TILTED)
    throw kht::Error(kht::ErrorCode::kInvalidArgument, "unknown mode");
  if (c.extension != KHT_EXT_TAYLOR && c.extension != KHT_EXT_NAIVE)
    throw kht::Error(kht::ErrorCode::kInvalidArgument, "unknown time extension");
  return cfg;
}

kht::BenchmarkSpec to_spec(const kht_bench_spec& spec) {
  kht::BenchmarkSpec s;
  s.family = kht::family_from_string(spec.family);
  s.m = spec.m;
  s.n = spec.n;
  s.seed = spec.seed;
  s.lowrank_start = spec.lowrank_identity ? kht::LowRankStart::kIdentity : kht::LowRankStart::kRandom;
  s.cfg = to_config(spec.cfg);
  return s;
}

// malloc'd copy, released by kht_string_free.
char* copy_string(const std::string& s) {
  char* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (!buf) throw std::bad_alloc();
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return buf;
}

#define KHT_REQUIRE(ptr)                                                   \
  do {                                                                     \
    if (!(ptr)) return fail(KHT_INVALID_ARGUMENT, #ptr " must not be null"); \
  } while (0)

}  // namespace

extern "C" {

const char* kht_last_error(void) { return g_last_error.c_str(); }

const char* kht_status_name(kht_status status) {
  if (status == KHT_OK) return "Ok";
  if (status == KHT_INTERNAL_ERROR) return "InternalError";
  if (status > KHT_OK && status < KHT_INTERNAL_ERROR)
    return kht::to_string(static_cast<kht::ErrorCode>(static_cast<int>(status) - 1));
  return "Unknown";
}

void kht_string_free(char* s) { std::free(s); }

void kht_tracker_config_default(kht_tracker_config* cfg) {
  if (!cfg) return;
  const kht::TrackerConfig d;
  cfg->dt0 = d.dt0;
  cfg->r0 = d.r0;
  cfg->lambda = d.lambda;
  cfg->newton_iters = d.newton_iters;
  cfg->newton_tol = d.newton_tol;
  cfg->max_steps = d.max_steps;
  cfg->mode = KHT_MODE_TILTED;
  cfg->extension = KHT_EXT_TAYLOR;
}

// ---- problems --------------------------------------------------------------

kht_status kht_problem_from_json(const char* json, kht_problem** out) {
  KHT_REQUIRE(json);
  KHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new kht_problem{kht::problem_from_json(json)}; });
}

size_t kht_problem_dimension(const kht_problem* p) {
  return p ? p->problem.homotopy.n() : 0;
}

size_t kht_problem_start_count(const kht_problem* p) {
  return p ? p->problem.starts.size() : 0;
}

void kht_problem_free(kht_problem* p) { delete p; }

kht_status kht_problem_track(const kht_problem* problem, size_t index,
                             const kht_tracker_config* cfg, kht_certificate** out,
                             kht_track_stats* stats) {
  KHT_REQUIRE(problem);
  KHT_REQUIRE(out);
  *out = nullptr;
  if (index >= problem->problem.starts.size())
    return fail(KHT_INVALID_ARGUMENT, "start index out of range");
  return guarded([&] {
    kht_tracker_config defaults;
    kht_tracker_config_default(&defaults);
    const kht::TrackerConfig c = to_config(cfg ? *cfg : defaults);
    kht::TrackResult r = kht::track(problem->problem.homotopy, problem->problem.starts[index], c);
    if (stats) {
      stats->accepted = r.accepted;
      stats->rejected = r.rejected;
      stats->final_residual = r.final_residual;
    }
    *out = new kht_certificate{std::move(r.certificate)};
  });
}

// ---- certificates ----------------------------------------------------------

kht_status kht_certificate_from_json(const char* json, kht_certificate** out) {
  KHT_REQUIRE(json);
  KHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new kht_certificate{kht::deserialize(json)}; });
}

kht_status kht_certificate_to_json(const kht_certificate* cert, char** out) {
  KHT_REQUIRE(cert);
  KHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = copy_string(kht::serialize(cert->cert)); });
}

size_t kht_certificate_segment_count(const kht_certificate* cert) {
  return cert ? cert->cert.segments.size() : 0;
}

size_t kht_certificate_dimension(const kht_certificate* cert) {
  return cert ? cert->cert.final_point.size() : 0;
}

kht_status kht_certificate_final_point(const kht_certificate* cert, kht_complex* out, size_t n) {
  KHT_REQUIRE(cert);
  KHT_REQUIRE(out);
  const auto& x = cert->cert.final_point;
  if (n != x.size()) return fail(KHT_DIMENSION_MISMATCH, "output buffer has the wrong length");
  for (size_t i = 0; i < n; ++i) out[i] = {x[i].real(), x[i].imag()};
  g_last_error.clear();
  return KHT_OK;
}

void kht_certificate_free(kht_certificate* cert) { delete cert; }

kht_status kht_certificate_verify(const kht_certificate* cert, kht_verification** out) {
  KHT_REQUIRE(cert);
  KHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new kht_verification{kht::verify(cert->cert)}; });
}

int kht_verification_passed(const kht_verification* v) { return v && v->report.passed(); }
int kht_verification_chain_ok(const kht_verification* v) { return v && v->report.chain_ok; }
int kht_verification_final_ok(const kht_verification* v) { return v && v->report.final_ok; }

size_t kht_verification_segment_count(const kht_verification* v) {
  return v ? v->report.segments.size() : 0;
}

size_t kht_verification_failed_segments(const kht_verification* v) {
  return v ? v->report.failed_segments() : 0;
}

kht_status kht_verification_segment(const kht_verification* v, size_t i, kht_segment_check* out) {
  KHT_REQUIRE(v);
  KHT_REQUIRE(out);
  if (i >= v->report.segments.size()) return fail(KHT_INVALID_ARGUMENT, "segment index out of range");
  const kht::SegmentCheck& s = v->report.segments[i];
  out->existence = s.existence;
  out->uniqueness = s.uniqueness;
  out->handoff = s.handoff;
  out->residual_norm = s.residual_norm;
  out->note = s.note.c_str();
  g_last_error.clear();
  return KHT_OK;
}

size_t kht_verification_problem_count(const kht_verification* v) {
  return v ? v->report.problems.size() : 0;
}

const char* kht_verification_problem(const kht_verification* v, size_t i) {
  if (!v || i >= v->report.problems.size()) return nullptr;
  return v->report.problems[i].c_str();
}

void kht_verification_free(kht_verification* v) { delete v; }

// ---- benchmarks ------------------------------------------------------------

kht_status kht_bench_problem_json(const kht_bench_spec* spec, char** out) {
  KHT_REQUIRE(spec);
  KHT_REQUIRE(spec->family);
  KHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = copy_string(kht::problem_to_json(kht::make_problem(to_spec(*spec)))); });
}

kht_status kht_bench_run(const kht_bench_spec* spec, kht_bench_report** out) {
  KHT_REQUIRE(spec);
  KHT_REQUIRE(spec->family);
  KHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new kht_bench_report{kht::run_benchmark(to_spec(*spec))}; });
}

kht_status kht_bench_summary_get(const kht_bench_report* report, kht_bench_summary* out) {
  KHT_REQUIRE(report);
  KHT_REQUIRE(out);
  const auto& r = report->report;
  out->paths = r.paths.size();
  out->certified = r.certified_count();
  out->min_iterations = r.min_iterations();
  out->max_iterations = r.max_iterations();
  out->avg_iterations = r.avg_iterations();
  out->wall_seconds = r.wall_seconds;
  g_last_error.clear();
  return KHT_OK;
}

kht_status kht_bench_path_get(const kht_bench_report* report, size_t i, kht_bench_path* out) {
  KHT_REQUIRE(report);
  KHT_REQUIRE(out);
  if (i >= report->report.paths.size()) return fail(KHT_INVALID_ARGUMENT, "path index out of range");
  const kht::PathOutcome& p = report->report.paths[i];
  out->certified = p.certified;
  out->accepted = p.accepted;
  out->rejected = p.rejected;
  out->final_residual = p.final_residual;
  out->error = p.error.c_str();
  g_last_error.clear();
  return KHT_OK;
}

kht_status kht_bench_write(const kht_bench_report* report, const char* dir) {
  KHT_REQUIRE(report);
  KHT_REQUIRE(dir);
  return guarded([&] { kht::write_report(report->report, dir); });
}

void kht_bench_report_free(kht_bench_report* report) { delete report; }

kht_status kht_bench_verify_dir(const char* dir, kht_dir_verification** out) {
  KHT_REQUIRE(dir);
  KHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new kht_dir_verification{kht::verify_directory(dir)}; });
}

int kht_dir_verification_passed(const kht_dir_verification* v) { return v && v->result.passed(); }

size_t kht_dir_verification_count(const kht_dir_verification* v) {
  return v ? v->result.certificates.size() : 0;
}

kht_status kht_dir_verification_entry(const kht_dir_verification* v, size_t i, const char** name,
                                      int* passed, size_t* failed_segments) {
  KHT_REQUIRE(v);
  if (i >= v->result.certificates.size()) return fail(KHT_INVALID_ARGUMENT, "entry index out of range");
  const auto& [file, report] = v->result.certificates[i];
  if (name) *name = file.c_str();
  if (passed) *passed = report.passed();
  if (failed_segments) *failed_segments = report.failed_segments();
  g_last_error.clear();
  return KHT_OK;
}

size_t kht_dir_verification_error_count(const kht_dir_verification* v) {
  return v ? v->result.errors.size() : 0;
}

const char* kht_dir_verification_error(const kht_dir_verification* v, size_t i) {
  if (!v || i >= v->result.errors.size()) return nullptr;
  return v->result.errors[i].c_str();
}

void kht_dir_verification_free(kht_dir_verification* v) { delete v; }

}  // extern "C"
