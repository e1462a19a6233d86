#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "khtrack/khtrack.h"

namespace fs = std::filesystem;

namespace {

kht_tracker_config newton_config() {
  kht_tracker_config cfg;
  kht_tracker_config_default(&cfg);
  cfg.dt0 = 0.02;
  cfg.r0 = 0.1;
  return cfg;
}

kht_bench_spec newton_spec(double m) {
  kht_bench_spec spec{};
  spec.family = "newton";
  spec.m = m;
  spec.seed = 42;
  spec.cfg = newton_config();
  return spec;
}

}  // namespace

TEST_CASE("status names and defaults") {
  CHECK(std::string(kht_status_name(KHT_OK)) == "Ok");
  CHECK(std::string(kht_status_name(KHT_PARSE_ERROR)) == "ParseError");
  CHECK(std::string(kht_status_name(KHT_STEP_UNDERFLOW)) == "StepUnderflow");
  CHECK(std::string(kht_status_name(static_cast<kht_status>(999))) == "Unknown");

  kht_tracker_config cfg;
  kht_tracker_config_default(&cfg);
  CHECK(cfg.dt0 == 0.1);
  CHECK(cfg.r0 == 0.1);
  CHECK(cfg.lambda == 3.0);
  CHECK(cfg.mode == KHT_MODE_TILTED);
  CHECK(cfg.extension == KHT_EXT_TAYLOR);
}

TEST_CASE("null arguments and bad input") {
  kht_problem* p = nullptr;
  CHECK(kht_problem_from_json(nullptr, &p) == KHT_INVALID_ARGUMENT);
  CHECK(p == nullptr);
  CHECK(std::string(kht_last_error()).size() > 0);

  CHECK(kht_problem_from_json("{not json", &p) == KHT_PARSE_ERROR);
  CHECK(std::string(kht_last_error()).find("byte") != std::string::npos);

  kht_certificate* c = nullptr;
  CHECK(kht_certificate_from_json("{}", &c) == KHT_PARSE_ERROR);
  CHECK(c == nullptr);

  kht_bench_spec spec = newton_spec(10);
  spec.family = "nope";
  kht_bench_report* r = nullptr;
  CHECK(kht_bench_run(&spec, &r) == KHT_INVALID_ARGUMENT);
  spec = newton_spec(10);
  spec.cfg.lambda = 0.5;
  CHECK(kht_bench_run(&spec, &r) == KHT_INVALID_ARGUMENT);
  spec = newton_spec(10);
  spec.cfg.mode = static_cast<kht_mode>(7);
  CHECK(kht_bench_run(&spec, &r) == KHT_INVALID_ARGUMENT);
  CHECK(r == nullptr);

  // Freeing null handles is a no-op.
  kht_problem_free(nullptr);
  kht_certificate_free(nullptr);
  kht_verification_free(nullptr);
  kht_bench_report_free(nullptr);
  kht_dir_verification_free(nullptr);
  kht_string_free(nullptr);
}

TEST_CASE("problem json, tracking, certificate round trip") {
  const kht_bench_spec spec = newton_spec(10);
  char* text = nullptr;
  REQUIRE(kht_bench_problem_json(&spec, &text) == KHT_OK);
  kht_problem* problem = nullptr;
  REQUIRE(kht_problem_from_json(text, &problem) == KHT_OK);
  kht_string_free(text);
  CHECK(kht_problem_dimension(problem) == 1);
  CHECK(kht_problem_start_count(problem) == 1);

  const kht_tracker_config cfg = newton_config();
  kht_certificate* cert = nullptr;
  CHECK(kht_problem_track(problem, 1, &cfg, &cert, nullptr) == KHT_INVALID_ARGUMENT);
  kht_track_stats stats{};
  REQUIRE(kht_problem_track(problem, 0, &cfg, &cert, &stats) == KHT_OK);
  CHECK(stats.accepted > 0);
  CHECK(stats.final_residual < 1e-10);
  CHECK(kht_certificate_segment_count(cert) == static_cast<size_t>(stats.accepted));
  CHECK(kht_certificate_dimension(cert) == 1);

  kht_complex end[1];
  CHECK(kht_certificate_final_point(cert, end, 2) == KHT_DIMENSION_MISMATCH);
  REQUIRE(kht_certificate_final_point(cert, end, 1) == KHT_OK);
  CHECK(std::abs(end[0].re - 1.0) < 1e-10);

  char* json = nullptr;
  REQUIRE(kht_certificate_to_json(cert, &json) == KHT_OK);
  kht_certificate* back = nullptr;
  REQUIRE(kht_certificate_from_json(json, &back) == KHT_OK);
  char* again = nullptr;
  REQUIRE(kht_certificate_to_json(back, &again) == KHT_OK);
  CHECK(std::string(json) == std::string(again));
  kht_string_free(json);
  kht_string_free(again);

  kht_verification* v = nullptr;
  REQUIRE(kht_certificate_verify(back, &v) == KHT_OK);
  CHECK(kht_verification_passed(v));
  CHECK(kht_verification_chain_ok(v));
  CHECK(kht_verification_final_ok(v));
  CHECK(kht_verification_failed_segments(v) == 0);
  CHECK(kht_verification_problem_count(v) == 0);
  REQUIRE(kht_verification_segment_count(v) == kht_certificate_segment_count(back));
  kht_segment_check s{};
  REQUIRE(kht_verification_segment(v, 0, &s) == KHT_OK);
  CHECK(s.existence);
  CHECK(s.uniqueness);
  CHECK(s.handoff);
  CHECK(s.residual_norm < 1.0 / std::sqrt(2.0));
  CHECK(kht_verification_segment(v, 10000, &s) == KHT_INVALID_ARGUMENT);
  kht_verification_free(v);

  kht_certificate_free(back);
  kht_certificate_free(cert);
  kht_problem_free(problem);
}

TEST_CASE("tracking failures surface as status codes") {
  const kht_bench_spec spec = newton_spec(100);
  char* text = nullptr;
  REQUIRE(kht_bench_problem_json(&spec, &text) == KHT_OK);
  kht_problem* problem = nullptr;
  REQUIRE(kht_problem_from_json(text, &problem) == KHT_OK);
  kht_string_free(text);

  kht_tracker_config cfg = newton_config();
  cfg.max_steps = 5;
  kht_certificate* cert = nullptr;
  CHECK(kht_problem_track(problem, 0, &cfg, &cert, nullptr) == KHT_MAX_STEPS_EXCEEDED);
  CHECK(cert == nullptr);
  CHECK(std::string(kht_last_error()).size() > 0);
  kht_problem_free(problem);
}

TEST_CASE("benchmark run, write and directory verification") {
  kht_bench_spec spec{};
  spec.family = "katsura";
  spec.n = 3;
  spec.seed = 42;
  kht_tracker_config_default(&spec.cfg);

  kht_bench_report* report = nullptr;
  REQUIRE(kht_bench_run(&spec, &report) == KHT_OK);
  kht_bench_summary sum{};
  REQUIRE(kht_bench_summary_get(report, &sum) == KHT_OK);
  CHECK(sum.paths == 4);
  CHECK(sum.certified == 4);
  CHECK(sum.min_iterations <= sum.avg_iterations);
  CHECK(sum.avg_iterations <= sum.max_iterations);

  kht_bench_path path{};
  REQUIRE(kht_bench_path_get(report, 0, &path) == KHT_OK);
  CHECK(path.certified);
  CHECK(std::string(path.error).empty());
  CHECK(path.final_residual <= 1e-8);
  CHECK(kht_bench_path_get(report, 4, &path) == KHT_INVALID_ARGUMENT);

  const fs::path dir = fs::temp_directory_path() / "khtrack_capi_bench";
  fs::remove_all(dir);
  REQUIRE(kht_bench_write(report, dir.string().c_str()) == KHT_OK);
  kht_bench_report_free(report);
  for (const char* f : {"report.json", "timing.json", "steps.csv", "cert_0.json", "cert_3.json"})
    CHECK(fs::exists(dir / f));

  kht_dir_verification* dv = nullptr;
  REQUIRE(kht_bench_verify_dir(dir.string().c_str(), &dv) == KHT_OK);
  CHECK(kht_dir_verification_passed(dv));
  REQUIRE(kht_dir_verification_count(dv) == 4);
  const char* name = nullptr;
  int passed = 0;
  size_t failed = 99;
  REQUIRE(kht_dir_verification_entry(dv, 0, &name, &passed, &failed) == KHT_OK);
  CHECK(std::string(name) == "cert_0.json");
  CHECK(passed);
  CHECK(failed == 0);
  CHECK(kht_dir_verification_error_count(dv) == 0);
  kht_dir_verification_free(dv);

  std::ofstream(dir / "cert_9.json") << "garbage";
  REQUIRE(kht_bench_verify_dir(dir.string().c_str(), &dv) == KHT_OK);
  CHECK(!kht_dir_verification_passed(dv));
  CHECK(kht_dir_verification_error_count(dv) == 1);
  CHECK(std::string(kht_dir_verification_error(dv, 0)).find("cert_9.json") != std::string::npos);
  kht_dir_verification_free(dv);

  CHECK(kht_bench_verify_dir((dir / "missing").string().c_str(), &dv) == KHT_IO_ERROR);
  fs::remove_all(dir);
}
