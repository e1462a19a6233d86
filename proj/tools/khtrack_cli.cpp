// khtrack command line front end. Uses only the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "khtrack/khtrack.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;  // verification failed or a path was not certified
constexpr int kExitError = 2;

int report_error(kht_status s) {
  std::cerr << "error [" << kht_status_name(s) << "]: " << kht_last_error() << "\n";
  return kExitError;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

struct ConfigOptions {
  std::string mode = "tilted";
  std::string extension = "taylor";
  kht_tracker_config cfg{};

  ConfigOptions() { kht_tracker_config_default(&cfg); }

  void attach(CLI::App* app) {
    app->add_option("--mode", mode, "rect or tilted")->check(CLI::IsMember({"rect", "tilted"}));
    app->add_option("--extension", extension, "time extension: taylor or naive")
        ->check(CLI::IsMember({"taylor", "naive"}));
    app->add_option("--dt0", cfg.dt0, "initial time step");
    app->add_option("--r0", cfg.r0, "initial box radius");
    app->add_option("--lambda", cfg.lambda, "step growth/shrink factor");
    app->add_option("--newton-iters", cfg.newton_iters, "Newton iteration cap");
    app->add_option("--newton-tol", cfg.newton_tol, "Newton residual tolerance");
    app->add_option("--max-steps", cfg.max_steps, "Krawczyk test budget per path");
  }

  kht_tracker_config resolve() const {
    kht_tracker_config c = cfg;
    c.mode = mode == "rect" ? KHT_MODE_RECT : KHT_MODE_TILTED;
    c.extension = extension == "naive" ? KHT_EXT_NAIVE : KHT_EXT_TAYLOR;
    return c;
  }
};

struct FamilyOptions {
  std::string family = "katsura";
  double m = 10.0;
  int n = 3;
  std::uint64_t seed = 42;
  std::string start_matrix = "random";

  void attach(CLI::App* app) {
    app->add_option("--family", family, "newton, random, katsura or lowrank")
        ->check(CLI::IsMember({"newton", "random", "katsura", "lowrank"}));
    app->add_option("--m", m, "newton homotopy parameter");
    app->add_option("--n", n, "size: random k, katsura n, lowrank n");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--start-matrix", start_matrix, "lowrank start: random or identity")
        ->check(CLI::IsMember({"random", "identity"}));
  }

  kht_bench_spec resolve(const kht_tracker_config& cfg) const {
    kht_bench_spec s{};
    s.family = family.c_str();
    s.m = m;
    s.n = n;
    s.seed = seed;
    s.lowrank_identity = start_matrix == "identity";
    s.cfg = cfg;
    return s;
  }
};

int bench_run(const FamilyOptions& fam, const ConfigOptions& conf, const std::string& out) {
  const kht_bench_spec spec = fam.resolve(conf.resolve());
  kht_bench_report* report = nullptr;
  if (const kht_status s = kht_bench_run(&spec, &report); s != KHT_OK) return report_error(s);

  kht_bench_summary sum{};
  kht_bench_summary_get(report, &sum);
  for (size_t i = 0; i < sum.paths; ++i) {
    kht_bench_path p{};
    kht_bench_path_get(report, i, &p);
    std::printf("path %zu: %s iterations=%d (accepted %d, rejected %d)", i,
                p.certified ? "certified" : "FAILED", p.accepted + p.rejected, p.accepted,
                p.rejected);
    if (p.certified)
      std::printf(" residual=%.3g\n", p.final_residual);
    else
      std::printf(" %s\n", p.error);
  }
  std::printf("%zu/%zu certified, iterations min %d avg %.2f max %d, %.2fs\n", sum.certified,
              sum.paths, sum.min_iterations, sum.avg_iterations, sum.max_iterations,
              sum.wall_seconds);

  const kht_status ws = kht_bench_write(report, out.c_str());
  kht_bench_report_free(report);
  if (ws != KHT_OK) return report_error(ws);
  std::printf("wrote %s\n", out.c_str());
  return sum.certified == sum.paths ? kExitOk : kExitRejected;
}

int bench_problem(const FamilyOptions& fam, const std::string& out) {
  kht_bench_spec spec = fam.resolve(ConfigOptions().resolve());
  char* json = nullptr;
  if (const kht_status s = kht_bench_problem_json(&spec, &json); s != KHT_OK) return report_error(s);
  bool ok = true;
  if (out.empty() || out == "-")
    std::cout << json << "\n";
  else
    ok = write_file(out, json);
  kht_string_free(json);
  if (!ok) {
    std::cerr << "error: cannot write " << out << "\n";
    return kExitError;
  }
  return kExitOk;
}

int bench_verify(const std::string& dir) {
  kht_dir_verification* v = nullptr;
  if (const kht_status s = kht_bench_verify_dir(dir.c_str(), &v); s != KHT_OK) return report_error(s);
  const size_t n = kht_dir_verification_count(v);
  for (size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    int passed = 0;
    size_t failed = 0;
    kht_dir_verification_entry(v, i, &name, &passed, &failed);
    std::printf("%s: %s", name, passed ? "PASS" : "FAIL");
    if (!passed) std::printf(" (%zu failed segments)", failed);
    std::printf("\n");
  }
  for (size_t i = 0; i < kht_dir_verification_error_count(v); ++i)
    std::printf("error: %s\n", kht_dir_verification_error(v, i));
  const bool ok = kht_dir_verification_passed(v);
  std::printf("%zu certificates, %s\n", n, ok ? "all verified" : "verification FAILED");
  kht_dir_verification_free(v);
  return ok ? kExitOk : kExitRejected;
}

int verify_file(const std::string& path, bool verbose) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "error: cannot read " << path << "\n";
    return kExitError;
  }
  kht_certificate* cert = nullptr;
  if (const kht_status s = kht_certificate_from_json(text.c_str(), &cert); s != KHT_OK)
    return report_error(s);
  kht_verification* v = nullptr;
  const kht_status s = kht_certificate_verify(cert, &v);
  kht_certificate_free(cert);
  if (s != KHT_OK) return report_error(s);

  const size_t segs = kht_verification_segment_count(v);
  for (size_t i = 0; i < segs; ++i) {
    kht_segment_check c{};
    kht_verification_segment(v, i, &c);
    const bool ok = c.existence && c.uniqueness && c.handoff;
    if (ok && !verbose) continue;
    std::printf("segment %zu: existence=%d uniqueness=%d handoff=%d residual=%.3g%s%s\n", i,
                c.existence, c.uniqueness, c.handoff, c.residual_norm, c.note[0] ? " " : "",
                c.note);
  }
  for (size_t i = 0; i < kht_verification_problem_count(v); ++i)
    std::printf("problem: %s\n", kht_verification_problem(v, i));
  const bool passed = kht_verification_passed(v);
  std::printf("%s: %zu segments, %zu failed, chain %s, endpoint %s -> %s\n", path.c_str(), segs,
              kht_verification_failed_segments(v), kht_verification_chain_ok(v) ? "ok" : "broken",
              kht_verification_final_ok(v) ? "ok" : "bad", passed ? "PASS" : "FAIL");
  kht_verification_free(v);
  return passed ? kExitOk : kExitRejected;
}

int track(const std::string& input, const ConfigOptions& conf, int index, const std::string& out) {
  std::string text;
  if (!read_file(input, text)) {
    std::cerr << "error: cannot read " << input << "\n";
    return kExitError;
  }
  kht_problem* problem = nullptr;
  if (const kht_status s = kht_problem_from_json(text.c_str(), &problem); s != KHT_OK)
    return report_error(s);

  const size_t count = kht_problem_start_count(problem);
  const size_t n = kht_problem_dimension(problem);
  const size_t first = index < 0 ? 0 : static_cast<size_t>(index);
  const size_t last = index < 0 ? count : first + 1;
  if (first >= count) {
    kht_problem_free(problem);
    std::cerr << "error: start index out of range (" << count << " starts)\n";
    return kExitError;
  }
  if (!out.empty()) std::filesystem::create_directories(out);

  const kht_tracker_config cfg = conf.resolve();
  int rc = kExitOk;
  for (size_t i = first; i < last; ++i) {
    kht_certificate* cert = nullptr;
    kht_track_stats stats{};
    const kht_status s = kht_problem_track(problem, i, &cfg, &cert, &stats);
    if (s != KHT_OK) {
      std::printf("path %zu: FAILED [%s] %s\n", i, kht_status_name(s), kht_last_error());
      rc = kExitRejected;
      continue;
    }
    std::vector<kht_complex> x(n);
    kht_certificate_final_point(cert, x.data(), n);
    std::printf("path %zu: certified, iterations=%d, segments=%zu, residual=%.3g\n  x =", i,
                stats.accepted + stats.rejected, kht_certificate_segment_count(cert),
                stats.final_residual);
    for (const auto& z : x) std::printf(" (%.17g, %.17g)", z.re, z.im);
    std::printf("\n");
    if (!out.empty()) {
      char* json = nullptr;
      if (kht_certificate_to_json(cert, &json) == KHT_OK) {
        const auto path = std::filesystem::path(out) / ("cert_" + std::to_string(i) + ".json");
        if (!write_file(path, json)) {
          std::cerr << "error: cannot write " << path << "\n";
          rc = kExitError;
        }
        kht_string_free(json);
      }
    }
    kht_certificate_free(cert);
  }
  kht_problem_free(problem);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified homotopy path tracking with the parametric Krawczyk test"};
  app.require_subcommand(1);

  auto* bench = app.add_subcommand("bench", "benchmark families");
  bench->require_subcommand(1);

  FamilyOptions run_family;
  ConfigOptions run_conf;
  std::string run_out = "results";
  auto* run = bench->add_subcommand("run", "track every path of a family and write results");
  run_family.attach(run);
  run_conf.attach(run);
  run->add_option("--out", run_out, "output directory");

  FamilyOptions prob_family;
  std::string prob_out;
  auto* prob = bench->add_subcommand("problem", "write a family's problem JSON");
  prob_family.attach(prob);
  prob->add_option("--out", prob_out, "output file (stdout when omitted)");

  std::string verify_dir;
  auto* bverify = bench->add_subcommand("verify", "replay every certificate in a results directory");
  bverify->add_option("dir", verify_dir, "results directory")->required();

  std::string verify_path;
  bool verbose = false;
  auto* verify = app.add_subcommand("verify", "replay one certificate; exit 0 iff it passes");
  verify->add_option("file", verify_path, "certificate JSON")->required();
  verify->add_flag("-v,--verbose", verbose, "print every segment");

  std::string track_input;
  std::string track_out;
  int track_index = -1;
  ConfigOptions track_conf;
  auto* trk = app.add_subcommand("track", "track the paths of a problem JSON");
  trk->add_option("--input", track_input, "problem JSON")->required();
  trk->add_option("--index", track_index, "track only this start (default: all)");
  trk->add_option("--out", track_out, "directory for cert_<i>.json");
  track_conf.attach(trk);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return bench_run(run_family, run_conf, run_out);
    if (*prob) return bench_problem(prob_family, prob_out);
    if (*bverify) return bench_verify(verify_dir);
    if (*verify) return verify_file(verify_path, verbose);
    if (*trk) return track(track_input, track_conf, track_index, track_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
