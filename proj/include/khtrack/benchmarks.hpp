#pragma once

// Benchmark families, start-solution bootstrap, an SVD oracle for the low-rank
// problem, and a batch runner that tracks every path of a family and writes
// report.json, timing.json, steps.csv and one certificate per path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "khtrack/tracker.hpp"

namespace kht {

struct Problem {
  std::string name;
  Homotopy homotopy;
  std::vector<PointVector> starts;
};

// x^2 - 1 - m + p with p moving from 0 to m, i.e. H(x, t) = x^2 - 1 - m + m t.
// Throws kInvalidArgument unless m > -1.
Problem gen_newton_homotopy(double m);
// Closed-form path sqrt(1 + m - m t).
double newton_homotopy_path(double m, double t);

// k dense quadratics in k variables; every coefficient is a parameter. Start:
// x_i^2 - 1 with roots (+-1, ..., +-1). Target: seeded complex Gaussian
// coefficients. 1 <= k <= 8.
Problem gen_random_quadratic(int k, std::uint64_t seed);

// Katsura-n with n variables and 2^(n-1) solutions:
//   sum_{i=-(n-1)}^{n-1} u_|i| u_|m-i| = u_m  (m = 0..n-2),  u_0 + 2 sum u_i = 1.
// Each Katsura monomial plus a constant term carries its own parameter. Start
// parameters are seeded random complex values, starts come from
// bootstrap_starts. 3 <= n <= 6.
Problem gen_katsura(int n, std::uint64_t seed);

// Uncertified total-degree continuation (gamma trick, RK4 predictor, Newton
// corrector) from prod (x_i^{d_i} - 1) to F(.; p). Returns Newton-polished,
// deduplicated roots; throws kRootCountMismatch if fewer than `expected`
// distinct finite roots are found.
std::vector<PointVector> bootstrap_starts(std::shared_ptr<const ParametricSystem> sys,
                                          const PointVector& p, std::uint64_t seed,
                                          std::size_t expected);

struct Svd {
  std::vector<double> sigma;  // descending
  Eigen::MatrixXd u;          // columns are left singular vectors
  Eigen::MatrixXd v;          // columns are right singular vectors
};

// One-sided Jacobi SVD of a real square matrix.
Svd svd_oracle(const Eigen::MatrixXd& a);

Eigen::MatrixXd hilbert(int n);
// Seeded random matrix with entries in [0.1, 1], scaled to sigma_1 = 1. Being
// entrywise positive, every matrix on its segment to a positive target (such
// as the Hilbert matrix) has a simple top singular value with positive
// singular vectors (Perron-Frobenius), so the tracked path stays regular.
Eigen::MatrixXd default_lowrank_start(int n, std::uint64_t seed);

struct LowRankProblem {
  Problem problem;
  Eigen::VectorXd b;
  double c = 1.0;
};

// Critical equations d/dx_2 .. d/dx_n, d/dy_1 .. d/dy_n of ||A - x y^T||^2 and
// the chart b^T x = c, variables (x, y), parameters the entries of A (row
// major). b is seeded with entries in [0.5, 1.5]; c is chosen so the start is
// x = sqrt(sigma_1) u_1, y = sqrt(sigma_1) v_1 for A0. The path runs from A0
// to A1. Throws kDegenerateStart when sigma_1(A0) is not separated from
// sigma_2(A0) by more than 1e-8 or b is orthogonal to u_1.
LowRankProblem gen_lowrank(int n, const Eigen::MatrixXd& a0, const Eigen::MatrixXd& a1,
                           std::uint64_t seed);

enum class Family { kNewtonHomotopy, kRandomQuadratic, kKatsura, kLowRank };
const char* to_string(Family f) noexcept;
Family family_from_string(const std::string& s);

enum class LowRankStart { kRandom, kIdentity };

struct BenchmarkSpec {
  Family family = Family::kKatsura;
  double m = 10.0;  // newton homotopy
  int n = 3;        // random quadratic k, katsura n, low-rank n
  std::uint64_t seed = 42;
  LowRankStart lowrank_start = LowRankStart::kRandom;
  TrackerConfig cfg;
};

Problem make_problem(const BenchmarkSpec& spec);

// {"name", "system", "p0", "p1", "starts"}; name is optional on input.
std::string problem_to_json(const Problem& problem);
// Throws kParseError (with the JSON path) or kDimensionMismatch.
Problem problem_from_json(const std::string& text);

struct PathOutcome {
  std::size_t index = 0;
  bool certified = false;
  int accepted = 0;
  int rejected = 0;
  PointVector endpoint;
  double final_residual = 0.0;
  std::string error;
  double seconds = 0.0;
  std::vector<StepRecord> steps;
  std::optional<PathCertificate> certificate;

  int iterations() const { return accepted + rejected; }
};

struct BenchmarkReport {
  std::string name;
  BenchmarkSpec spec;
  std::vector<PathOutcome> paths;  // sorted by index
  double wall_seconds = 0.0;

  std::size_t certified_count() const;
  int min_iterations() const;
  int max_iterations() const;
  double avg_iterations() const;
};

// Worker count from KHTRACK_WORKERS, else the hardware concurrency.
std::size_t worker_count();

// Tracks all paths concurrently. Per-path failures are recorded, not thrown.
BenchmarkReport run_benchmark(const BenchmarkSpec& spec);

// report.json (deterministic: no timings), timing.json, steps.csv and
// cert_<i>.json for each certified path.
void write_report(const BenchmarkReport& report, const std::filesystem::path& dir);
std::string report_json(const BenchmarkReport& report);
std::string steps_csv(const BenchmarkReport& report);

struct DirectoryVerification {
  std::vector<std::pair<std::string, VerificationReport>> certificates;
  std::vector<std::string> errors;  // unreadable or malformed files

  bool passed() const;
};

// Replays every cert_*.json in dir.
DirectoryVerification verify_directory(const std::filesystem::path& dir);

}  // namespace kht
