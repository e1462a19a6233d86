#include "khtrack/benchmarks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "json_io.hpp"

namespace kht {

namespace {

using jsonio::json;

// Seeded generator with explicitly defined transforms so that streams do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  Complex complex_normal() { return Complex(normal(), normal()) / std::numbers::sqrt2; }

 private:
  std::mt19937_64 eng_;
};

std::vector<int> unit_exponents(std::size_t n) { return std::vector<int>(n, 0); }

std::vector<std::vector<int>> quadratic_monomials(int k) {
  std::vector<std::vector<int>> out;
  const auto n = static_cast<std::size_t>(k);
  out.push_back(unit_exponents(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto e = unit_exponents(n);
    e[i] = 1;
    out.push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      auto e = unit_exponents(n);
      e[i] += 1;
      e[j] += 1;
      out.push_back(e);
    }
  }
  return out;
}

double dist(const PointVector& a, const PointVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// ---------------------------------------------------------------- bootstrap

struct PlainTracker {
  const Homotopy& h;
  PointVector dp;

  Eigen::VectorXcd velocity(const PointVector& x, double t) const {
    const PointMatrix j = jac_x_point(h, x, t);
    return -solve_point(j, to_eigen(f1_eval(h.system(), x, dp)));
  }

  static PointVector axpy(const PointVector& x, double a, const Eigen::VectorXcd& v) {
    PointVector out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * v(static_cast<Eigen::Index>(i));
    return out;
  }

  // A few Newton steps; succeeds only on small, quadratically shrinking
  // corrections.
  bool correct(PointVector& x, double t) const {
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 5; ++it) {
      const Eigen::VectorXcd dx = solve_point(jac_x_point(h, x, t), to_eigen(eval_point(h, x, t)));
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dx(static_cast<Eigen::Index>(i));
      const double step = dx.cwiseAbs().maxCoeff();
      const double scale = 1.0 + inf_norm(x);
      if (it == 0 && step > 1e-2 * scale) return false;
      if (step <= 1e-10 * scale) return true;
      if (it > 0 && step > 0.5 * prev) return false;
      prev = step;
    }
    return false;
  }

  std::optional<PointVector> run(PointVector x) const {
    double t = 0.0;
    double step = 0.01;
    while (t < 1.0) {
      const double s = std::min(step, 1.0 - t);
      bool ok = false;
      PointVector next;
      try {
        const auto k1 = velocity(x, t);
        const auto k2 = velocity(axpy(x, s / 2, k1), t + s / 2);
        const auto k3 = velocity(axpy(x, s / 2, k2), t + s / 2);
        const auto k4 = velocity(axpy(x, s, k3), t + s);
        next = axpy(x, s / 6, k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ok = correct(next, std::min(t + s, 1.0));
      } catch (const Error&) {
        ok = false;
      }
      if (ok) {
        x = std::move(next);
        t = (s == 1.0 - t) ? 1.0 : t + s;
        step = std::min(step * 1.5, 0.05);
      } else {
        step /= 2.0;
        if (step < 1e-10) return std::nullopt;
      }
      if (!(inf_norm(x) < 1e8)) return std::nullopt;
    }
    return x;
  }
};

// ---------------------------------------------------------------- reports

std::string status_of(const PathOutcome& p) { return p.certified ? "certified" : "failed"; }

json config_json(const TrackerConfig& cfg) {
  return {{"dt0", jsonio::encode(cfg.dt0)},
          {"r0", jsonio::encode(cfg.r0)},
          {"lambda", jsonio::encode(cfg.lambda)},
          {"mode", to_string(cfg.mode)},
          {"extension", to_string(cfg.extension)},
          {"newton_iters", cfg.newton_iters},
          {"newton_tol", jsonio::encode(cfg.newton_tol)},
          {"max_steps", cfg.max_steps}};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + p.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + p.string());
}

std::string cert_name(std::size_t i) { return "cert_" + std::to_string(i) + ".json"; }

}  // namespace

// ---------------------------------------------------------------- generators

Problem gen_newton_homotopy(double m) {
  if (!(m > -1.0) || !std::isfinite(m))
    throw Error(ErrorCode::kInvalidArgument, "newton homotopy needs m > -1");
  std::vector<Polynomial> eqs{{Term{Complex(1.0), -1, {2}}, Term{Complex(-1.0 - m), -1, {0}},
                               Term{Complex(1.0), 0, {0}}}};
  auto sys = std::make_shared<const ParametricSystem>(1, 1, std::move(eqs));
  Problem p{"newton_homotopy(m=" + format_double(m) + ")",
            Homotopy(sys, {Complex(0.0)}, {Complex(m)}),
            {{Complex(std::sqrt(1.0 + m))}}};
  return p;
}

double newton_homotopy_path(double m, double t) { return std::sqrt(1.0 + m - m * t); }

Problem gen_random_quadratic(int k, std::uint64_t seed) {
  if (k < 1 || k > 8) throw Error(ErrorCode::kInvalidArgument, "random quadratic needs 1 <= k <= 8");
  const auto monos = quadratic_monomials(k);
  const std::size_t per_eq = monos.size();
  const auto n = static_cast<std::size_t>(k);
  std::vector<Polynomial> eqs(n);
  PointVector p0(n * per_eq, Complex(0.0));
  PointVector p1(n * per_eq);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < per_eq; ++j) {
      const auto param = static_cast<int>(i * per_eq + j);
      eqs[i].push_back(Term{Complex(1.0), param, monos[j]});
      p1[i * per_eq + j] = rng.complex_normal();
    }
    // Constant is monomial 0; x_i^2 is the first square of variable i.
    p0[i * per_eq] = Complex(-1.0);
    for (std::size_t j = 0; j < per_eq; ++j)
      if (monos[j][i] == 2) p0[i * per_eq + j] = Complex(1.0);
  }
  auto sys = std::make_shared<const ParametricSystem>(n, n * per_eq, std::move(eqs));
  std::vector<PointVector> starts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    PointVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = Complex((mask >> i) & 1U ? -1.0 : 1.0);
    starts.push_back(std::move(x));
  }
  return {"random_quadratic(k=" + std::to_string(k) + ")", Homotopy(sys, std::move(p0), std::move(p1)),
          std::move(starts)};
}

Problem gen_katsura(int n, std::uint64_t seed) {
  if (n < 3 || n > 6) throw Error(ErrorCode::kInvalidArgument, "katsura needs 3 <= n <= 6");
  const auto nn = static_cast<std::size_t>(n);
  std::vector<std::map<std::vector<int>, double>> shapes(nn);
  for (int m = 0; m + 1 < n; ++m) {
    auto& eq = shapes[static_cast<std::size_t>(m)];
    for (int i = -(n - 1); i <= n - 1; ++i) {
      const int a = std::abs(i);
      const int b = std::abs(m - i);
      if (a >= n || b >= n) continue;
      auto e = unit_exponents(nn);
      e[static_cast<std::size_t>(a)] += 1;
      e[static_cast<std::size_t>(b)] += 1;
      eq[e] += 1.0;
    }
    auto e = unit_exponents(nn);
    e[static_cast<std::size_t>(m)] = 1;
    eq[e] -= 1.0;
    eq[unit_exponents(nn)] += 0.0;
  }
  auto& lin = shapes[nn - 1];
  for (std::size_t i = 0; i < nn; ++i) {
    auto e = unit_exponents(nn);
    e[i] = 1;
    lin[e] = i == 0 ? 1.0 : 2.0;
  }
  lin[unit_exponents(nn)] = -1.0;

  std::vector<Polynomial> eqs(nn);
  PointVector target;
  for (std::size_t i = 0; i < nn; ++i) {
    for (const auto& [expo, coeff] : shapes[i]) {
      eqs[i].push_back(Term{Complex(1.0), static_cast<int>(target.size()), expo});
      target.push_back(Complex(coeff));
    }
  }
  Rng rng(seed);
  PointVector start(target.size());
  for (auto& z : start) z = rng.complex_normal();
  auto sys = std::make_shared<const ParametricSystem>(nn, target.size(), std::move(eqs));
  auto starts = bootstrap_starts(sys, start, seed, std::size_t{1} << (nn - 1));
  return {"katsura(" + std::to_string(n) + ")", Homotopy(sys, std::move(start), std::move(target)),
          std::move(starts)};
}

std::vector<PointVector> bootstrap_starts(std::shared_ptr<const ParametricSystem> sys,
                                          const PointVector& p, std::uint64_t seed,
                                          std::size_t expected) {
  const std::size_t n = sys->n();
  if (p.size() != sys->m()) throw Error(ErrorCode::kDimensionMismatch, "bootstrap parameters");

  // Combined system: (1-t) gamma (x_i^d_i - 1) + t F(x; p) as a linear
  // parameter segment. Parameters 2i, 2i+1 scale the start binomial of
  // equation i; the rest carry the values of F's terms.
  std::vector<Polynomial> eqs(n);
  std::vector<int> degrees(n, 0);
  PointVector target(2 * n, Complex(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& t : sys->equations()[i]) {
      int deg = 0;
      for (int e : t.exponents) deg += e;
      degrees[i] = std::max(degrees[i], deg);
      eqs[i].push_back(Term{Complex(1.0), static_cast<int>(target.size()), t.exponents});
      target.push_back(t.param < 0 ? t.coeff : t.coeff * p[static_cast<std::size_t>(t.param)]);
    }
    if (degrees[i] < 1) throw Error(ErrorCode::kInvalidArgument, "bootstrap needs non-constant equations");
    auto e = unit_exponents(n);
    e[i] = degrees[i];
    eqs[i].push_back(Term{Complex(1.0), static_cast<int>(2 * i), e});
    eqs[i].push_back(Term{Complex(1.0), static_cast<int>(2 * i + 1), unit_exponents(n)});
  }
  auto combined = std::make_shared<const ParametricSystem>(n, target.size(), std::move(eqs));

  std::size_t bezout = 1;
  for (int d : degrees) bezout *= static_cast<std::size_t>(d);
  if (bezout < expected)
    throw Error(ErrorCode::kRootCountMismatch, "expected more roots than the Bezout number");

  std::vector<PointVector> roots;
  TrackerConfig polish;
  polish.newton_iters = 30;
  const Homotopy target_h(sys, p, p);
  for (int attempt = 0; attempt < 4 && roots.size() < expected; ++attempt) {
    Rng rng(seed * 7919 + static_cast<std::uint64_t>(attempt) + 1);
    const Complex gamma = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    PointVector start(target.size(), Complex(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      start[2 * i] = gamma;
      start[2 * i + 1] = -gamma;
    }
    const Homotopy h(combined, start, target);
    PlainTracker tracker{h, {}};
    tracker.dp.resize(target.size());
    for (std::size_t k = 0; k < target.size(); ++k) tracker.dp[k] = target[k] - start[k];

    std::vector<std::size_t> digit(n, 0);
    for (std::size_t path = 0; path < bezout; ++path) {
      PointVector x(n);
      for (std::size_t i = 0; i < n; ++i)
        x[i] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(digit[i]) / degrees[i]);
      for (std::size_t i = 0; i < n; ++i) {
        if (++digit[i] < static_cast<std::size_t>(degrees[i])) break;
        digit[i] = 0;
      }
      const auto end = tracker.run(std::move(x));
      if (!end) continue;
      PointVector root;
      try {
        root = newton_refine(target_h, *end, 1.0, polish).x;
      } catch (const Error&) {
        continue;
      }
      if (!(inf_norm(root) < 1e8)) continue;
      const bool dup = std::any_of(roots.begin(), roots.end(), [&](const PointVector& r) {
        return dist(r, root) <= 1e-6 * (1.0 + inf_norm(r));
      });
      if (!dup) roots.push_back(std::move(root));
    }
  }
  if (roots.size() != expected)
    throw Error(ErrorCode::kRootCountMismatch, "found " + std::to_string(roots.size()) +
                                                   " distinct roots, expected " +
                                                   std::to_string(expected));
  return roots;
}

// ---------------------------------------------------------------- SVD

Svd svd_oracle(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::kDimensionMismatch, "svd_oracle needs a square matrix");
  const Eigen::Index n = a.cols();
  Eigen::MatrixXd u = a;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i < n - 1; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double alpha = u.col(i).squaredNorm();
        const double beta = u.col(j).squaredNorm();
        const double gamma = u.col(i).dot(u.col(j));
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Eigen::VectorXd ui = u.col(i);
        u.col(i) = c * ui - s * u.col(j);
        u.col(j) = s * ui + c * u.col(j);
        const Eigen::VectorXd vi = v.col(i);
        v.col(i) = c * vi - s * v.col(j);
        v.col(j) = s * vi + c * v.col(j);
      }
    }
    if (!rotated) break;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::vector<double> norms(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) norms[static_cast<std::size_t>(i)] = u.col(i).norm();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return norms[static_cast<std::size_t>(x)] > norms[static_cast<std::size_t>(y)];
  });
  Svd out;
  out.u.resize(n, n);
  out.v.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    const double sigma = norms[static_cast<std::size_t>(src)];
    out.sigma.push_back(sigma);
    out.u.col(k) = sigma > 0.0 ? Eigen::VectorXd(u.col(src) / sigma) : Eigen::VectorXd::Zero(n);
    out.v.col(k) = v.col(src);
  }
  return out;
}

Eigen::MatrixXd hilbert(int n) {
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = 1.0 / static_cast<double>(i + j + 1);
  return h;
}

Eigen::MatrixXd default_lowrank_start(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "matrix size must be positive");
  Rng rng(seed);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.1 + 0.9 * rng.uniform();
  return a / svd_oracle(a).sigma[0];
}

LowRankProblem gen_lowrank(int n, const Eigen::MatrixXd& a0, const Eigen::MatrixXd& a1,
                           std::uint64_t seed) {
  if (n < 2 || n > 20) throw Error(ErrorCode::kInvalidArgument, "low-rank needs 2 <= n <= 20");
  if (a0.rows() != n || a0.cols() != n || a1.rows() != n || a1.cols() != n)
    throw Error(ErrorCode::kDimensionMismatch, "low-rank matrices must be n x n");
  const auto nn = static_cast<std::size_t>(n);
  const std::size_t vars = 2 * nn;
  auto xe = [&](std::size_t k) { return k; };
  auto ye = [&](std::size_t j) { return nn + j; };
  auto param = [&](std::size_t k, std::size_t j) { return static_cast<int>(k * nn + j); };

  Rng rng(seed);
  Eigen::VectorXd b(n);
  for (int k = 0; k < n; ++k) b(k) = 0.5 + rng.uniform();

  const Svd svd = svd_oracle(a0);
  if (!(svd.sigma[0] - svd.sigma[1] > 1e-8))
    throw Error(ErrorCode::kDegenerateStart, "largest singular value of the start matrix is repeated");
  const double bu = b.dot(svd.u.col(0));
  if (!(std::abs(bu) > 1e-8))
    throw Error(ErrorCode::kDegenerateStart, "chart is orthogonal to the top singular vector");
  // Chart offset that puts the start at the balanced factors sqrt(s1) u1, sqrt(s1) v1.
  const double s = std::sqrt(svd.sigma[0]);
  const double c = s * bu;

  std::vector<Polynomial> eqs;
  for (std::size_t k = 1; k < nn; ++k) {
    Polynomial eq;
    for (std::size_t j = 0; j < nn; ++j) {
      auto e = unit_exponents(vars);
      e[ye(j)] = 1;
      eq.push_back(Term{Complex(-2.0), param(k, j), e});
    }
    for (std::size_t j = 0; j < nn; ++j) {
      auto e = unit_exponents(vars);
      e[xe(k)] = 1;
      e[ye(j)] = 2;
      eq.push_back(Term{Complex(2.0), -1, e});
    }
    eqs.push_back(std::move(eq));
  }
  for (std::size_t j = 0; j < nn; ++j) {
    Polynomial eq;
    for (std::size_t k = 0; k < nn; ++k) {
      auto e = unit_exponents(vars);
      e[xe(k)] = 1;
      eq.push_back(Term{Complex(-2.0), param(k, j), e});
    }
    for (std::size_t k = 0; k < nn; ++k) {
      auto e = unit_exponents(vars);
      e[ye(j)] = 1;
      e[xe(k)] = 2;
      eq.push_back(Term{Complex(2.0), -1, e});
    }
    eqs.push_back(std::move(eq));
  }
  Polynomial chart;
  for (std::size_t k = 0; k < nn; ++k) {
    auto e = unit_exponents(vars);
    e[xe(k)] = 1;
    chart.push_back(Term{Complex(b(static_cast<Eigen::Index>(k))), -1, e});
  }
  chart.push_back(Term{Complex(-c), -1, unit_exponents(vars)});
  eqs.push_back(std::move(chart));

  PointVector p0(nn * nn);
  PointVector p1(nn * nn);
  for (std::size_t k = 0; k < nn; ++k)
    for (std::size_t j = 0; j < nn; ++j) {
      p0[k * nn + j] = Complex(a0(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)));
      p1[k * nn + j] = Complex(a1(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)));
    }

  PointVector start(vars);
  for (std::size_t k = 0; k < nn; ++k) {
    start[xe(k)] = Complex(s * svd.u(static_cast<Eigen::Index>(k), 0));
    start[ye(k)] = Complex(svd.sigma[0] / s * svd.v(static_cast<Eigen::Index>(k), 0));
  }
  auto sys = std::make_shared<const ParametricSystem>(vars, nn * nn, std::move(eqs));
  return {Problem{"lowrank(" + std::to_string(n) + ")", Homotopy(sys, std::move(p0), std::move(p1)),
                 {std::move(start)}},
          std::move(b), c};
}

// ---------------------------------------------------------------- runner

const char* to_string(Family f) noexcept {
  switch (f) {
    case Family::kNewtonHomotopy: return "newton";
    case Family::kRandomQuadratic: return "random";
    case Family::kKatsura: return "katsura";
    case Family::kLowRank: return "lowrank";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  if (s == "newton") return Family::kNewtonHomotopy;
  if (s == "random") return Family::kRandomQuadratic;
  if (s == "katsura") return Family::kKatsura;
  if (s == "lowrank") return Family::kLowRank;
  throw Error(ErrorCode::kInvalidArgument, "unknown benchmark family '" + s + "'");
}

Problem make_problem(const BenchmarkSpec& spec) {
  switch (spec.family) {
    case Family::kNewtonHomotopy: return gen_newton_homotopy(spec.m);
    case Family::kRandomQuadratic: return gen_random_quadratic(spec.n, spec.seed);
    case Family::kKatsura: return gen_katsura(spec.n, spec.seed);
    case Family::kLowRank: {
      const Eigen::MatrixXd a0 = spec.lowrank_start == LowRankStart::kIdentity
                                     ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(spec.n, spec.n))
                                     : default_lowrank_start(spec.n, spec.seed);
      return gen_lowrank(spec.n, a0, hilbert(spec.n), spec.seed).problem;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown benchmark family");
}

std::size_t BenchmarkReport::certified_count() const {
  return static_cast<std::size_t>(
      std::count_if(paths.begin(), paths.end(), [](const PathOutcome& p) { return p.certified; }));
}

int BenchmarkReport::min_iterations() const {
  int best = std::numeric_limits<int>::max();
  for (const auto& p : paths)
    if (p.certified) best = std::min(best, p.iterations());
  return best == std::numeric_limits<int>::max() ? 0 : best;
}

int BenchmarkReport::max_iterations() const {
  int best = 0;
  for (const auto& p : paths)
    if (p.certified) best = std::max(best, p.iterations());
  return best;
}

double BenchmarkReport::avg_iterations() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : paths) {
    if (!p.certified) continue;
    sum += p.iterations();
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::size_t worker_count() {
  if (const char* env = std::getenv("KHTRACK_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

BenchmarkReport run_benchmark(const BenchmarkSpec& spec) {
  spec.cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  const Problem problem = make_problem(spec);
  BenchmarkReport report;
  report.name = problem.name;
  report.spec = spec;
  report.paths.resize(problem.starts.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < problem.starts.size(); i = next++) {
      PathOutcome& out = report.paths[i];
      out.index = i;
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<StepRecord> steps;
      try {
        TrackResult r = track(problem.homotopy, problem.starts[i], spec.cfg,
                              [&](const StepRecord& s) { steps.push_back(s); });
        out.certified = true;
        out.accepted = r.accepted;
        out.rejected = r.rejected;
        out.endpoint = r.final_point;
        out.final_residual = r.final_residual;
        out.certificate = std::move(r.certificate);
      } catch (const Error& e) {
        out.error = e.what();
        for (const auto& s : steps) (s.accepted ? out.accepted : out.rejected) += 1;
      }
      out.steps = std::move(steps);
      out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(1, problem.starts.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return report;
}

std::string report_json(const BenchmarkReport& report) {
  const BenchmarkSpec& s = report.spec;
  json params = {{"seed", s.seed}};
  if (s.family == Family::kNewtonHomotopy) params["m"] = jsonio::encode(s.m);
  else params["n"] = s.n;
  if (s.family == Family::kLowRank)
    params["start_matrix"] = s.lowrank_start == LowRankStart::kIdentity ? "identity" : "random";

  json paths = json::array();
  for (const auto& p : report.paths) {
    json jp = {{"index", p.index},
               {"status", status_of(p)},
               {"iterations", p.iterations()},
               {"accepted", p.accepted},
               {"rejected", p.rejected}};
    if (p.certified) {
      jp["endpoint"] = jsonio::encode(std::span<const Complex>(p.endpoint));
      jp["final_residual"] = jsonio::encode(p.final_residual);
      jp["certificate"] = cert_name(p.index);
    } else {
      jp["error"] = p.error;
    }
    paths.push_back(std::move(jp));
  }
  const json doc = {{"benchmark", report.name},
                    {"family", to_string(s.family)},
                    {"params", std::move(params)},
                    {"config", config_json(s.cfg)},
                    {"paths", std::move(paths)},
                    {"summary",
                     {{"paths", report.paths.size()},
                      {"certified", report.certified_count()},
                      {"min_iterations", report.min_iterations()},
                      {"max_iterations", report.max_iterations()},
                      {"avg_iterations", jsonio::encode(report.avg_iterations())}}}};
  return doc.dump(2) + "\n";
}

std::string steps_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "path_id,step_index,t0,dt,r,accepted,residual_norm\n";
  for (const auto& p : report.paths) {
    for (std::size_t k = 0; k < p.steps.size(); ++k) {
      const StepRecord& s = p.steps[k];
      out << p.index << ',' << k << ',' << format_double(s.t0) << ',' << format_double(s.dt) << ','
          << format_double(s.r) << ',' << (s.accepted ? 1 : 0) << ',' << format_double(s.residual_norm)
          << '\n';
    }
  }
  return out.str();
}

void write_report(const BenchmarkReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "report.json", report_json(report));
  write_file(dir / "steps.csv", steps_csv(report));
  json timing = {{"wall_seconds", report.wall_seconds}, {"workers", worker_count()}};
  json per_path = json::array();
  for (const auto& p : report.paths) per_path.push_back({{"index", p.index}, {"seconds", p.seconds}});
  timing["paths"] = std::move(per_path);
  write_file(dir / "timing.json", timing.dump(2) + "\n");
  for (const auto& p : report.paths)
    if (p.certificate) write_file(dir / cert_name(p.index), serialize(*p.certificate) + "\n");
}

bool DirectoryVerification::passed() const {
  if (!errors.empty() || certificates.empty()) return false;
  return std::all_of(certificates.begin(), certificates.end(),
                     [](const auto& c) { return c.second.passed(); });
}

DirectoryVerification verify_directory(const std::filesystem::path& dir) {
  DirectoryVerification out;
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("cert_", 0) == 0 && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::kIoError, "cannot read " + dir.string() + ": " + ec.message());
  // cert_2 before cert_10
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    const std::string x = a.filename().string(), y = b.filename().string();
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    try {
      std::ifstream in(f, std::ios::binary);
      if (!in) throw Error(ErrorCode::kIoError, "cannot open " + f.string());
      std::stringstream buf;
      buf << in.rdbuf();
      out.certificates.emplace_back(name, verify(deserialize(buf.str())));
    } catch (const Error& e) {
      out.errors.push_back(name + ": " + e.what());
    }
  }
  return out;
}

std::string problem_to_json(const Problem& problem) {
  jsonio::json doc;
  doc["name"] = problem.name;
  doc["system"] = jsonio::json::parse(system_to_json(problem.homotopy.system()));
  doc["p0"] = jsonio::encode(std::span<const Complex>(problem.homotopy.p0()));
  doc["p1"] = jsonio::encode(std::span<const Complex>(problem.homotopy.p1()));
  jsonio::json starts = jsonio::json::array();
  for (const auto& s : problem.starts) starts.push_back(jsonio::encode(std::span<const Complex>(s)));
  doc["starts"] = std::move(starts);
  return doc.dump(1);
}

Problem problem_from_json(const std::string& text) {
  const jsonio::json doc = jsonio::parse(text);
  const std::string root = "$";
  std::shared_ptr<const ParametricSystem> sys;
  try {
    sys = system_from_json(jsonio::field(doc, "system", root).dump());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseError) throw;
    jsonio::fail("$.system", e.what());
  }
  PointVector p0 = jsonio::decode_vector(jsonio::field(doc, "p0", root), "$.p0");
  PointVector p1 = jsonio::decode_vector(jsonio::field(doc, "p1", root), "$.p1");
  if (p0.size() != sys->m() || p1.size() != sys->m())
    throw Error(ErrorCode::kDimensionMismatch, "parameter vectors must have " +
                                                   std::to_string(sys->m()) + " entries");
  const jsonio::json& starts = jsonio::array(jsonio::field(doc, "starts", root), "$.starts");
  Problem out{"", Homotopy(sys, std::move(p0), std::move(p1)), {}};
  if (const auto it = doc.find("name"); it != doc.end()) out.name = jsonio::decode_string(*it, "$.name");
  for (std::size_t i = 0; i < starts.size(); ++i) {
    PointVector s = jsonio::decode_vector(starts[i], "$.starts[" + std::to_string(i) + "]");
    if (s.size() != sys->n())
      throw Error(ErrorCode::kDimensionMismatch,
                  "start " + std::to_string(i) + " has " + std::to_string(s.size()) +
                      " entries, expected " + std::to_string(sys->n()));
    out.starts.push_back(std::move(s));
  }
  return out;
}

}  // namespace kht
