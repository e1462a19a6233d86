#include "khtrack/tracker.hpp"

#include <cmath>
#include <limits>

namespace kht {

namespace {

constexpr double kStagnationTol = 1e-10;

PointVector zeros(std::size_t n) { return PointVector(n, Complex(0.0, 0.0)); }

class PathRun {
 public:
  PathRun(const Homotopy& h, std::span<const Complex> x0, const TrackerConfig& cfg,
          const StepObserver& observer)
      : base_(h.with_shear(std::nullopt)),
        cfg_(cfg),
        observer_(observer),
        state_(TrackState::initial(cfg, PointVector(x0.begin(), x0.end()))) {
    cfg_.validate();
    if (x0.size() != h.n())
      throw Error(ErrorCode::kDimensionMismatch, "start point has wrong dimension");
    result_.certificate.system = h.system_ptr();
    result_.certificate.p0 = h.p0();
    result_.certificate.p1 = h.p1();
    result_.certificate.mode = cfg.mode;
    result_.certificate.extension = cfg.extension;
    // The start point only has to approximate x(0); polish it when possible.
    try {
      state_.x0 = newton_refine(base_, state_.x0, 0.0, cfg_).x;
    } catch (const Error&) {
    }
  }

  TrackResult rect() {
    PointMatrix y = inverse_jacobian(state_.x0, state_.t0);
    while (state_.t0 < 1.0) {
      count_step();
      const Box box = box_centered(state_.x0, state_.r);
      const RealInterval time(state_.t0, state_.t1);
      const KrawczykVerdict v =
          parametric_krawczyk_test(base_, state_.x0, y, box, time, cfg_.extension);
      if (v.passed()) {
        result_.certificate.segments.push_back(
            {state_.t0, state_.t1, box, y, std::nullopt, std::nullopt, state_.x0, v.residual_norm});
        update(true, v.residual_norm);
        if (state_.t0 < 1.0) {
          state_.x0 = newton_refine(base_, state_.x0, state_.t0, cfg_).x;
          y = inverse_jacobian(state_.x0, state_.t0);
        }
      } else {
        refine_in_place();
        update(false, v.residual_norm);
      }
    }
    return finish();
  }

  TrackResult tilted() {
    const PointVector origin = zeros(base_.n());
    PointMatrix y = inverse_jacobian(state_.x0, state_.t0);
    std::optional<Preconditioned> pre = try_precondition();
    while (state_.t0 < 1.0) {
      count_step();
      KrawczykVerdict v;
      v.residual_norm = std::numeric_limits<double>::infinity();
      if (pre) v = parametric_krawczyk_test(pre->sheared, origin, y, pre->box, pre->time, cfg_.extension);
      if (pre && v.passed()) {
        result_.certificate.segments.push_back({state_.t0, state_.t1, pre->box, y, state_.x0,
                                                pre->x1, origin, v.residual_norm});
        update(true, v.residual_norm);
        state_.x0 = newton_refine(base_, pre->x1, state_.t0, cfg_).x;
        if (state_.t0 < 1.0) {
          y = inverse_jacobian(state_.x0, state_.t0);
          pre = try_precondition();
        }
      } else {
        update(false, v.residual_norm);
        pre = try_precondition();
      }
    }
    return finish();
  }

 private:
  PointMatrix inverse_jacobian(std::span<const Complex> x, double t) const {
    return mid_inverse(jac_x_point(base_, x, t)).inverse;
  }

  std::optional<Preconditioned> try_precondition() const {
    try {
      return precondition(base_, state_.x0, state_.r, state_.t0, state_.t1, cfg_);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNoConvergence || e.code() == ErrorCode::kSingularMatrix)
        return std::nullopt;
      throw;
    }
  }

  void refine_in_place() {
    try {
      state_.x0 = newton_refine(base_, state_.x0, state_.t0, cfg_).x;
    } catch (const Error&) {
    }
  }

  void count_step() {
    if (++steps_ > cfg_.max_steps)
      throw Error(ErrorCode::kMaxStepsExceeded,
                  "more than " + std::to_string(cfg_.max_steps) + " Krawczyk tests");
  }

  void update(bool accepted, double residual_norm) {
    (accepted ? result_.accepted : result_.rejected) += 1;
    try {
      step_update(state_, accepted, cfg_, residual_norm);
    } catch (...) {
      notify();
      throw;
    }
    notify();
  }

  void notify() const {
    if (observer_ && !state_.step_log.empty()) observer_(state_.step_log.back());
  }

  TrackResult finish() {
    const NewtonResult fin = newton_refine(base_, state_.x0, 1.0, cfg_);
    result_.final_point = fin.x;
    result_.final_residual = fin.residual;
    result_.certificate.final_point = fin.x;
    result_.certificate.final_residual = fin.residual;
    result_.steps = std::move(state_.step_log);
    return std::move(result_);
  }

  Homotopy base_;
  TrackerConfig cfg_;
  const StepObserver& observer_;
  TrackState state_;
  TrackResult result_;
  long steps_ = 0;
};

}  // namespace

void TrackerConfig::validate() const {
  if (!(lambda > 1.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must exceed 1");
  if (!(dt0 > 0.0 && dt0 < 1.0)) throw Error(ErrorCode::kInvalidArgument, "dt0 must lie in (0, 1)");
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw Error(ErrorCode::kInvalidArgument, "r0 must be > 0");
  if (newton_iters < 1) throw Error(ErrorCode::kInvalidArgument, "newton_iters must be >= 1");
  if (!(newton_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "newton_tol must be > 0");
  if (max_steps < 1) throw Error(ErrorCode::kInvalidArgument, "max_steps must be >= 1");
}

TrackState TrackState::initial(const TrackerConfig& cfg, PointVector x0) {
  TrackState s;
  s.t0 = 0.0;
  s.dt = cfg.dt0;
  s.r = cfg.r0;
  s.t1 = std::min(cfg.dt0, 1.0);
  s.x0 = std::move(x0);
  return s;
}

void step_update(TrackState& state, bool accepted, const TrackerConfig& cfg, double residual_norm) {
  state.step_log.push_back({state.t0, state.dt, state.r, accepted, residual_norm});
  if (accepted) {
    ++state.scale_exponent;
    state.consecutive_failures = 0;
    state.t0 = state.t1;
  } else {
    --state.scale_exponent;
    ++state.consecutive_failures;
  }
  const double scale = std::pow(cfg.lambda, state.scale_exponent);
  state.dt = cfg.dt0 * scale;
  state.r = cfg.r0 * scale;
  state.t1 = std::min(state.t0 + state.dt, 1.0);
  if (state.consecutive_failures > cfg.max_consecutive_failures)
    throw Error(ErrorCode::kStepUnderflow,
                std::to_string(state.consecutive_failures) + " consecutive rejections at t=" +
                    format_double(state.t0));
  if (state.dt < cfg.min_dt)
    throw Error(ErrorCode::kStepUnderflow,
                "step size " + format_double(state.dt) + " at t=" + format_double(state.t0));
}

NewtonResult newton_refine(const Homotopy& h, std::span<const Complex> x, double t,
                           const TrackerConfig& cfg) {
  NewtonResult r;
  r.x.assign(x.begin(), x.end());
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    const PointVector f = eval_point(h, r.x, t);
    r.residual = inf_norm(f);
    if (!std::isfinite(r.residual))
      throw Error(ErrorCode::kNoConvergence, "non-finite residual during Newton refinement");
    if (r.residual <= cfg.newton_tol) return r;
    if (it >= cfg.newton_iters) {
      // Converged to rounding noise but the residual floor sits above the
      // tolerance (large coefficients): accept.
      if (last_step <= kStagnationTol * (1.0 + inf_norm(r.x))) return r;
      throw Error(ErrorCode::kNoConvergence,
                  "residual " + format_double(r.residual) + " after " +
                      std::to_string(cfg.newton_iters) + " Newton iterations at t=" + format_double(t));
    }
    const Eigen::VectorXcd dx = solve_point(jac_x_point(h, r.x, t), to_eigen(f));
    for (std::size_t i = 0; i < r.x.size(); ++i) r.x[i] -= dx(static_cast<Eigen::Index>(i));
    last_step = dx.cwiseAbs().maxCoeff();
    r.iterations = it + 1;
  }
}

PointVector euler_predict(const Homotopy& h, std::span<const Complex> x, double t0, double dt) {
  const PointMatrix j = jac_x_point(h, x, t0);
  PointVector shifted(x.begin(), x.end());
  const PointVector shift = h.shift_at(t0);
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += shift[i];
  PointVector dp(h.p0().size());
  for (std::size_t k = 0; k < dp.size(); ++k) dp[k] = h.p1()[k] - h.p0()[k];
  Eigen::VectorXcd dhdt = to_eigen(f1_eval(h.system(), shifted, dp));
  if (const auto& sh = h.shear()) {
    Eigen::VectorXcd ds(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
      ds(static_cast<Eigen::Index>(i)) = (sh->x1[i] - sh->x0[i]) / (sh->t1 - sh->t0);
    dhdt += j * ds;
  }
  const Eigen::VectorXcd v = solve_point(j, dhdt);
  PointVector out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= dt * v(static_cast<Eigen::Index>(i));
  return out;
}

Preconditioned precondition(const Homotopy& h, std::span<const Complex> x0, double r, double t0,
                            double t1, const TrackerConfig& cfg) {
  if (!(t0 < t1)) throw Error(ErrorCode::kDegenerateTimeInterval, "precondition needs t0 < t1");
  const Homotopy base = h.with_shear(std::nullopt);
  PointVector x1 = newton_refine(base, euler_predict(base, x0, t0, t1 - t0), t1, cfg).x;
  Homotopy sheared = apply_shear(base, PointVector(x0.begin(), x0.end()), x1, t0, t1);
  return {std::move(x1), std::move(sheared), box_centered(zeros(x0.size()), r),
          RealInterval(t0, t1)};
}

TrackResult track_rect(const Homotopy& h, std::span<const Complex> x0, const TrackerConfig& cfg,
                       const StepObserver& observer) {
  return PathRun(h, x0, cfg, observer).rect();
}

TrackResult track_tilted(const Homotopy& h, std::span<const Complex> x0, const TrackerConfig& cfg,
                         const StepObserver& observer) {
  return PathRun(h, x0, cfg, observer).tilted();
}

TrackResult track(const Homotopy& h, std::span<const Complex> x0, const TrackerConfig& cfg,
                  const StepObserver& observer) {
  return cfg.mode == TrackMode::kRect ? track_rect(h, x0, cfg, observer)
                                      : track_tilted(h, x0, cfg, observer);
}

}  // namespace kht
