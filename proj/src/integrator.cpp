#include "ctds/integrator.hpp"

#include <limits>
#include <string>

#include "ctds/error.hpp"

namespace ctds {

void StepControl::validate() const {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (!(h_min > 0.0 && h_min <= h_init && h_init <= h_max)) {
    throw Error(ErrorCode::InvalidArgument, "step sizes must satisfy 0 < h_min <= h_init <= h_max");
  }
  if (!(t_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_max must be positive");
  if (!(safety > 0.0 && safety < 1.0)) throw Error(ErrorCode::InvalidArgument, "safety must lie in (0, 1)");
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Solved: return "Solved";
    case RunStatus::TimeBudgetExceeded: return "TimeBudgetExceeded";
    case RunStatus::StepBudgetExceeded: return "StepBudgetExceeded";
    case RunStatus::Overflow: return "Overflow";
  }
  return "?";
}

RunStatus run_status_from_string(std::string_view name) {
  for (auto s : {RunStatus::Solved, RunStatus::TimeBudgetExceeded, RunStatus::StepBudgetExceeded, RunStatus::Overflow}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown status '" + std::string(name) + "'");
}

Assignment rounded_assignment(std::span<const double> s) {
  Assignment a(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) a[i] = s[i] >= 0.0 ? 1 : -1;
  return a;
}

namespace {

bool rounding_satisfies(const CnfFormula& f, std::span<const double> s) {
  const auto lits = f.literals();
  const auto offsets = f.offsets();
  for (std::size_t m = 0; m < f.num_clauses(); ++m) {
    bool sat = false;
    for (std::size_t j = offsets[m]; j < offsets[m + 1]; ++j) {
      const bool positive = s[lits[j].var] >= 0.0;
      if (positive == (lits[j].sign > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

struct CtdsSystem {
  const CnfFormula& formula;
  const DynamicsParams& params;
  std::size_t n;

  bool operator()(std::span<const double> y, std::span<double> dydt) const {
    return rhs(formula, y.subspan(0, n), y.subspan(n), dydt.subspan(0, n), dydt.subspan(n), params) == FieldStatus::Ok;
  }
};

double norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

// Collects trace points, thinning to a uniform time grid whenever the
// buffer would exceed its cap. Acceleration is a central divided difference
// of the velocities at the neighbouring accepted steps, so each point is
// emitted one step late.
class TraceRecorder {
 public:
  TraceRecorder(const CnfFormula& f, const StepControl& c, const DynamicsParams& p, std::size_t n)
      : f_(f), control_(c), params_(p), n_(n) {}

  void on_point(double t, std::span<const double> y, std::span<const double> dydt) {
    std::vector<double> v(dydt.begin(), dydt.begin() + static_cast<std::ptrdiff_t>(n_));
    if (have_pending_) {
      const double dt = t - prev_t_;
      pending_.accel = dt > 0.0 ? distance(v, prev_v_) / dt : 0.0;
      push(std::move(pending_));
    }
    if (have_current_) {
      prev_v_ = std::move(cur_v_);
      prev_t_ = cur_t_;
    } else {
      prev_v_ = v;
      prev_t_ = t;
    }
    cur_v_ = std::move(v);
    cur_t_ = t;
    have_current_ = true;
    pending_ = make_point(t, y);
    have_pending_ = true;
  }

  std::vector<TrajectoryPoint> finish() {
    if (have_pending_) {
      const double dt = cur_t_ - prev_t_;
      pending_.accel = dt > 0.0 ? distance(cur_v_, prev_v_) / dt : 0.0;
      push(std::move(pending_), true);
      have_pending_ = false;
    }
    return std::move(points_);
  }

 private:
  TrajectoryPoint make_point(double t, std::span<const double> y) const {
    const auto s = y.subspan(0, n_);
    const auto b = y.subspan(n_);
    TrajectoryPoint p;
    p.t = t;
    for (auto i : control_.trace_vars) p.s.push_back(s[i]);
    for (auto m : control_.trace_clauses) p.log_a.push_back(b[m]);
    p.E = energy_E(f_, s);
    try {
      p.V = energy_V(f_, s, b, params_);
    } catch (const Error&) {
      p.V = std::numeric_limits<double>::infinity();
    }
    p.speed = norm(cur_v_);
    return p;
  }

  void push(TrajectoryPoint p, bool force = false) {
    if (!force && !points_.empty() && p.t - points_.back().t < record_dt_) return;
    points_.push_back(std::move(p));
    const std::size_t cap = std::max<std::size_t>(control_.max_trace_points, 2);
    if (points_.size() <= cap) return;
    const double span = points_.back().t - points_.front().t;
    record_dt_ = 2.0 * std::max(record_dt_, span / static_cast<double>(cap));
    std::vector<TrajectoryPoint> kept;
    kept.push_back(std::move(points_.front()));
    for (std::size_t i = 1; i + 1 < points_.size(); ++i) {
      if (points_[i].t - kept.back().t >= record_dt_) kept.push_back(std::move(points_[i]));
    }
    kept.push_back(std::move(points_.back()));
    points_ = std::move(kept);
  }

  const CnfFormula& f_;
  const StepControl& control_;
  const DynamicsParams& params_;
  std::size_t n_;
  std::vector<TrajectoryPoint> points_;
  double record_dt_ = 0.0;
  TrajectoryPoint pending_;
  bool have_pending_ = false;
  bool have_current_ = false;
  std::vector<double> prev_v_, cur_v_;
  double prev_t_ = 0.0, cur_t_ = 0.0;
};

}  // namespace

RunOutcome integrate(const CnfFormula& formula, const ContinuousState& initial, const StepControl& control,
                     bool record_trace, const DynamicsParams& params, const StepObserver& observer) {
  control.validate();
  const std::size_t n = formula.num_vars();
  const std::size_t m = formula.num_clauses();
  if (initial.s.size() != n || initial.log_a.size() != m) {
    throw Error(ErrorCode::LengthMismatch, "initial state does not match the formula dimensions");
  }

  std::vector<double> y(n + m), y_new(n + m), dydt(n + m), s_unclamped(n);
  std::copy(initial.s.begin(), initial.s.end(), y.begin());
  std::copy(initial.log_a.begin(), initial.log_a.end(), y.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = 0; i < n; ++i) y[i] = std::clamp(y[i], -1.0, 1.0);

  CtdsSystem system{formula, params, n};
  cash_karp::Workspace work;
  TraceRecorder recorder(formula, control, params, n);

  RunOutcome out;
  double t = initial.t;
  const double t_end = initial.t + control.t_max;
  double h = control.h_init;

  auto finish = [&](RunStatus status) {
    out.status = status;
    out.t_final = t - initial.t;
    out.final_state.s.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    out.final_state.log_a.assign(y.begin() + static_cast<std::ptrdiff_t>(n), y.end());
    out.final_state.t = t;
    if (status == RunStatus::Solved) out.witness = rounded_assignment(out.final_state.s);
    if (record_trace) out.trace = recorder.finish();
    return out;
  };

  const bool field_ok = system(y, dydt);
  if (record_trace) recorder.on_point(t, y, dydt);
  if (rounding_satisfies(formula, std::span<const double>(y).subspan(0, n))) return finish(RunStatus::Solved);
  if (!field_ok) return finish(RunStatus::Overflow);

  for (;;) {
    if (out.n_step >= control.n_step_max) return finish(RunStatus::StepBudgetExceeded);
    if (t >= t_end) return finish(RunStatus::TimeBudgetExceeded);

    const AdaptiveStep step = adaptive_step(system, y, dydt, h, t_end - t, control, y_new, work);
    out.n_rejected += step.rejected;
    if (step.overflow) return finish(RunStatus::Overflow);

    double excursion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s_unclamped[i] = y_new[i];
      excursion = std::max(excursion, std::abs(y_new[i]) - 1.0);
      y_new[i] = std::clamp(y_new[i], -1.0, 1.0);
    }
    out.max_excursion = std::max(out.max_excursion, excursion);
    out.length_L += distance(std::span<const double>(y).subspan(0, n), std::span<const double>(y_new).subspan(0, n));

    if (observer) {
      StepEvent ev;
      ev.t_before = t;
      ev.h = step.h_used;
      ev.error_estimate = step.error_estimate;
      ev.s_before = std::span<const double>(y).subspan(0, n);
      ev.log_a_before = std::span<const double>(y).subspan(n);
      ev.s_unclamped = s_unclamped;
      ev.s_after = std::span<const double>(y_new).subspan(0, n);
      ev.log_a_after = std::span<const double>(y_new).subspan(n);
      observer(ev);
    }

    y.swap(y_new);
    // Land exactly on the budget when the last step was truncated to it.
    t = (step.h_used == t_end - t) ? t_end : t + step.h_used;
    ++out.n_step;
    h = step.h_next;

    const bool ok = system(y, dydt);
    if (record_trace) recorder.on_point(t, y, dydt);
    if (rounding_satisfies(formula, std::span<const double>(y).subspan(0, n))) return finish(RunStatus::Solved);
    if (!ok) return finish(RunStatus::Overflow);
  }
}

}  // namespace ctds
