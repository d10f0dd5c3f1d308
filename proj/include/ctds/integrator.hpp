#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ctds/dynamics.hpp"
#include "ctds/formula.hpp"

namespace ctds {

struct StepControl {
  double eps = 1e-3;  // maximal relative local truncation error
  double h_init = 1e-2;
  double h_min = 1e-12;
  double h_max = 1.0;
  double t_max = 1e4;
  std::uint64_t n_step_max = 10'000'000;
  double safety = 0.9;
  std::size_t max_trace_points = 100'000;
  std::vector<std::size_t> trace_vars;     // s_i recorded per trace point
  std::vector<std::size_t> trace_clauses;  // b_m recorded per trace point

  void validate() const;
};

enum class RunStatus { Solved, TimeBudgetExceeded, StepBudgetExceeded, Overflow };

const char* to_string(RunStatus status);
RunStatus run_status_from_string(std::string_view name);

struct TrajectoryPoint {
  double t = 0.0;
  std::vector<double> s;      // selected coordinates
  std::vector<double> log_a;  // selected auxiliaries
  double E = 0.0;
  double V = 0.0;
  double speed = 0.0;  // |ds/dt|
  double accel = 0.0;  // |d^2 s/dt^2|, divided differences of accepted-step velocities
};

struct RunOutcome {
  RunStatus status = RunStatus::TimeBudgetExceeded;
  double t_final = 0.0;
  std::uint64_t n_step = 0;      // accepted steps
  std::uint64_t n_rejected = 0;  // rejected trials
  double length_L = 0.0;
  std::optional<Assignment> witness;
  std::vector<TrajectoryPoint> trace;
  ContinuousState final_state;
  double max_excursion = 0.0;  // largest pre-clamp max_i |s_i| - 1 (0 if never outside)
};

/// Seen by an observer after each accepted step, before solution detection.
struct StepEvent {
  double t_before = 0.0;
  double h = 0.0;
  double error_estimate = 0.0;
  std::span<const double> s_before;
  std::span<const double> log_a_before;
  std::span<const double> s_unclamped;
  std::span<const double> s_after;
  std::span<const double> log_a_after;
};

using StepObserver = std::function<void(const StepEvent&)>;

/// sigma_i = +1 if s_i >= 0 else -1.
Assignment rounded_assignment(std::span<const double> s);

/// Cash-Karp embedded 4(5) Runge-Kutta pair (Numerical Recipes tableau).
namespace cash_karp {

inline constexpr double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
inline constexpr double b21 = 0.2;
inline constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
inline constexpr double b41 = 0.3, b42 = -0.9, b43 = 1.2;
inline constexpr double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0, b54 = 35.0 / 27.0;
inline constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0, b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                        b65 = 253.0 / 4096.0;
inline constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0, c6 = 512.0 / 1771.0;
inline constexpr double dc1 = c1 - 2825.0 / 27648.0, dc3 = c3 - 18575.0 / 48384.0, dc4 = c4 - 13525.0 / 55296.0,
                        dc5 = -277.0 / 14336.0, dc6 = c6 - 0.25;
inline constexpr double kTiny = 1e-30;

struct Workspace {
  std::vector<double> k2, k3, k4, k5, k6, tmp;
  void resize(std::size_t n) {
    for (auto* v : {&k2, &k3, &k4, &k5, &k6, &tmp}) v->assign(n, 0.0);
  }
};

/// One trial step. `f(y, dydt)` returns false on overflow. On success writes
/// the 5th-order proposal to y_out and returns max_i |y5 - y4|_i scaled by
/// (|y_i| + |h dydt_i| + tiny).
template <class System>
std::optional<double> trial(System& f, std::span<const double> y, std::span<const double> dydt, double h,
                            std::span<double> y_out, Workspace& w) {
  const std::size_t n = y.size();
  if (w.tmp.size() != n) w.resize(n);
  auto& tmp = w.tmp;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + b21 * h * dydt[i];
  if (!f(std::span<const double>(tmp), std::span<double>(w.k2))) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (b31 * dydt[i] + b32 * w.k2[i]);
  if (!f(std::span<const double>(tmp), std::span<double>(w.k3))) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (b41 * dydt[i] + b42 * w.k2[i] + b43 * w.k3[i]);
  if (!f(std::span<const double>(tmp), std::span<double>(w.k4))) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (b51 * dydt[i] + b52 * w.k2[i] + b53 * w.k3[i] + b54 * w.k4[i]);
  if (!f(std::span<const double>(tmp), std::span<double>(w.k5))) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) {
    tmp[i] = y[i] + h * (b61 * dydt[i] + b62 * w.k2[i] + b63 * w.k3[i] + b64 * w.k4[i] + b65 * w.k5[i]);
  }
  if (!f(std::span<const double>(tmp), std::span<double>(w.k6))) return std::nullopt;
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y_out[i] = y[i] + h * (c1 * dydt[i] + c3 * w.k3[i] + c4 * w.k4[i] + c6 * w.k6[i]);
    const double delta = h * (dc1 * dydt[i] + dc3 * w.k3[i] + dc4 * w.k4[i] + dc5 * w.k5[i] + dc6 * w.k6[i]);
    const double scale = std::abs(y[i]) + std::abs(h * dydt[i]) + kTiny;
    err = std::max(err, std::abs(delta) / scale);
  }
  if (!std::isfinite(err)) return std::nullopt;
  return err;
}

}  // namespace cash_karp

struct AdaptiveStep {
  bool overflow = false;
  double h_used = 0.0;
  double h_next = 0.0;
  double error_estimate = 0.0;
  std::uint64_t rejected = 0;
};

/// Retries trial steps until one is accepted: err <= eps, or h has reached
/// h_min. Growth h <- safety h (eps/err)^(1/5) capped at 5x; shrink
/// h <- safety h (eps/err)^(1/4) floored at h/10; h stays within
/// [h_min, h_max] except that `h_limit` may truncate the final step.
template <class System>
AdaptiveStep adaptive_step(System& f, std::span<const double> y, std::span<const double> dydt, double h,
                           double h_limit, const StepControl& control, std::span<double> y_out,
                           cash_karp::Workspace& w) {
  AdaptiveStep result;
  for (;;) {
    const double h_try = std::min(h, h_limit);
    const auto err = cash_karp::trial(f, y, dydt, h_try, y_out, w);
    if (!err) {
      result.overflow = true;
      return result;
    }
    if (*err <= control.eps || h_try <= control.h_min) {
      result.h_used = h_try;
      result.error_estimate = *err;
      double grow = 5.0;
      if (*err > 0.0) grow = std::min(5.0, control.safety * std::pow(control.eps / *err, 0.2));
      result.h_next = std::clamp(h * grow, control.h_min, control.h_max);
      return result;
    }
    ++result.rejected;
    const double shrink = std::max(0.1, control.safety * std::pow(control.eps / *err, 0.25));
    h = std::max(h_try * shrink, control.h_min);
  }
}

/// Integrates the CTDS from `initial` until the rounded state satisfies the
/// formula or a budget (time, steps) is exhausted, or the field overflows.
/// Every accepted s is clamped to [-1, 1]^N.
RunOutcome integrate(const CnfFormula& formula, const ContinuousState& initial, const StepControl& control,
                     bool record_trace, const DynamicsParams& params = {}, const StepObserver& observer = {});

}  // namespace ctds
