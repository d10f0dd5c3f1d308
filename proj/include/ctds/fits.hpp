#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "ctds/solver.hpp"

namespace ctds {

struct ExpDecay {
  double r = 0.0;
  double lambda = 0.0;
};
struct RateLaw {
  double b = 0.0;
  double beta = 0.0;
};
struct StepPowerLaw {
  double u = 0.0;
  double v = 0.0;
  double eta = 0.0;
};
struct EtaLaw {
  double d = 0.0;
  double delta = 0.0;
};

using FitModel = std::variant<ExpDecay, RateLaw, StepPowerLaw, EtaLaw>;

/// Survival window in p, inclusive at both ends.
struct SurvivalWindow {
  double p_hi = 0.5;
  double p_lo = 0.02;
};

struct ScalingFit {
  FitModel model;
  // Survival fits: the p window. Law fits: the N range used.
  double window_lo = 0.0;
  double window_hi = 0.0;
  double r_squared = 0.0;  // on the transformed (log) axes
  std::size_t samples = 0;
  std::size_t points = 0;  // points inside the window

  const char* kind() const;
};

struct SurvivalPoint {
  double x = 0.0;
  double p = 0.0;  // fraction of samples strictly greater than x
};

/// Empirical survival function at each distinct finite sample value.
/// Infinite samples (never solved) stay in the denominator.
std::vector<SurvivalPoint> survival(std::span<const double> samples);

/// ln p = ln r - lambda t over the window. Needs >= 50 samples.
ScalingFit fit_exponential_decay(std::span<const double> times, SurvivalWindow window = {});

/// ln lambda = ln b - beta ln N over >= 3 distinct N.
ScalingFit fit_rate_scaling(std::span<const std::pair<double, double>> n_lambda);

/// Time to reach unsolved fraction p at size N: N^beta ln(r / p) / b.
double predicted_time(const RateLaw& law, double r, double p, double n);

/// p(n) = u (v + n)^-eta, with v searched over [0, n_a] where n_a is the
/// smallest step count inside the window; best R^2 wins.
ScalingFit fit_step_powerlaw(std::span<const double> n_steps, SurvivalWindow window = {});

/// ln eta = ln d - delta ln N over >= 3 distinct N.
ScalingFit fit_eta_scaling(std::span<const std::pair<double, double>> n_eta);

/// Analog solve times, +inf for unsolved records.
std::vector<double> solve_times(std::span<const SolveRecord> records);
/// Total accepted steps, +inf for unsolved records.
std::vector<double> solve_steps(std::span<const SolveRecord> records);

}  // namespace ctds
