#include "ctds/fits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ctds/error.hpp"

namespace ctds {

namespace {

constexpr std::size_t kMinSamples = 50;

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

void check_window(const SurvivalWindow& w) {
  if (!(w.p_hi <= 1.0 && w.p_lo > 0.0 && w.p_hi > w.p_lo)) {
    throw Error(ErrorCode::InvalidArgument, "survival window needs 1 >= p_hi > p_lo > 0");
  }
}

std::vector<SurvivalPoint> windowed(std::span<const double> samples, const SurvivalWindow& w) {
  if (samples.size() < kMinSamples) {
    throw Error(ErrorCode::InsufficientData,
                "need at least 50 samples, got " + std::to_string(samples.size()));
  }
  check_window(w);
  std::vector<SurvivalPoint> in;
  for (const auto& pt : survival(samples)) {
    if (pt.p >= w.p_lo && pt.p <= w.p_hi) in.push_back(pt);
  }
  if (in.size() < 2) throw Error(ErrorCode::DegenerateWindow, "fewer than two survival points inside the window");
  return in;
}

LineFit log_log_law(std::span<const std::pair<double, double>> pairs, const char* what, double& n_lo, double& n_hi) {
  std::set<double> distinct;
  std::vector<double> xs, ys;
  for (const auto& [n, value] : pairs) {
    if (!(n > 0.0) || !(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " law needs positive N and values");
    }
    distinct.insert(n);
    xs.push_back(std::log(n));
    ys.push_back(std::log(value));
  }
  if (distinct.size() < 3) {
    throw Error(ErrorCode::InsufficientData, std::string(what) + " law needs at least 3 distinct N");
  }
  n_lo = *distinct.begin();
  n_hi = *distinct.rbegin();
  return least_squares(xs, ys);
}

}  // namespace

const char* ScalingFit::kind() const {
  switch (model.index()) {
    case 0: return "exp";
    case 1: return "rate";
    case 2: return "steppow";
    default: return "eta";
  }
}

std::vector<SurvivalPoint> survival(std::span<const double> samples) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double total = static_cast<double>(sorted.size());
  std::vector<SurvivalPoint> out;
  for (std::size_t i = 0; i < sorted.size();) {
    if (!std::isfinite(sorted[i])) break;
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.push_back({sorted[i], static_cast<double>(sorted.size() - j) / total});
    i = j;
  }
  return out;
}

ScalingFit fit_exponential_decay(std::span<const double> times, SurvivalWindow window) {
  const auto in = windowed(times, window);
  std::vector<double> xs, ys;
  for (const auto& pt : in) {
    xs.push_back(pt.x);
    ys.push_back(std::log(pt.p));
  }
  const LineFit line = least_squares(xs, ys);
  ScalingFit fit;
  fit.model = ExpDecay{std::exp(line.intercept), -line.slope};
  fit.window_lo = window.p_lo;
  fit.window_hi = window.p_hi;
  fit.r_squared = line.r_squared;
  fit.samples = times.size();
  fit.points = in.size();
  return fit;
}

ScalingFit fit_rate_scaling(std::span<const std::pair<double, double>> n_lambda) {
  ScalingFit fit;
  const LineFit line = log_log_law(n_lambda, "rate", fit.window_lo, fit.window_hi);
  fit.model = RateLaw{std::exp(line.intercept), -line.slope};
  fit.r_squared = line.r_squared;
  fit.samples = fit.points = n_lambda.size();
  return fit;
}

double predicted_time(const RateLaw& law, double r, double p, double n) {
  return std::pow(n, law.beta) * std::log(r / p) / law.b;
}

ScalingFit fit_step_powerlaw(std::span<const double> n_steps, SurvivalWindow window) {
  const auto in = windowed(n_steps, window);
  std::vector<double> ys;
  for (const auto& pt : in) ys.push_back(std::log(pt.p));
  const double n_a = in.front().x;

  std::vector<double> xs(in.size());
  auto fit_at = [&](double v) {
    for (std::size_t i = 0; i < in.size(); ++i) xs[i] = std::log(v + in[i].x);
    return least_squares(xs, ys);
  };
  // Log-spaced grid on (0, n_a] plus v = 0 when every n is positive, then a
  // golden-section refinement around the best grid point.
  std::vector<double> grid;
  if (n_a > 0.0) grid.push_back(0.0);
  const double v_hi = std::max(n_a, 1.0);
  const double v_lo = v_hi * 1e-6;
  constexpr int kGrid = 200;
  for (int g = 0; g <= kGrid; ++g) grid.push_back(v_lo * std::pow(v_hi / v_lo, g / static_cast<double>(kGrid)));

  std::size_t best = 0;
  double best_r2 = -1.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double r2 = fit_at(grid[g]).r_squared;
    if (r2 > best_r2) {
      best_r2 = r2;
      best = g;
    }
  }
  double lo = grid[best > 0 ? best - 1 : 0];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  double v_best = grid[best];
  if (hi > lo) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    double fa = fit_at(a).r_squared, fb = fit_at(b).r_squared;
    for (int it = 0; it < 60; ++it) {
      if (fa > fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - phi * (hi - lo);
        fa = fit_at(a).r_squared;
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + phi * (hi - lo);
        fb = fit_at(b).r_squared;
      }
    }
    const double v_mid = (a + b) / 2.0;
    if (fit_at(v_mid).r_squared > best_r2) v_best = v_mid;
  }
  const LineFit line = fit_at(v_best);
  ScalingFit fit;
  fit.model = StepPowerLaw{std::exp(line.intercept), v_best, -line.slope};
  fit.window_lo = window.p_lo;
  fit.window_hi = window.p_hi;
  fit.r_squared = line.r_squared;
  fit.samples = n_steps.size();
  fit.points = in.size();
  return fit;
}

ScalingFit fit_eta_scaling(std::span<const std::pair<double, double>> n_eta) {
  ScalingFit fit;
  const LineFit line = log_log_law(n_eta, "eta", fit.window_lo, fit.window_hi);
  fit.model = EtaLaw{std::exp(line.intercept), -line.slope};
  fit.r_squared = line.r_squared;
  fit.samples = fit.points = n_eta.size();
  return fit;
}

std::vector<double> solve_times(std::span<const SolveRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(r.status == RunStatus::Solved && r.t_solve ? *r.t_solve : std::numeric_limits<double>::infinity());
  }
  return out;
}

std::vector<double> solve_steps(std::span<const SolveRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(r.status == RunStatus::Solved ? static_cast<double>(r.n_step_total)
                                                : std::numeric_limits<double>::infinity());
  }
  return out;
}

}  // namespace ctds
