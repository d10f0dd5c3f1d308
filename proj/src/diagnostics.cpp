#include "ctds/diagnostics.hpp"

#include <cmath>

#include "ctds/error.hpp"

namespace ctds {

double excess_kurtosis(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(xs.size());
  m4 /= static_cast<double>(xs.size());
  if (m2 <= 0.0) return 0.0;
  return m4 / (m2 * m2) - 3.0;
}

TimeSeries trajectory_diagnostics(std::span<const TrajectoryPoint> trace) {
  if (trace.size() < 3) {
    throw Error(ErrorCode::TraceTooShort, "trace has " + std::to_string(trace.size()) + " points, need 3");
  }
  TimeSeries ts;
  const std::size_t n = trace.size();
  const std::size_t nv = trace.front().s.size();
  const std::size_t nc = trace.front().log_a.size();
  ts.s.assign(nv, {});
  ts.a.assign(nc, {});
  for (const auto& p : trace) {
    if (p.s.size() != nv || p.log_a.size() != nc) {
      throw Error(ErrorCode::LengthMismatch, "trace points select different coordinates");
    }
    ts.t.push_back(p.t);
    ts.E.push_back(p.E);
    ts.V.push_back(p.V);
    ts.speed.push_back(p.speed);
    ts.accel.push_back(p.accel);
    for (std::size_t j = 0; j < nv; ++j) ts.s[j].push_back(p.s[j]);
    for (std::size_t j = 0; j < nc; ++j) ts.a[j].push_back(std::exp(p.log_a[j]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isnan(ts.accel[i])) continue;
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    const double dt = ts.t[hi] - ts.t[lo];
    ts.accel[i] = dt > 0.0 ? std::abs(ts.speed[hi] - ts.speed[lo]) / dt : 0.0;
  }
  std::vector<double> increments;
  increments.reserve(n - 1);
  for (std::size_t i = 1; i < n; ++i) increments.push_back(ts.speed[i] - ts.speed[i - 1]);
  ts.speed_increment_excess_kurtosis = excess_kurtosis(increments);
  ts.final_E = ts.E.back();
  return ts;
}

}  // namespace ctds
