#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctds/integrator.hpp"

namespace ctds {

/// Aligned time series from a recorded trajectory. `s[j]` and `a[j]` follow
/// the trace's selected variables and clauses, with a_m = exp(b_m).
struct TimeSeries {
  std::vector<double> t, E, V, speed, accel;
  std::vector<std::vector<double>> s;
  std::vector<std::vector<double>> a;

  double speed_increment_excess_kurtosis = 0.0;  // 0 when increments are constant
  double final_E = 0.0;
};

/// Acceleration comes from the trace when present; NaN entries are filled
/// with central divided differences of the speed series. Throws
/// TraceTooShort below 3 points.
TimeSeries trajectory_diagnostics(std::span<const TrajectoryPoint> trace);

/// m4 / m2^2 - 3 of the sample; 0 for a constant sample.
double excess_kurtosis(std::span<const double> xs);

}  // namespace ctds
