#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "ctds/enumerate.hpp"
#include "ctds/formula.hpp"
#include "ctds/integrator.hpp"
#include "ctds/rng.hpp"
#include "ctds/solver.hpp"

namespace ctds {

/// A 2-D slice of the hypercube: (s_i, s_j) vary over a window on a W x H
/// grid of cell centres, all other coordinates are fixed i.i.d. uniform draws
/// from `background_seed`. Row r covers j_min + (r + 1/2) (j_max - j_min) / H.
struct PlaneSpec {
  std::size_t var_i = 0;
  std::size_t var_j = 1;
  double i_min = -1.0, i_max = 1.0;
  double j_min = -1.0, j_max = 1.0;
  std::size_t width = 64;
  std::size_t height = 64;
  std::uint64_t background_seed = 0;

  void validate(std::size_t num_vars) const;
  std::vector<double> background(std::size_t num_vars) const;
  double x_of(std::size_t col) const { return i_min + (static_cast<double>(col) + 0.5) * (i_max - i_min) / static_cast<double>(width); }
  double y_of(std::size_t row) const { return j_min + (static_cast<double>(row) + 0.5) * (j_max - j_min) / static_cast<double>(height); }
  /// Same background, new window.
  PlaneSpec with_window(double x0, double x1, double y0, double y1) const;
};

enum class LabelBy { Solution, Cluster, ApproximateCluster };

struct BasinMap {
  static constexpr std::int32_t kUnresolved = -1;

  PlaneSpec plane;
  LabelBy label_by = LabelBy::Solution;
  bool approximate = false;            // cluster labels from observed solutions only
  std::vector<std::int32_t> labels;    // row-major, H x W
  std::vector<double> times;           // analog t_solve, NaN when unresolved
  std::vector<Assignment> representatives;  // label -> a solution carrying it

  std::int32_t label(std::size_t row, std::size_t col) const { return labels[row * plane.width + col]; }
  std::size_t unresolved_count() const;
};

/// Integrates one trajectory per grid cell (a_m(0) = 1) with `control` and
/// labels the cell by the solution reached, or by its cluster. Cluster mode
/// enumerates all solutions and is limited to N <= `max_enumeration_vars`.
BasinMap basin_map(const CnfFormula& formula, const PlaneSpec& plane, const StepControl& control, LabelBy label_by,
                   std::size_t threads = 1, const DynamicsParams& params = {},
                   std::size_t max_enumeration_vars = 26);

struct FsleParams {
  double eps0 = 1e-6;
  double ratio = 30.0;
  std::size_t num_directions = 50;
  std::uint64_t direction_seed = 0;
};

struct FsleMap {
  PlaneSpec plane;
  FsleParams params;
  std::vector<double> phi;  // row-major, H x W

  double mean() const;
};

/// Separation time of one reference/perturbed pair integrated in lockstep on
/// the doubled system. `project` is applied to each half after every
/// accepted step; `settled(ref, pert)` ends the run early with no crossing.
/// The crossing time is interpolated in log-separation between the two
/// accepted steps that bracket it. Returns nullopt when the separation never
/// reaches `target` within control.t_max (or on overflow).
template <class System, class Project, class Settled>
std::optional<double> separation_time(System& f, std::span<const double> ref0, std::span<const double> pert0,
                                      std::size_t sep_dims, double target, const StepControl& control,
                                      Project&& project, Settled&& settled) {
  const std::size_t d = ref0.size();
  std::vector<double> y(2 * d), y_new(2 * d), dydt(2 * d);
  std::copy(ref0.begin(), ref0.end(), y.begin());
  std::copy(pert0.begin(), pert0.end(), y.begin() + static_cast<std::ptrdiff_t>(d));
  auto pair_field = [&](std::span<const double> yy, std::span<double> out) {
    return f(yy.subspan(0, d), out.subspan(0, d)) && f(yy.subspan(d), out.subspan(d));
  };
  auto separation = [&](std::span<const double> yy) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sep_dims; ++i) {
      const double delta = yy[i] - yy[d + i];
      sum += delta * delta;
    }
    return std::sqrt(sum);
  };
  cash_karp::Workspace work;
  double t = 0.0;
  double h = control.h_init;
  double sep = separation(y);
  if (sep >= target) return 0.0;
  std::uint64_t steps = 0;
  while (t < control.t_max && steps < control.n_step_max) {
    if (settled(std::span<const double>(y).subspan(0, d), std::span<const double>(y).subspan(d))) return std::nullopt;
    if (!pair_field(y, dydt)) return std::nullopt;
    const AdaptiveStep step = adaptive_step(pair_field, y, dydt, h, control.t_max - t, control, y_new, work);
    if (step.overflow) return std::nullopt;
    project(std::span<double>(y_new).subspan(0, d));
    project(std::span<double>(y_new).subspan(d));
    const double sep_new = separation(y_new);
    if (sep_new >= target) {
      if (sep > 0.0) {
        const double frac = (std::log(target) - std::log(sep)) / (std::log(sep_new) - std::log(sep));
        return t + std::clamp(frac, 0.0, 1.0) * step.h_used;
      }
      return t + step.h_used;
    }
    y.swap(y_new);
    sep = sep_new;
    t += step.h_used;
    h = step.h_next;
    ++steps;
  }
  return std::nullopt;
}

/// A random direction of length eps0 in the first `dims` coordinates, with
/// components reflected so that start + direction stays inside [-1, 1].
std::vector<double> random_box_direction(Rng& rng, std::span<const double> start, std::size_t dims, double eps0);

/// FSLE of the CTDS at one point of s-space: average over directions of
/// ln(ratio) / tau, with tau the time for an eps0 separation to reach
/// ratio * eps0; directions that never get there contribute 0. Separation
/// is measured in s only, both trajectories start with a_m = 1.
double fsle_point(const CnfFormula& formula, std::span<const double> s, const FsleParams& params,
                  const StepControl& control, Rng& directions, const DynamicsParams& dyn = {});

FsleMap fsle_map(const CnfFormula& formula, const PlaneSpec& plane, const FsleParams& params,
                 const StepControl& control, std::size_t threads = 1, const DynamicsParams& dyn = {});

struct BoxCount {
  std::vector<std::size_t> scales;  // coarse cell edge g, in fine cells
  std::vector<std::size_t> counts;  // B(g)
};

struct DimensionEstimate {
  std::optional<double> dimension;  // nullopt: no boundary (NoBoundary)
  double r_squared = 0.0;
  BoxCount boxes;
};

/// Box-counting dimension of the basin boundary: a g x g block is a
/// boundary block when its resolved cells carry at least two labels. Scales
/// run over g = 2, 4, ..., min(W, H) / 4 (at least four of them); the
/// estimate is minus the slope of log B(g) against log g. Throws
/// UnresolvedCells when more than `max_unresolved_fraction` of cells are
/// unresolved.
DimensionEstimate boundary_dimension(const BasinMap& map, double max_unresolved_fraction = 0.01);

struct WadaLevel {
  PlaneSpec plane;
  std::set<Assignment> solutions;        // distinct solutions reached
  std::set<std::size_t> labels;          // distinct basin labels (clusters when given)
  std::size_t unresolved = 0;
};

struct WadaReport {
  std::vector<WadaLevel> levels;
  bool wada_consistent = false;  // >= 3 labels at every level
};

/// Re-renders the basin picture on each nested window and inventories the
/// basin labels present. Labels are cluster ids when `clusters` is given,
/// else distinct solutions.
WadaReport wada_probe(const CnfFormula& formula, const PlaneSpec& base_plane,
                      const std::vector<std::array<double, 4>>& zoom_windows, const StepControl& control,
                      const ClusterSet* clusters = nullptr, std::size_t threads = 1, const DynamicsParams& params = {});

/// Windows centred on (x, y), each `factor` times smaller than the last,
/// starting from the full base window.
std::vector<std::array<double, 4>> nested_windows(const PlaneSpec& base, double x, double y, double factor,
                                                  std::size_t levels);

/// Cells of a map where a (2r+1)^2 neighbourhood contains at least `min_labels` labels.
std::vector<std::pair<std::size_t, std::size_t>> junction_cells(const BasinMap& map, std::size_t min_labels,
                                                                std::size_t radius = 1);

}  // namespace ctds
