#include "ctds/maps.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ctds/error.hpp"
#include "ctds/parallel.hpp"

namespace ctds {

void PlaneSpec::validate(std::size_t num_vars) const {
  if (var_i == var_j || var_i >= num_vars || var_j >= num_vars) {
    throw Error(ErrorCode::InvalidArgument, "plane variables must be distinct and below N");
  }
  if (width == 0 || height == 0) throw Error(ErrorCode::InvalidArgument, "grid must be non-empty");
  if (!(i_min < i_max && j_min < j_max) || i_min < -1.0 || i_max > 1.0 || j_min < -1.0 || j_max > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "window must be a non-empty subset of [-1, 1]^2");
  }
}

std::vector<double> PlaneSpec::background(std::size_t num_vars) const {
  Rng rng(background_seed);
  std::vector<double> s(num_vars);
  for (double& x : s) x = rng.uniform_open(-1.0, 1.0);
  return s;
}

PlaneSpec PlaneSpec::with_window(double x0, double x1, double y0, double y1) const {
  PlaneSpec p = *this;
  p.i_min = x0;
  p.i_max = x1;
  p.j_min = y0;
  p.j_max = y1;
  return p;
}

std::size_t BasinMap::unresolved_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kUnresolved));
}

namespace {

struct CellOutcome {
  std::optional<Assignment> witness;
  double time = std::numeric_limits<double>::quiet_NaN();
};

std::vector<CellOutcome> integrate_plane(const CnfFormula& formula, const PlaneSpec& plane, const StepControl& control,
                                         std::size_t threads, const DynamicsParams& params) {
  plane.validate(formula.num_vars());
  const std::vector<double> background = plane.background(formula.num_vars());
  std::vector<CellOutcome> cells(plane.width * plane.height);
  parallel_for(cells.size(), threads, [&](std::size_t idx) {
    const std::size_t row = idx / plane.width;
    const std::size_t col = idx % plane.width;
    ContinuousState s0;
    s0.s = background;
    s0.s[plane.var_i] = plane.x_of(col);
    s0.s[plane.var_j] = plane.y_of(row);
    s0.log_a.assign(formula.num_clauses(), 0.0);
    RunOutcome run = integrate(formula, s0, control, false, params);
    if (run.status == RunStatus::Solved) {
      cells[idx].witness = std::move(run.witness);
      cells[idx].time = run.t_final;
    }
  });
  return cells;
}

}  // namespace

BasinMap basin_map(const CnfFormula& formula, const PlaneSpec& plane, const StepControl& control, LabelBy label_by,
                   std::size_t threads, const DynamicsParams& params, std::size_t max_enumeration_vars) {
  std::optional<ClusterSet> exact;
  if (label_by == LabelBy::Cluster) {
    exact.emplace(cluster_solutions(enumerate_solutions(formula, max_enumeration_vars)));
  }
  const auto cells = integrate_plane(formula, plane, control, threads, params);

  BasinMap map;
  map.plane = plane;
  map.label_by = label_by;
  map.labels.assign(cells.size(), BasinMap::kUnresolved);
  map.times.assign(cells.size(), std::numeric_limits<double>::quiet_NaN());

  // Solution ids in order of first appearance in row-major order.
  std::map<Assignment, std::int32_t> solution_id;
  std::vector<Assignment> seen;
  for (const auto& c : cells) {
    if (c.witness && solution_id.emplace(*c.witness, static_cast<std::int32_t>(seen.size())).second) seen.push_back(*c.witness);
  }

  std::vector<std::int32_t> label_of_solution(seen.size());
  switch (label_by) {
    case LabelBy::Solution:
      std::iota(label_of_solution.begin(), label_of_solution.end(), 0);
      map.representatives = seen;
      break;
    case LabelBy::Cluster:
      for (std::size_t s = 0; s < seen.size(); ++s) {
        label_of_solution[s] = static_cast<std::int32_t>(exact->find(seen[s]));
      }
      for (const auto& members : exact->clusters) map.representatives.push_back(exact->solutions[members.front()]);
      break;
    case LabelBy::ApproximateCluster: {
      const ClusterSet approx = cluster_solutions(seen);
      for (std::size_t s = 0; s < seen.size(); ++s) label_of_solution[s] = static_cast<std::int32_t>(approx.cluster_of[s]);
      for (const auto& members : approx.clusters) map.representatives.push_back(approx.solutions[members.front()]);
      map.approximate = true;
      break;
    }
  }

  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    if (!cells[idx].witness) continue;
    map.labels[idx] = label_of_solution[static_cast<std::size_t>(solution_id.at(*cells[idx].witness))];
    map.times[idx] = cells[idx].time;
  }
  return map;
}

double FsleMap::mean() const {
  if (phi.empty()) return 0.0;
  return std::accumulate(phi.begin(), phi.end(), 0.0) / static_cast<double>(phi.size());
}

std::vector<double> random_box_direction(Rng& rng, std::span<const double> start, std::size_t dims, double eps0) {
  std::vector<double> dir(dims);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : dir) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  const double scale = eps0 / std::sqrt(norm);
  for (std::size_t i = 0; i < dims; ++i) {
    dir[i] *= scale;
    const double moved = start[i] + dir[i];
    if (moved > 1.0 || moved < -1.0) dir[i] = -dir[i];
  }
  return dir;
}

namespace {

struct FieldAdapter {
  const CnfFormula& formula;
  const DynamicsParams& params;
  std::size_t n;
  bool operator()(std::span<const double> y, std::span<double> dydt) const {
    return rhs(formula, y.subspan(0, n), y.subspan(n), dydt.subspan(0, n), dydt.subspan(n), params) == FieldStatus::Ok;
  }
};

bool rounds_to_solution(const CnfFormula& f, std::span<const double> s) {
  for (std::size_t m = 0; m < f.num_clauses(); ++m) {
    bool sat = false;
    for (const Literal& l : f.clause(m)) {
      if ((s[l.var] >= 0.0) == (l.sign > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

}  // namespace

double fsle_point(const CnfFormula& formula, std::span<const double> s, const FsleParams& params,
                  const StepControl& control, Rng& directions, const DynamicsParams& dyn) {
  if (!(params.eps0 > 0.0) || !(params.ratio > 1.0) || params.num_directions == 0) {
    throw Error(ErrorCode::InvalidArgument, "FSLE needs eps0 > 0, ratio > 1 and at least one direction");
  }
  const std::size_t n = formula.num_vars();
  const std::size_t d = n + formula.num_clauses();
  FieldAdapter field{formula, dyn, n};
  std::vector<double> ref(d, 0.0), pert(d, 0.0);
  std::copy(s.begin(), s.end(), ref.begin());
  auto clamp_s = [n](std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::clamp(y[i], -1.0, 1.0);
  };
  auto both_solved = [&](std::span<const double> a, std::span<const double> b) {
    return rounds_to_solution(formula, a.subspan(0, n)) && rounds_to_solution(formula, b.subspan(0, n));
  };
  const double target = params.eps0 * params.ratio;
  const double log_ratio = std::log(params.ratio);
  double sum = 0.0;
  for (std::size_t k = 0; k < params.num_directions; ++k) {
    const auto dir = random_box_direction(directions, s, n, params.eps0);
    std::copy(ref.begin(), ref.end(), pert.begin());
    for (std::size_t i = 0; i < n; ++i) pert[i] += dir[i];
    const auto tau = separation_time(field, ref, pert, n, target, control, clamp_s, both_solved);
    if (tau && *tau > 0.0) sum += log_ratio / *tau;
  }
  return sum / static_cast<double>(params.num_directions);
}

FsleMap fsle_map(const CnfFormula& formula, const PlaneSpec& plane, const FsleParams& params,
                 const StepControl& control, std::size_t threads, const DynamicsParams& dyn) {
  plane.validate(formula.num_vars());
  const std::vector<double> background = plane.background(formula.num_vars());
  FsleMap map;
  map.plane = plane;
  map.params = params;
  map.phi.assign(plane.width * plane.height, 0.0);
  parallel_for(map.phi.size(), threads, [&](std::size_t idx) {
    std::vector<double> s = background;
    s[plane.var_i] = plane.x_of(idx % plane.width);
    s[plane.var_j] = plane.y_of(idx / plane.width);
    Rng directions = Rng::substream(params.direction_seed, idx);
    map.phi[idx] = fsle_point(formula, s, params, control, directions, dyn);
  });
  return map;
}

DimensionEstimate boundary_dimension(const BasinMap& map, double max_unresolved_fraction) {
  const std::size_t w = map.plane.width, h = map.plane.height;
  const double unresolved = static_cast<double>(map.unresolved_count()) / static_cast<double>(w * h);
  if (unresolved > max_unresolved_fraction) {
    throw Error(ErrorCode::UnresolvedCells, std::to_string(unresolved * 100.0) + "% of cells unresolved");
  }
  const std::size_t edge = std::min(w, h);
  DimensionEstimate est;
  for (std::size_t g = 2; g * 4 <= edge; g *= 2) {
    if (w % g != 0 || h % g != 0) break;
    std::size_t count = 0;
    for (std::size_t br = 0; br < h / g; ++br) {
      for (std::size_t bc = 0; bc < w / g; ++bc) {
        std::int32_t first = BasinMap::kUnresolved;
        bool boundary = false;
        for (std::size_t r = br * g; r < (br + 1) * g && !boundary; ++r) {
          for (std::size_t c = bc * g; c < (bc + 1) * g; ++c) {
            const std::int32_t l = map.label(r, c);
            if (l == BasinMap::kUnresolved) continue;
            if (first == BasinMap::kUnresolved) {
              first = l;
            } else if (l != first) {
              boundary = true;
              break;
            }
          }
        }
        if (boundary) ++count;
      }
    }
    est.boxes.scales.push_back(g);
    est.boxes.counts.push_back(count);
  }
  if (est.boxes.scales.size() < 4) {
    throw Error(ErrorCode::InvalidArgument, "map needs at least four dyadic scales (W, H = base * 2^j >= 32)");
  }
  std::vector<double> xs, ys;
  for (std::size_t s = 0; s < est.boxes.scales.size(); ++s) {
    if (est.boxes.counts[s] == 0) continue;
    xs.push_back(std::log(static_cast<double>(est.boxes.scales[s])));
    ys.push_back(std::log(static_cast<double>(est.boxes.counts[s])));
  }
  if (xs.size() < 2) return est;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  est.dimension = -sxy / sxx;
  est.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return est;
}

WadaReport wada_probe(const CnfFormula& formula, const PlaneSpec& base_plane,
                      const std::vector<std::array<double, 4>>& zoom_windows, const StepControl& control,
                      const ClusterSet* clusters, std::size_t threads, const DynamicsParams& params) {
  WadaReport report;
  report.wada_consistent = !zoom_windows.empty();
  for (const auto& win : zoom_windows) {
    WadaLevel level;
    level.plane = base_plane.with_window(win[0], win[1], win[2], win[3]);
    const auto cells = integrate_plane(formula, level.plane, control, threads, params);
    for (const auto& c : cells) {
      if (!c.witness) {
        ++level.unresolved;
        continue;
      }
      level.solutions.insert(*c.witness);
    }
    if (clusters) {
      for (const auto& s : level.solutions) level.labels.insert(clusters->find(s));
    } else {
      std::size_t id = 0;
      for (auto it = level.solutions.begin(); it != level.solutions.end(); ++it) level.labels.insert(id++);
    }
    if (level.labels.size() < 3) report.wada_consistent = false;
    report.levels.push_back(std::move(level));
  }
  return report;
}

std::vector<std::array<double, 4>> nested_windows(const PlaneSpec& base, double x, double y, double factor,
                                                  std::size_t levels) {
  std::vector<std::array<double, 4>> out;
  double half_w = (base.i_max - base.i_min) / 2.0;
  double half_h = (base.j_max - base.j_min) / 2.0;
  out.push_back({base.i_min, base.i_max, base.j_min, base.j_max});
  for (std::size_t l = 1; l < levels; ++l) {
    half_w /= factor;
    half_h /= factor;
    const double cx = std::clamp(x, -1.0 + half_w, 1.0 - half_w);
    const double cy = std::clamp(y, -1.0 + half_h, 1.0 - half_h);
    out.push_back({cx - half_w, cx + half_w, cy - half_h, cy + half_h});
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> junction_cells(const BasinMap& map, std::size_t min_labels,
                                                                std::size_t radius) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t w = map.plane.width, h = map.plane.height;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      std::set<std::int32_t> seen;
      for (std::size_t rr = r >= radius ? r - radius : 0; rr <= std::min(h - 1, r + radius); ++rr) {
        for (std::size_t cc = c >= radius ? c - radius : 0; cc <= std::min(w - 1, c + radius); ++cc) {
          const auto l = map.label(rr, cc);
          if (l != BasinMap::kUnresolved) seen.insert(l);
        }
      }
      if (seen.size() >= min_labels) out.emplace_back(r, c);
    }
  }
  return out;
}

}  // namespace ctds
