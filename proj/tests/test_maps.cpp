#include <doctest.h>

#include <cmath>

#include "ctds/error.hpp"
#include "ctds/generators.hpp"
#include "ctds/maps.hpp"

using namespace ctds;

namespace {

BasinMap synthetic(std::size_t w, std::size_t h, auto&& label) {
  BasinMap map;
  map.plane.width = w;
  map.plane.height = h;
  map.labels.resize(w * h);
  map.times.assign(w * h, 1.0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) map.labels[r * w + c] = label(r, c);
  }
  return map;
}

struct LinearFlow {
  double rate;
  bool operator()(std::span<const double> y, std::span<double> dydt) const {
    for (std::size_t i = 0; i < y.size(); ++i) dydt[i] = rate * y[i];
    return true;
  }
};

}  // namespace

TEST_CASE("plane geometry") {
  PlaneSpec p;
  p.width = 4;
  p.height = 2;
  CHECK(p.x_of(0) == doctest::Approx(-0.75));
  CHECK(p.x_of(3) == doctest::Approx(0.75));
  CHECK(p.y_of(0) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(p.validate(1), Error);
  p.var_j = 0;
  CHECK_THROWS_AS(p.validate(3), Error);
  p.var_j = 1;
  p.i_max = 1.5;
  CHECK_THROWS_AS(p.validate(3), Error);
  const auto bg = PlaneSpec{}.background(5);
  CHECK(bg == PlaneSpec{}.background(5));
  for (double x : bg) CHECK(std::abs(x) < 1.0);
}

TEST_CASE("single attractor map is constant") {
  const CnfFormula f(2, {{Literal{0, 1}}});
  PlaneSpec p;
  p.width = p.height = 16;
  const BasinMap map = basin_map(f, p, StepControl{}, LabelBy::Cluster);
  CHECK(map.unresolved_count() == 0);
  for (auto l : map.labels) CHECK(l == 0);
  CHECK(map.representatives.size() == 1);
  for (double t : map.times) CHECK(t >= 0.0);
}

TEST_CASE("maps are deterministic and thread independent") {
  const CnfFormula f = gen_random_ksat(12, 45, 3, 3);
  PlaneSpec p;
  p.width = p.height = 24;
  p.background_seed = 9;
  const BasinMap a = basin_map(f, p, StepControl{}, LabelBy::Solution, 1);
  const BasinMap b = basin_map(f, p, StepControl{}, LabelBy::Solution, 4);
  CHECK(a.labels == b.labels);
  CHECK(a.times == b.times);
  const BasinMap c = basin_map(f, p, StepControl{}, LabelBy::ApproximateCluster, 3);
  CHECK(c.approximate);
  CHECK(c.representatives.size() <= a.representatives.size());
  FsleParams fp;
  fp.num_directions = 3;
  StepControl fc;
  fc.t_max = 20.0;
  p.width = p.height = 6;
  const FsleMap fa = fsle_map(f, p, fp, fc, 1);
  const FsleMap fb = fsle_map(f, p, fp, fc, 3);
  CHECK(fa.phi == fb.phi);
  for (double v : fa.phi) CHECK(v >= 0.0);
}

TEST_CASE("cluster labels need enumeration") {
  const CnfFormula f = gen_random_ksat(30, 60, 3, 1);
  PlaneSpec p;
  p.width = p.height = 2;
  CHECK_THROWS_AS(basin_map(f, p, StepControl{}, LabelBy::Cluster), Error);
}

TEST_CASE("box counting on a straight boundary") {
  const BasinMap half = synthetic(256, 256, [](std::size_t, std::size_t c) { return c <= 100 ? 0 : 1; });
  const DimensionEstimate d = boundary_dimension(half);
  REQUIRE(d.dimension);
  CHECK(*d.dimension == doctest::Approx(1.0).epsilon(0.05));
  CHECK(d.boxes.scales.front() == 2);
  CHECK(d.boxes.scales.back() == 64);
  const BasinMap diag = synthetic(256, 256, [](std::size_t r, std::size_t c) { return r > c ? 0 : 1; });
  CHECK(*boundary_dimension(diag).dimension == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("box counting of a single label map has no boundary") {
  const BasinMap one = synthetic(64, 64, [](std::size_t, std::size_t) { return 3; });
  const DimensionEstimate d = boundary_dimension(one);
  CHECK_FALSE(d.dimension);
  for (auto c : d.boxes.counts) CHECK(c == 0);
}

TEST_CASE("box counting of a checkerboard fills the plane") {
  const BasinMap board = synthetic(128, 128, [](std::size_t r, std::size_t c) { return static_cast<int>((r + c) % 2); });
  CHECK(*boundary_dimension(board).dimension == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("box counting refuses unresolved maps") {
  BasinMap map = synthetic(64, 64, [](std::size_t, std::size_t c) { return c < 20 ? 0 : 1; });
  for (std::size_t i = 0; i < 100; ++i) map.labels[i] = BasinMap::kUnresolved;
  try {
    boundary_dimension(map);
    FAIL("expected UnresolvedCells");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnresolvedCells);
  }
  CHECK_NOTHROW(boundary_dimension(map, 0.05));
}

TEST_CASE("separation time on a linear flow recovers the rate") {
  for (double rate : {0.3, 1.0, 2.5}) {
    LinearFlow flow{rate};
    const std::vector<double> ref{0.1, -0.2, 0.3}, pert{0.1 + 1e-6, -0.2 - 2e-6, 0.3 + 0.5e-6};
    const double sep0 = std::sqrt(1e-12 + 4e-12 + 0.25e-12);
    StepControl c;
    c.eps = 1e-6;
    const auto tau = separation_time(
        flow, ref, pert, 3, 30.0 * sep0, c, [](std::span<double>) {},
        [](std::span<const double>, std::span<const double>) { return false; });
    REQUIRE(tau);
    const double phi = std::log(30.0) / *tau;
    CHECK(phi == doctest::Approx(rate).epsilon(0.05));
  }
}

TEST_CASE("separation that never grows gives no crossing") {
  LinearFlow flow{-1.0};
  StepControl c;
  c.t_max = 10.0;
  const auto tau = separation_time(
      flow, std::vector<double>{0.5}, std::vector<double>{0.5 + 1e-6}, 1, 3e-5, c, [](std::span<double>) {},
      [](std::span<const double>, std::span<const double>) { return false; });
  CHECK_FALSE(tau);
}

TEST_CASE("FSLE at a solution corner is zero") {
  const CnfFormula f = gen_random_ksat(10, 30, 3, 4);
  const auto r = dpll_solve(f, 100000);
  REQUIRE(std::holds_alternative<dpll::Sat>(r));
  const auto& w = std::get<dpll::Sat>(r).witness;
  std::vector<double> s(w.begin(), w.end());
  Rng dirs(1);
  CHECK(fsle_point(f, s, FsleParams{}, StepControl{}, dirs) == 0.0);
}

TEST_CASE("random box directions") {
  Rng rng(3);
  const std::vector<double> start{1.0, -1.0, 0.0, 0.99999999};
  for (int i = 0; i < 100; ++i) {
    const auto d = random_box_direction(rng, start, 4, 1e-6);
    double norm = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      norm += d[k] * d[k];
      CHECK(std::abs(start[k] + d[k]) <= 1.0);
    }
    CHECK(std::sqrt(norm) == doctest::Approx(1e-6));
  }
}

TEST_CASE("wada probe on a single attractor") {
  const CnfFormula f(2, {{Literal{0, 1}}, {Literal{1, 1}}});
  PlaneSpec p;
  p.width = p.height = 8;
  const auto windows = nested_windows(p, 0.1, 0.1, 4.0, 3);
  REQUIRE(windows.size() == 3);
  CHECK(windows[1][1] - windows[1][0] == doctest::Approx(0.5));
  const WadaReport report = wada_probe(f, p, windows, StepControl{});
  CHECK_FALSE(report.wada_consistent);
  for (const auto& level : report.levels) CHECK(level.labels.size() == 1);
}

TEST_CASE("wada probe on a two-basin formula") {
  // x1 xor x2 = 1 with nothing else: two isolated solutions, smooth boundary.
  const CnfFormula f(2, {{Literal{0, 1}, Literal{1, 1}}, {Literal{0, -1}, Literal{1, -1}}});
  PlaneSpec p;
  p.width = p.height = 16;
  const auto windows = nested_windows(p, 0.0, 0.0, 2.0, 4);
  // Cells on the diagonal sit on the symmetric invariant line and never solve.
  StepControl control;
  control.t_max = 50.0;
  control.n_step_max = 20'000;
  const WadaReport report = wada_probe(f, p, windows, control);
  CHECK_FALSE(report.wada_consistent);
  for (const auto& level : report.levels) CHECK(level.labels.size() == 2);
}

TEST_CASE("junction cells") {
  const BasinMap map = synthetic(8, 8, [](std::size_t r, std::size_t c) { return r < 4 ? 0 : (c < 4 ? 1 : 2); });
  const auto cells = junction_cells(map, 3);
  REQUIRE_FALSE(cells.empty());
  for (auto [r, c] : cells) {
    CHECK((r == 3 || r == 4));
    CHECK((c == 3 || c == 4));
  }
}
