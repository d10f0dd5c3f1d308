#include <doctest.h>

#include <algorithm>
#include <queue>

#include "ctds/enumerate.hpp"
#include "ctds/error.hpp"
#include "ctds/generators.hpp"
#include "oracles.hpp"

using namespace ctds;

namespace {

// Model count by DPLL: split on variable `var`, fixing it with unit clauses.
std::size_t dpll_count(std::size_t n, std::vector<Clause> clauses, std::size_t var) {
  const CnfFormula f(n, clauses);
  if (!std::holds_alternative<dpll::Sat>(dpll_solve(f, 10'000'000))) return 0;
  if (var == n) return 1;
  std::size_t total = 0;
  for (std::int8_t sign : {std::int8_t{1}, std::int8_t{-1}}) {
    auto more = clauses;
    more.push_back({Literal{static_cast<std::uint32_t>(var), sign}});
    total += dpll_count(n, more, var + 1);
  }
  return total;
}

std::vector<Clause> clauses_of(const CnfFormula& f) {
  std::vector<Clause> out;
  for (std::size_t m = 0; m < f.num_clauses(); ++m) out.emplace_back(f.clause(m).begin(), f.clause(m).end());
  return out;
}

// Components of the solution graph by BFS over all 2^n vertices.
std::size_t bfs_components(const CnfFormula& f) {
  const std::size_t n = f.num_vars();
  std::vector<char> is_model(std::size_t{1} << n, 0), seen(std::size_t{1} << n, 0);
  for (auto b : oracle::models(f)) is_model[b] = 1;
  std::size_t comps = 0;
  for (std::uint64_t v = 0; v < is_model.size(); ++v) {
    if (!is_model[v] || seen[v]) continue;
    ++comps;
    std::queue<std::uint64_t> q;
    q.push(v);
    seen[v] = 1;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (std::size_t i = 0; i < n; ++i) {
        const auto w = u ^ (std::uint64_t{1} << i);
        if (is_model[w] && !seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
      }
    }
  }
  return comps;
}

}  // namespace

TEST_CASE("enumeration of tiny formulas") {
  const CnfFormula f(2, {{Literal{0, 1}, Literal{1, 1}}});
  const auto sols = enumerate_solutions(f);
  CHECK(sols == std::vector<Assignment>{{-1, 1}, {1, -1}, {1, 1}});
  const CnfFormula unsat(1, {{Literal{0, 1}}, {Literal{0, -1}}});
  CHECK(enumerate_solutions(unsat).empty());
  try {
    enumerate_solutions(gen_random_ksat(30, 10, 3, 1));
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
}

TEST_CASE("enumeration count agrees with DPLL model counting") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const CnfFormula f = gen_random_ksat(12, 30 + seed % 25, 3, seed);
    const auto sols = enumerate_solutions(f);
    REQUIRE(sols.size() == dpll_count(12, clauses_of(f), 0));
    for (const auto& s : sols) REQUIRE(oracle::violated(f, s) == 0);
  }
}

TEST_CASE("clusters") {
  CHECK(cluster_solutions({{1, 1}, {1, -1}}).num_clusters() == 1);
  const ClusterSet two = cluster_solutions({{1, 1, 1}, {-1, -1, -1}});
  CHECK(two.num_clusters() == 2);
  CHECK(two.find({1, 1, 1}) == 0);
  CHECK(two.find({-1, -1, -1}) == 1);
  CHECK(two.find({1, -1, 1}) == ClusterSet::npos);
}

TEST_CASE("cluster count agrees with BFS over the full solution graph") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const CnfFormula f = gen_random_ksat(12, 48, 3, seed + 1000);
    const ClusterSet cs = cluster_solutions(enumerate_solutions(f));
    REQUIRE(cs.num_clusters() == bfs_components(f));
    std::size_t covered = 0;
    for (const auto& c : cs.clusters) covered += c.size();
    REQUIRE(covered == cs.solutions.size());
    for (std::size_t a = 0; a < cs.solutions.size(); ++a) {
      for (std::size_t b = a + 1; b < cs.solutions.size(); ++b) {
        int d = 0;
        for (std::size_t i = 0; i < 12; ++i) d += cs.solutions[a][i] != cs.solutions[b][i];
        if (d == 1) REQUIRE(cs.cluster_of[a] == cs.cluster_of[b]);
      }
    }
  }
}
