#include <doctest.h>

#include <cmath>

#include "ctds/dynamics.hpp"
#include "ctds/error.hpp"
#include "ctds/generators.hpp"
#include "ctds/rng.hpp"

using namespace ctds;

namespace {

CnfFormula cnf(std::size_t n, std::initializer_list<std::initializer_list<int>> clauses) {
  std::vector<Clause> cs;
  for (const auto& c : clauses) {
    Clause cl;
    for (int lit : c) cl.push_back(Literal::from_dimacs(lit));
    cs.push_back(cl);
  }
  return CnfFormula(n, cs);
}

std::vector<double> random_state(Rng& rng, std::size_t n, double bound = 1.0) {
  std::vector<double> s(n);
  for (double& x : s) x = rng.uniform_open(-bound, bound);
  return s;
}

}  // namespace

TEST_CASE("constraint values") {
  const CnfFormula f = cnf(3, {{1, 2, 3}});
  CHECK(constraint_value(f, std::vector<double>{1.0, 0.3, -0.2}, 0) == 0.0);
  CHECK(constraint_value(f, std::vector<double>{-1.0, -1.0, -1.0}, 0) == 1.0);
  CHECK(constraint_value(f, std::vector<double>{0.0, 0.0, 0.0}, 0) == 0.125);
  CHECK_THROWS_AS(constraint_value(f, std::vector<double>{0.0, 0.0, 0.0}, 1), Error);
}

TEST_CASE("constraint partials by omission") {
  const CnfFormula f2 = cnf(2, {{1, 2}});
  CHECK(constraint_partial(f2, std::vector<double>{1.0, 0.0}, 0, 1) == 0.0);
  CHECK(constraint_partial(f2, std::vector<double>{1.0, 0.0}, 0, 0) == doctest::Approx(0.25));
  const CnfFormula f3 = cnf(4, {{1, 2, 3}});
  for (std::size_t i = 0; i < 3; ++i) CHECK(constraint_partial(f3, std::vector<double>{0, 0, 0, 0}, 0, i) == 0.125);
  try {
    constraint_partial(f3, std::vector<double>{0, 0, 0, 0}, 0, 3);
    FAIL("expected VariableNotInClause");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::VariableNotInClause);
  }
}

TEST_CASE("K_m = (1 - c_mi s_i) K_mi and K_m in [0, 1]") {
  Rng rng(5);
  const CnfFormula f = gen_random_ksat(12, 200, 4, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_state(rng, 12);
    const std::size_t m = rng.below(f.num_clauses());
    const auto clause = f.clause(m);
    const Literal lit = clause[rng.below(clause.size())];
    const double km = constraint_value(f, s, m);
    REQUIRE(km >= 0.0);
    REQUIRE(km <= 1.0);
    REQUIRE(std::abs(km - (1.0 - lit.sign * s[lit.var]) * constraint_partial(f, s, m, lit.var)) < 1e-12);
  }
}

TEST_CASE("energies") {
  const CnfFormula f = cnf(2, {{1, 2}, {-1, 2}});
  CHECK(energy_E(f, std::vector<double>{1.0, 1.0}) == 0.0);
  CHECK(energy_E(f, std::vector<double>{1.0, -1.0}) == 1.0);
  Rng rng(1);
  const CnfFormula g = gen_random_ksat(10, 40, 3, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_state(rng, 10);
    double e = 0.0;
    for (std::size_t m = 0; m < g.num_clauses(); ++m) e += std::pow(constraint_value(g, s, m), 2);
    REQUIRE(energy_E(g, s) == doctest::Approx(e).epsilon(1e-12));
    std::vector<double> zero(g.num_clauses(), 0.0), shifted(g.num_clauses(), std::log(3.0));
    REQUIRE(energy_V(g, s, zero) == doctest::Approx(e).epsilon(1e-12));
    REQUIRE(energy_V(g, s, shifted) == doctest::Approx(3.0 * e).epsilon(1e-12));
  }
  std::vector<double> big(2, 800.0);
  CHECK_NOTHROW(energy_V(f, std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0}));
  CHECK_THROWS_AS(energy_V(f, std::vector<double>{-1.0, -1.0}, big), Error);
  std::vector<double> positive{0.4, 2.5};
  CHECK(energy_V(f, std::vector<double>{1.0, 1.0}, positive) == 0.0);
}

TEST_CASE("vector field of one clause at the origin") {
  const CnfFormula f = cnf(3, {{1, 2, 3}});
  std::vector<double> ds(3), db(1);
  REQUIRE(rhs(f, std::vector<double>{0, 0, 0}, std::vector<double>{0.0}, ds, db) == FieldStatus::Ok);
  for (double d : ds) CHECK(d == doctest::Approx(1.0 / 32.0));
  CHECK(db[0] == doctest::Approx(0.125));
}

TEST_CASE("vector field vanishes at a solution") {
  const CnfFormula f = gen_random_ksat(10, 30, 3, 4);
  const auto r = dpll_solve(f, 100000);
  REQUIRE(std::holds_alternative<dpll::Sat>(r));
  const auto& w = std::get<dpll::Sat>(r).witness;
  std::vector<double> s(w.begin(), w.end()), ds(10), db(30), la(30, 2.0);
  REQUIRE(rhs(f, s, la, ds, db) == FieldStatus::Ok);
  for (double d : ds) CHECK(d == 0.0);
  for (double d : db) CHECK(d == 0.0);
}

TEST_CASE("overflow signal") {
  const CnfFormula f = cnf(2, {{1, 2}});
  std::vector<double> ds(2), db(1);
  CHECK(rhs(f, std::vector<double>{0, 0}, std::vector<double>{601.0}, ds, db) == FieldStatus::Overflow);
  CHECK(rhs(f, std::vector<double>{0, 0}, std::vector<double>{599.0}, ds, db) == FieldStatus::Ok);
}

TEST_CASE("ds/dt is minus the gradient of V") {
  Rng rng(77);
  const CnfFormula f = gen_random_ksat(20, 80, 3, 12);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_state(rng, 20, 0.9);
    std::vector<double> la(80);
    for (double& b : la) b = rng.uniform_open(0.0, 2.0);
    std::vector<double> ds(20), db(80);
    REQUIRE(rhs(f, s, la, ds, db) == FieldStatus::Ok);
    for (std::size_t i = 0; i < 20; ++i) {
      const double h = 1e-5, keep = s[i];
      s[i] = keep + h;
      const double vp = energy_V(f, s, la);
      s[i] = keep - h;
      const double vm = energy_V(f, s, la);
      s[i] = keep;
      const double fd = -(vp - vm) / (2.0 * h);
      REQUIRE(std::abs(ds[i] - fd) <= 1e-5 * std::max(std::abs(fd), 1e-3));
    }
  }
}

TEST_CASE("inflow at the box boundary and non-negative db/dt") {
  Rng rng(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const CnfFormula f = gen_random_ksat(12, 50, 3, seed);
    auto s = random_state(rng, 12);
    for (std::size_t i = 0; i < 12; i += 2) s[i] = rng.coin() ? 1.0 : -1.0;
    std::vector<double> la(50), ds(12), db(50);
    for (double& b : la) b = rng.uniform_open(-3.0, 5.0);
    REQUIRE(rhs(f, s, la, ds, db) == FieldStatus::Ok);
    for (std::size_t i = 0; i < 12; i += 2) REQUIRE(s[i] * ds[i] <= 0.0);
    for (double d : db) REQUIRE(d >= 0.0);
  }
}

TEST_CASE("guaranteed basin test") {
  CHECK(attraction_sigma(3) == 0.5);
  const CnfFormula f = cnf(3, {{1, 2, 3}, {1, -2, 3}});
  const Assignment star{1, 1, -1};
  CHECK(guaranteed_basin_test(f, std::vector<double>{1, 1, -1}, star));
  CHECK_FALSE(guaranteed_basin_test(f, std::vector<double>{0.4, 1, -1}, star));
  CHECK(guaranteed_basin_test(f, std::vector<double>{0.5, 1, -1}, star));
  CHECK_FALSE(guaranteed_basin_test(f, std::vector<double>{-1, 1, -1}, star));
  const CnfFormula mixed = cnf(3, {{1, 2, 3}, {1, -2}});
  try {
    guaranteed_basin_test(mixed, std::vector<double>{1, 1, 1}, Assignment{1, 1, 1});
    FAIL("expected MixedClauseLengths");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MixedClauseLengths);
  }
}

TEST_CASE("radial growth inside the guaranteed domain") {
  Rng rng(21);
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const CnfFormula f = gen_random_ksat(10, 35, 3, seed);
    const auto r = dpll_solve(f, 100000);
    if (!std::holds_alternative<dpll::Sat>(r)) continue;
    const auto& w = std::get<dpll::Sat>(r).witness;
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> s(10);
      for (std::size_t i = 0; i < 10; ++i) s[i] = w[i];
      const std::size_t j = rng.below(10);
      s[j] = w[j] * rng.uniform_open(0.5, 1.0);
      REQUIRE(guaranteed_basin_test(f, s, w));
      std::vector<double> la(35), ds(10), db(35);
      for (double& b : la) b = rng.uniform_open(0.0, 3.0);
      REQUIRE(rhs(f, s, la, ds, db) == FieldStatus::Ok);
      if (energy_E(f, s) == 0.0) continue;
      double radial = 0.0;
      for (std::size_t i = 0; i < 10; ++i) radial += s[i] * ds[i];
      REQUIRE(radial > 0.0);
      ++checked;
    }
  }
  CHECK(checked > 0);
}
