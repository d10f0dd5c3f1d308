#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ctds/error.hpp"
#include "ctds/formula.hpp"
#include "ctds/generators.hpp"
#include "oracles.hpp"

using namespace ctds;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

CnfFormula cnf(std::size_t n, std::initializer_list<std::initializer_list<int>> clauses) {
  std::vector<Clause> cs;
  for (const auto& c : clauses) {
    Clause cl;
    for (int lit : c) cl.push_back(Literal::from_dimacs(lit));
    cs.push_back(cl);
  }
  return CnfFormula(n, cs);
}

}  // namespace

TEST_CASE("dimacs parse reads clauses and coefficients") {
  const CnfFormula f = parse_dimacs("p cnf 2 1\n1 -2 0");
  CHECK(f.num_vars() == 2);
  CHECK(f.num_clauses() == 1);
  CHECK(f.coefficient(0, 0) == 1);
  CHECK(f.coefficient(0, 1) == -1);
}

TEST_CASE("dimacs parse errors") {
  CHECK(code_of([] { parse_dimacs("p cnf 2 1\n1 3 0"); }) == ErrorCode::VariableOutOfRange);
  CHECK(code_of([] { parse_dimacs("1 2 0"); }) == ErrorCode::MalformedHeader);
  CHECK(code_of([] { parse_dimacs("p cnf x 1\n1 0"); }) == ErrorCode::MalformedHeader);
  CHECK(code_of([] { parse_dimacs("p cnf 3 1\n1 2 1 0"); }) == ErrorCode::DuplicateVariableInClause);
  CHECK(code_of([] { parse_dimacs("p cnf 3 1\n1 -1 0"); }) == ErrorCode::TautologicalClause);
  CHECK(code_of([] { parse_dimacs("p cnf 3 2\n1 2 0"); }) == ErrorCode::ClauseCountMismatch);
  CHECK(code_of([] { parse_dimacs("p cnf 3 1\n1 2 0\n3 0"); }) == ErrorCode::ClauseCountMismatch);
}

TEST_CASE("dimacs comments and multi-line clauses") {
  const CnfFormula f = parse_dimacs("c hello\np cnf 3 2\n1\n2 0 -3\n0\n");
  CHECK(f.num_clauses() == 2);
  CHECK(f.clause_length(0) == 2);
  CHECK(f.clause(1)[0].to_dimacs() == -3);
}

TEST_CASE("dimacs writer is canonical") {
  CHECK(write_dimacs(cnf(1, {{-1}})) == "p cnf 1 1\n-1 0\n");
  CHECK(write_dimacs(cnf(3, {{1, 2, 3}})) == "p cnf 3 1\n1 2 3 0\n");
}

TEST_CASE("dimacs round trip on random formulas") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CnfFormula f = gen_random_ksat(15, 40, 3, seed);
    CHECK(parse_dimacs(write_dimacs(f)) == f);
  }
  const CnfFormula mixed = cnf(4, {{1}, {-2, 3}, {1, -4, 2, 3}});
  CHECK(parse_dimacs(write_dimacs(mixed)) == mixed);
}

TEST_CASE("evaluate") {
  auto r = evaluate(cnf(2, {{1, -2}}), Assignment{1, 1});
  CHECK(r.satisfied);
  CHECK(r.violated_count == 0);
  r = evaluate(cnf(2, {{1, 2}}), Assignment{-1, -1});
  CHECK_FALSE(r.satisfied);
  CHECK(r.violated_count == 1);
  CHECK(code_of([] { evaluate(cnf(2, {{1, 2}}), Assignment{1}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("evaluate agrees with brute force on every assignment") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CnfFormula f = gen_random_ksat(10, 30 + seed, 3, seed);
    for (std::uint64_t bits = 0; bits < (1U << 10); ++bits) {
      const Assignment a = oracle::assignment_from_bits(bits, 10);
      const auto r = evaluate(f, a);
      const std::size_t v = oracle::violated(f, a);
      REQUIRE(r.violated_count == v);
      REQUIRE(r.satisfied == (v == 0));
      REQUIRE(r.violated_count <= f.num_clauses());
    }
  }
}

TEST_CASE("pure literal core") {
  CHECK(pure_literal_core(cnf(3, {{1, 2, 3}})).is_empty);
  const CoreReport core = pure_literal_core(cnf(2, {{1, 2}, {-1, 2}, {-2, 1}, {-1, -2}}));
  CHECK_FALSE(core.is_empty);
  CHECK(core.remaining_clauses == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(core.remaining_vars == std::vector<std::size_t>{0, 1});
}

TEST_CASE("pure literal core is independent of removal order") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const CnfFormula f = gen_random_ksat(20, 20 + seed % 70, 3, seed);
    const CoreReport base = pure_literal_core(f);
    for (std::uint64_t order = 1; order <= 3; ++order) REQUIRE(pure_literal_core(f, order * 977 + seed) == base);
  }
}

TEST_CASE("dpll on small cases") {
  CHECK(std::holds_alternative<dpll::Unsat>(dpll_solve(cnf(1, {{1}, {-1}}), 100)));
  const auto r = dpll_solve(cnf(2, {{1, 2}, {-1}}), 100);
  REQUIRE(std::holds_alternative<dpll::Sat>(r));
  CHECK(std::get<dpll::Sat>(r).witness == Assignment{-1, 1});
  CHECK(std::holds_alternative<dpll::BudgetExceeded>(dpll_solve(gen_random_ksat(40, 170, 3, 3), 0)));
}

TEST_CASE("dpll agrees with exhaustive enumeration") {
  std::size_t sat = 0, unsat = 0;
  for (double alpha : {3.0, 4.25, 5.0}) {
    for (std::uint64_t seed = 0; seed < 167; ++seed) {
      const auto m = static_cast<std::size_t>(std::lround(alpha * 12));
      const CnfFormula f = gen_random_ksat(12, m, 3, seed * 31 + m);
      const bool has_model = !oracle::models(f).empty();
      const auto r = dpll_solve(f, 1'000'000);
      REQUIRE_FALSE(std::holds_alternative<dpll::BudgetExceeded>(r));
      REQUIRE(std::holds_alternative<dpll::Sat>(r) == has_model);
      if (has_model) {
        ++sat;
        REQUIRE(oracle::violated(f, std::get<dpll::Sat>(r).witness) == 0);
      } else {
        ++unsat;
      }
    }
  }
  CHECK(sat > 0);
  CHECK(unsat > 0);
}

TEST_CASE("construction rejects empty formulas") {
  CHECK(code_of([] { CnfFormula(3, {}); }) == ErrorCode::EmptyFormula);
}
