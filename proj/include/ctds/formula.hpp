#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ctds {

/// A signed occurrence of a variable in a clause. `var` is 0-based; the
/// DIMACS layer is the only place that deals in 1-based indices.
struct Literal {
  std::uint32_t var = 0;
  std::int8_t sign = 1;  // c_mi: +1 direct, -1 negated

  static Literal from_dimacs(int lit);
  int to_dimacs() const { return sign > 0 ? static_cast<int>(var) + 1 : -static_cast<int>(var) - 1; }

  friend bool operator==(const Literal&, const Literal&) = default;
};

using Clause = std::vector<Literal>;

/// Discrete spins sigma_i in {+1, -1}.
using Assignment = std::vector<std::int8_t>;

/// CNF formula over N variables, stored as a flat clause table.
///
/// Construction validates every structural invariant: at least one clause,
/// no empty clause, indices below N, and no variable repeated within a clause
/// (which also excludes tautologies x | !x).
class CnfFormula {
 public:
  CnfFormula(std::size_t num_vars, const std::vector<Clause>& clauses);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t num_clauses() const { return offsets_.size() - 1; }
  double density() const { return static_cast<double>(num_clauses()) / static_cast<double>(num_vars_); }

  std::span<const Literal> clause(std::size_t m) const {
    return {literals_.data() + offsets_[m], offsets_[m + 1] - offsets_[m]};
  }
  std::size_t clause_length(std::size_t m) const { return offsets_[m + 1] - offsets_[m]; }

  /// The coefficient c_mi: +1, -1, or 0 when variable i is absent from clause m.
  int coefficient(std::size_t m, std::size_t i) const;

  /// Clause length k when every clause has the same length.
  std::optional<std::size_t> uniform_length() const;

  std::span<const Literal> literals() const { return literals_; }
  std::span<const std::size_t> offsets() const { return offsets_; }

  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;

 private:
  std::size_t num_vars_;
  std::vector<std::size_t> offsets_;
  std::vector<Literal> literals_;
};

CnfFormula parse_dimacs(std::string_view text);
std::string write_dimacs(const CnfFormula& formula);

CnfFormula read_dimacs_file(const std::string& path);
void write_dimacs_file(const CnfFormula& formula, const std::string& path);

struct Evaluation {
  bool satisfied = false;
  std::size_t violated_count = 0;
};

Evaluation evaluate(const CnfFormula& formula, std::span<const std::int8_t> assignment);

/// Leftover hypergraph after iterated pure-literal (or leaf) removal.
struct CoreReport {
  std::vector<std::size_t> remaining_clauses;  // sorted
  std::vector<std::size_t> remaining_vars;     // sorted, 0-based
  bool is_empty = true;

  friend bool operator==(const CoreReport&, const CoreReport&) = default;
};

/// Removes clauses containing pure literals until a fixed point. With
/// `order_seed` set, pure variables are processed in a pseudorandom order
/// instead of index order; the result is the same either way.
CoreReport pure_literal_core(const CnfFormula& formula, std::optional<std::uint64_t> order_seed = std::nullopt);

namespace dpll {
struct Sat {
  Assignment witness;
};
struct Unsat {};
struct BudgetExceeded {};
}  // namespace dpll

using DpllResult = std::variant<dpll::Sat, dpll::Unsat, dpll::BudgetExceeded>;

/// Complete backtracking search with unit propagation and pure-literal
/// elimination. Branches on the most frequent variable in the remaining
/// clauses, positive polarity first. `decision_budget` bounds the number of
/// branching decisions.
DpllResult dpll_solve(const CnfFormula& formula, std::uint64_t decision_budget);

}  // namespace ctds
