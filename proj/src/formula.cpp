#include "ctds/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ctds/error.hpp"
#include "ctds/rng.hpp"

namespace ctds {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::VariableOutOfRange: return "VariableOutOfRange";
    case ErrorCode::DuplicateVariableInClause: return "DuplicateVariableInClause";
    case ErrorCode::TautologicalClause: return "TautologicalClause";
    case ErrorCode::ClauseCountMismatch: return "ClauseCountMismatch";
    case ErrorCode::EmptyFormula: return "EmptyFormula";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::VariableNotInClause: return "VariableNotInClause";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::MixedClauseLengths: return "MixedClauseLengths";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::UnresolvedCells: return "UnresolvedCells";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Literal Literal::from_dimacs(int lit) {
  if (lit == 0) throw Error(ErrorCode::InvalidArgument, "literal 0 is the clause terminator");
  return Literal{static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1), static_cast<std::int8_t>(lit > 0 ? 1 : -1)};
}

CnfFormula::CnfFormula(std::size_t num_vars, const std::vector<Clause>& clauses) : num_vars_(num_vars) {
  if (num_vars == 0) throw Error(ErrorCode::InvalidDimensions, "formula needs at least one variable");
  if (clauses.empty()) throw Error(ErrorCode::EmptyFormula, "formula needs at least one clause");
  offsets_.reserve(clauses.size() + 1);
  offsets_.push_back(0);
  for (std::size_t m = 0; m < clauses.size(); ++m) {
    const Clause& c = clauses[m];
    if (c.empty()) throw Error(ErrorCode::InvalidDimensions, "clause " + std::to_string(m + 1) + " is empty");
    for (std::size_t a = 0; a < c.size(); ++a) {
      if (c[a].var >= num_vars) {
        throw Error(ErrorCode::VariableOutOfRange, "variable " + std::to_string(c[a].var + 1) + " exceeds N=" +
                                                       std::to_string(num_vars) + " in clause " + std::to_string(m + 1));
      }
      if (c[a].sign != 1 && c[a].sign != -1) throw Error(ErrorCode::InvalidArgument, "literal sign must be +1 or -1");
      for (std::size_t b = 0; b < a; ++b) {
        if (c[b].var == c[a].var) {
          throw Error(c[b].sign == c[a].sign ? ErrorCode::DuplicateVariableInClause : ErrorCode::TautologicalClause,
                      "variable " + std::to_string(c[a].var + 1) + " repeated in clause " + std::to_string(m + 1));
        }
      }
    }
    literals_.insert(literals_.end(), c.begin(), c.end());
    offsets_.push_back(literals_.size());
  }
}

int CnfFormula::coefficient(std::size_t m, std::size_t i) const {
  for (const Literal& lit : clause(m)) {
    if (lit.var == i) return lit.sign;
  }
  return 0;
}

std::optional<std::size_t> CnfFormula::uniform_length() const {
  const std::size_t k = clause_length(0);
  for (std::size_t m = 1; m < num_clauses(); ++m) {
    if (clause_length(m) != k) return std::nullopt;
  }
  return k;
}

namespace {

bool parse_int(std::string_view token, long long& out) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

CnfFormula parse_dimacs(std::string_view text) {
  std::optional<std::size_t> num_vars;
  std::size_t declared_clauses = 0;
  std::vector<Clause> clauses;
  Clause current;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == 'c' || tokens[0] == "%") continue;
    if (tokens[0] == "p") {
      long long n = 0, m = 0;
      if (num_vars || tokens.size() != 4 || tokens[1] != "cnf" || !parse_int(tokens[2], n) || !parse_int(tokens[3], m) ||
          n <= 0 || m < 0) {
        throw Error(ErrorCode::MalformedHeader, "bad problem line at line " + std::to_string(line_no));
      }
      num_vars = static_cast<std::size_t>(n);
      declared_clauses = static_cast<std::size_t>(m);
      continue;
    }
    if (!num_vars) throw Error(ErrorCode::MalformedHeader, "clause data before 'p cnf' header at line " + std::to_string(line_no));
    for (std::string_view tok : tokens) {
      long long lit = 0;
      if (!parse_int(tok, lit)) {
        throw Error(ErrorCode::InvalidArgument, "bad literal '" + std::string(tok) + "' at line " + std::to_string(line_no));
      }
      if (lit == 0) {
        clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      const long long mag = lit > 0 ? lit : -lit;
      if (mag > static_cast<long long>(*num_vars)) {
        throw Error(ErrorCode::VariableOutOfRange, "literal " + std::string(tok) + " exceeds N=" + std::to_string(*num_vars) +
                                                       " at line " + std::to_string(line_no));
      }
      current.push_back(Literal::from_dimacs(static_cast<int>(lit)));
    }
  }
  if (!num_vars) throw Error(ErrorCode::MalformedHeader, "missing 'p cnf' header");
  if (!current.empty()) throw Error(ErrorCode::ClauseCountMismatch, "last clause is not terminated by 0");
  if (clauses.size() != declared_clauses) {
    throw Error(ErrorCode::ClauseCountMismatch, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                                                    std::to_string(clauses.size()));
  }
  return CnfFormula(*num_vars, clauses);
}

std::string write_dimacs(const CnfFormula& formula) {
  std::string out = "p cnf " + std::to_string(formula.num_vars()) + " " + std::to_string(formula.num_clauses()) + "\n";
  for (std::size_t m = 0; m < formula.num_clauses(); ++m) {
    for (const Literal& lit : formula.clause(m)) {
      out += std::to_string(lit.to_dimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfFormula read_dimacs_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dimacs(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_dimacs_file(const CnfFormula& formula, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << write_dimacs(formula);
}

Evaluation evaluate(const CnfFormula& formula, std::span<const std::int8_t> assignment) {
  if (assignment.size() != formula.num_vars()) {
    throw Error(ErrorCode::LengthMismatch, "assignment has " + std::to_string(assignment.size()) + " entries, N=" +
                                               std::to_string(formula.num_vars()));
  }
  Evaluation ev;
  for (std::size_t m = 0; m < formula.num_clauses(); ++m) {
    const auto c = formula.clause(m);
    const bool sat = std::any_of(c.begin(), c.end(), [&](const Literal& l) { return assignment[l.var] == l.sign; });
    if (!sat) ++ev.violated_count;
  }
  ev.satisfied = ev.violated_count == 0;
  return ev;
}

CoreReport pure_literal_core(const CnfFormula& formula, std::optional<std::uint64_t> order_seed) {
  const std::size_t n = formula.num_vars();
  const std::size_t m_count = formula.num_clauses();
  std::vector<std::size_t> pos(n, 0), neg(n, 0);
  std::vector<std::vector<std::size_t>> occurs(n);
  for (std::size_t m = 0; m < m_count; ++m) {
    for (const Literal& l : formula.clause(m)) {
      (l.sign > 0 ? pos : neg)[l.var]++;
      occurs[l.var].push_back(m);
    }
  }
  auto is_pure = [&](std::size_t v) { return (pos[v] > 0) != (neg[v] > 0); };

  std::vector<char> alive(m_count, 1);
  std::vector<char> queued(n, 0);
  std::vector<std::size_t> pending;
  for (std::size_t v = 0; v < n; ++v) {
    if (is_pure(v)) {
      pending.push_back(v);
      queued[v] = 1;
    }
  }
  std::optional<Rng> rng;
  if (order_seed) rng.emplace(*order_seed);

  while (!pending.empty()) {
    std::size_t pick = 0;
    if (rng) pick = static_cast<std::size_t>(rng->below(pending.size()));
    const std::size_t v = pending[pick];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
    queued[v] = 0;
    if (!is_pure(v)) continue;
    for (std::size_t m : occurs[v]) {
      if (!alive[m]) continue;
      alive[m] = 0;
      for (const Literal& l : formula.clause(m)) {
        (l.sign > 0 ? pos : neg)[l.var]--;
        if (!queued[l.var] && is_pure(l.var)) {
          pending.push_back(l.var);
          queued[l.var] = 1;
        }
      }
    }
  }

  CoreReport report;
  for (std::size_t m = 0; m < m_count; ++m) {
    if (alive[m]) report.remaining_clauses.push_back(m);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (pos[v] + neg[v] > 0) report.remaining_vars.push_back(v);
  }
  report.is_empty = report.remaining_clauses.empty();
  return report;
}

namespace {

class DpllSearch {
 public:
  DpllSearch(const CnfFormula& f, std::uint64_t budget)
      : f_(f), budget_(budget), pos_(f.num_vars()), neg_(f.num_vars()) {}

  enum class Outcome { Sat, Unsat, Budget };

  Outcome run(Assignment& values) { return search(values); }

 private:
  // Unit propagation and pure-literal elimination to a fixed point.
  // Returns false on conflict. Leaves occurrence counts for branching.
  bool simplify(Assignment& values, bool& all_satisfied) {
    for (;;) {
      std::fill(pos_.begin(), pos_.end(), 0);
      std::fill(neg_.begin(), neg_.end(), 0);
      bool assigned_unit = false;
      all_satisfied = true;
      for (std::size_t m = 0; m < f_.num_clauses(); ++m) {
        const auto c = f_.clause(m);
        std::size_t free_count = 0;
        Literal last{};
        bool sat = false;
        for (const Literal& l : c) {
          const std::int8_t v = values[l.var];
          if (v == l.sign) {
            sat = true;
            break;
          }
          if (v == 0) {
            ++free_count;
            last = l;
          }
        }
        if (sat) continue;
        all_satisfied = false;
        if (free_count == 0) return false;
        if (free_count == 1) {
          values[last.var] = last.sign;
          assigned_unit = true;
          continue;
        }
        for (const Literal& l : c) {
          if (values[l.var] == 0) (l.sign > 0 ? pos_ : neg_)[l.var]++;
        }
      }
      if (assigned_unit) continue;
      if (all_satisfied) return true;
      bool assigned_pure = false;
      for (std::size_t v = 0; v < f_.num_vars(); ++v) {
        if (values[v] != 0) continue;
        if (pos_[v] > 0 && neg_[v] == 0) {
          values[v] = 1;
          assigned_pure = true;
        } else if (neg_[v] > 0 && pos_[v] == 0) {
          values[v] = -1;
          assigned_pure = true;
        }
      }
      if (!assigned_pure) return true;
    }
  }

  Outcome search(Assignment& values) {
    bool all_satisfied = false;
    if (!simplify(values, all_satisfied)) return Outcome::Unsat;
    if (all_satisfied) return Outcome::Sat;

    std::size_t best = f_.num_vars();
    std::size_t best_count = 0;
    for (std::size_t v = 0; v < f_.num_vars(); ++v) {
      const std::size_t count = pos_[v] + neg_[v];
      if (values[v] == 0 && count > best_count) {
        best = v;
        best_count = count;
      }
    }
    for (std::int8_t polarity : {std::int8_t{1}, std::int8_t{-1}}) {
      if (decisions_ >= budget_) return Outcome::Budget;
      ++decisions_;
      Assignment trial = values;
      trial[best] = polarity;
      const Outcome o = search(trial);
      if (o == Outcome::Sat) {
        values = std::move(trial);
        return o;
      }
      if (o == Outcome::Budget) return o;
    }
    return Outcome::Unsat;
  }

  const CnfFormula& f_;
  std::uint64_t budget_;
  std::uint64_t decisions_ = 0;
  std::vector<std::size_t> pos_, neg_;
};

}  // namespace

DpllResult dpll_solve(const CnfFormula& formula, std::uint64_t decision_budget) {
  Assignment values(formula.num_vars(), 0);
  DpllSearch search(formula, decision_budget);
  switch (search.run(values)) {
    case DpllSearch::Outcome::Sat:
      for (auto& v : values) {
        if (v == 0) v = 1;
      }
      return dpll::Sat{std::move(values)};
    case DpllSearch::Outcome::Unsat: return dpll::Unsat{};
    case DpllSearch::Outcome::Budget: break;
  }
  return dpll::BudgetExceeded{};
}

}  // namespace ctds
