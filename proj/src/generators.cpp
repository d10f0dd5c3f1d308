#include "ctds/generators.hpp"

#include <algorithm>
#include <charconv>
#include <bit>
#include <cctype>
#include <cmath>

#include "ctds/error.hpp"
#include "ctds/rng.hpp"

namespace ctds {

const char* to_string(Ensemble e) {
  switch (e) {
    case Ensemble::RandomKSat: return "ksat";
    case Ensemble::Lop1in3: return "lop";
    case Ensemble::XorSat: return "xorsat";
  }
  return "?";
}

Ensemble ensemble_from_string(std::string_view name) {
  if (name == "ksat") return Ensemble::RandomKSat;
  if (name == "lop" || name == "1in3") return Ensemble::Lop1in3;
  if (name == "xorsat" || name == "xor") return Ensemble::XorSat;
  throw Error(ErrorCode::InvalidArgument, "unknown ensemble '" + std::string(name) + "'");
}

std::size_t EnsembleSpec::num_constraints() const {
  const double n = static_cast<double>(num_vars);
  const double raw = ensemble == Ensemble::Lop1in3 ? density * n / 3.0 : density * n;
  return static_cast<std::size_t>(std::llround(raw));
}

namespace {

// k distinct variables, each uniform over those not yet drawn.
std::vector<std::uint32_t> draw_subset(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::uint32_t> vars;
  vars.reserve(k);
  while (vars.size() < k) {
    const auto v = static_cast<std::uint32_t>(rng.below(n));
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  }
  return vars;
}

void check_dims(std::size_t n, std::size_t m, std::size_t k, std::size_t min_k) {
  if (k < min_k || n < k || m < 1) {
    throw Error(ErrorCode::InvalidDimensions, "need n >= k >= " + std::to_string(min_k) + " and m >= 1 (n=" +
                                                  std::to_string(n) + ", m=" + std::to_string(m) + ", k=" + std::to_string(k) + ")");
  }
}

}  // namespace

CnfFormula gen_random_ksat(std::size_t n, std::size_t m, std::size_t k, std::uint64_t seed) {
  check_dims(n, m, k, 2);
  Rng rng(seed);
  std::vector<Clause> clauses(m);
  for (auto& clause : clauses) {
    for (std::uint32_t v : draw_subset(rng, n, k)) clause.push_back(Literal{v, 1});
    for (auto& lit : clause) lit.sign = rng.coin() ? 1 : -1;
  }
  return CnfFormula(n, clauses);
}

CnfFormula encode_lop_cnf(std::size_t n, const std::vector<std::array<std::uint32_t, 3>>& triples) {
  std::vector<Clause> clauses;
  clauses.reserve(4 * triples.size());
  for (const auto& [x, y, z] : triples) {
    clauses.push_back({{x, 1}, {y, 1}, {z, 1}});
    clauses.push_back({{x, -1}, {y, -1}});
    clauses.push_back({{x, -1}, {z, -1}});
    clauses.push_back({{y, -1}, {z, -1}});
  }
  return CnfFormula(n, clauses);
}

LopInstance gen_lop_1in3(std::size_t n, std::size_t m, std::uint64_t seed) {
  check_dims(n, m, 3, 3);
  Rng rng(seed);
  std::vector<std::array<std::uint32_t, 3>> triples(m);
  for (auto& t : triples) {
    const auto v = draw_subset(rng, n, 3);
    t = {v[0], v[1], v[2]};
  }
  CnfFormula cnf = encode_lop_cnf(n, triples);
  return LopInstance{n, std::move(triples), std::move(cnf)};
}

XorInstance gen_xorsat(std::size_t n, std::size_t m, std::size_t k, std::uint64_t seed) {
  check_dims(n, m, k, 1);
  Rng rng(seed);
  XorInstance inst{n, {}};
  inst.checks.reserve(m);
  for (std::size_t c = 0; c < m; ++c) {
    XorCheck check{draw_subset(rng, n, k), 0};
    check.parity = rng.coin() ? 1 : 0;
    inst.checks.push_back(std::move(check));
  }
  return inst;
}

CnfFormula encode_xorsat_cnf(const XorInstance& instance) {
  std::vector<Clause> clauses;
  for (const XorCheck& check : instance.checks) {
    const std::size_t k = check.vars.size();
    if (k == 0 || k > 20) throw Error(ErrorCode::InvalidDimensions, "XOR check arity must be in [1, 20]");
    // Pattern bit (k-1-j) is x_{vars[j]}; the first variable is the most significant bit.
    for (std::uint32_t pattern = 0; pattern < (1u << k); ++pattern) {
      const auto parity = static_cast<std::uint8_t>(std::popcount(pattern) & 1u);
      if (parity == check.parity) continue;
      Clause clause;
      for (std::size_t j = 0; j < k; ++j) {
        const bool bit = (pattern >> (k - 1 - j)) & 1u;
        clause.push_back(Literal{check.vars[j], static_cast<std::int8_t>(bit ? -1 : 1)});
      }
      clauses.push_back(std::move(clause));
    }
  }
  return CnfFormula(instance.num_vars, clauses);
}

CoreReport leaf_removal_core(const XorInstance& instance, std::optional<std::uint64_t> order_seed) {
  const std::size_t n = instance.num_vars;
  std::vector<std::size_t> degree(n, 0);
  std::vector<std::vector<std::size_t>> occurs(n);
  for (std::size_t c = 0; c < instance.checks.size(); ++c) {
    for (auto v : instance.checks[c].vars) {
      degree[v]++;
      occurs[v].push_back(c);
    }
  }
  std::vector<char> alive(instance.checks.size(), 1);
  std::vector<std::size_t> leaves;
  for (std::size_t v = 0; v < n; ++v) {
    if (degree[v] == 1) leaves.push_back(v);
  }
  std::optional<Rng> rng;
  if (order_seed) rng.emplace(*order_seed);

  while (!leaves.empty()) {
    std::size_t pick = leaves.size() - 1;
    if (rng) pick = static_cast<std::size_t>(rng->below(leaves.size()));
    const std::size_t v = leaves[pick];
    leaves[pick] = leaves.back();
    leaves.pop_back();
    if (degree[v] != 1) continue;
    const auto it = std::find_if(occurs[v].begin(), occurs[v].end(), [&](std::size_t c) { return alive[c]; });
    alive[*it] = 0;
    for (auto u : instance.checks[*it].vars) {
      if (--degree[u] == 1) leaves.push_back(u);
    }
  }

  CoreReport report;
  for (std::size_t c = 0; c < alive.size(); ++c) {
    if (alive[c]) report.remaining_clauses.push_back(c);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (degree[v] > 0) report.remaining_vars.push_back(v);
  }
  report.is_empty = report.remaining_clauses.empty();
  return report;
}

bool xor_satisfied(const XorInstance& instance, std::span<const std::int8_t> assignment) {
  if (assignment.size() != instance.num_vars) throw Error(ErrorCode::LengthMismatch, "assignment length differs from N");
  for (const XorCheck& check : instance.checks) {
    unsigned parity = 0;
    for (auto v : check.vars) parity ^= assignment[v] > 0 ? 1u : 0u;
    if (parity != check.parity) return false;
  }
  return true;
}

std::string write_xor(const XorInstance& instance) {
  std::string out = "p xor " + std::to_string(instance.num_vars) + " " + std::to_string(instance.checks.size()) + "\n";
  for (const XorCheck& check : instance.checks) {
    for (auto v : check.vars) out += std::to_string(v + 1) + " ";
    out += ": " + std::to_string(check.parity) + "\n";
  }
  return out;
}

XorInstance parse_xor(std::string_view text) {
  XorInstance inst;
  std::size_t declared = 0;
  bool have_header = false;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto to_num = [&](std::string_view tok, long long& out) {
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad token '" + std::string(tok) + "' at line " + std::to_string(line_no));
    }
  };
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    std::vector<std::string_view> tokens;
    for (std::size_t i = 0; i < line.size();) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::size_t s = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > s) tokens.push_back(line.substr(s, i - s));
    }
    if (tokens.empty() || tokens[0][0] == 'c') continue;
    if (tokens[0] == "p") {
      long long n = 0, m = 0;
      if (have_header || tokens.size() != 4 || tokens[1] != "xor") {
        throw Error(ErrorCode::MalformedHeader, "bad 'p xor' line at line " + std::to_string(line_no));
      }
      to_num(tokens[2], n);
      to_num(tokens[3], m);
      if (n <= 0 || m < 0) throw Error(ErrorCode::MalformedHeader, "bad 'p xor' dimensions");
      inst.num_vars = static_cast<std::size_t>(n);
      declared = static_cast<std::size_t>(m);
      have_header = true;
      continue;
    }
    if (!have_header) throw Error(ErrorCode::MalformedHeader, "check before 'p xor' header");
    if (tokens.size() < 3 || tokens[tokens.size() - 2] != ":") {
      throw Error(ErrorCode::InvalidArgument, "expected 'i j k : y' at line " + std::to_string(line_no));
    }
    XorCheck check;
    for (std::size_t t = 0; t + 2 < tokens.size(); ++t) {
      long long v = 0;
      to_num(tokens[t], v);
      if (v < 1 || v > static_cast<long long>(inst.num_vars)) {
        throw Error(ErrorCode::VariableOutOfRange, "variable " + std::string(tokens[t]) + " at line " + std::to_string(line_no));
      }
      const auto idx = static_cast<std::uint32_t>(v - 1);
      if (std::find(check.vars.begin(), check.vars.end(), idx) != check.vars.end()) {
        throw Error(ErrorCode::DuplicateVariableInClause, "repeated variable at line " + std::to_string(line_no));
      }
      check.vars.push_back(idx);
    }
    long long y = 0;
    to_num(tokens.back(), y);
    if (y != 0 && y != 1) throw Error(ErrorCode::InvalidArgument, "parity must be 0 or 1 at line " + std::to_string(line_no));
    check.parity = static_cast<std::uint8_t>(y);
    inst.checks.push_back(std::move(check));
  }
  if (!have_header) throw Error(ErrorCode::MalformedHeader, "missing 'p xor' header");
  if (inst.checks.size() != declared) throw Error(ErrorCode::ClauseCountMismatch, "check count differs from header");
  return inst;
}

GeneratedInstance generate(const EnsembleSpec& spec) {
  const std::size_t m = spec.num_constraints();
  switch (spec.ensemble) {
    case Ensemble::RandomKSat:
      return GeneratedInstance{spec, gen_random_ksat(spec.num_vars, m, spec.k, spec.seed), std::nullopt, std::nullopt};
    case Ensemble::Lop1in3: {
      LopInstance lop = gen_lop_1in3(spec.num_vars, m, spec.seed);
      CnfFormula cnf = lop.cnf;
      return GeneratedInstance{spec, std::move(cnf), std::nullopt, std::move(lop)};
    }
    case Ensemble::XorSat: {
      XorInstance x = gen_xorsat(spec.num_vars, m, spec.k, spec.seed);
      CnfFormula cnf = encode_xorsat_cnf(x);
      return GeneratedInstance{spec, std::move(cnf), std::move(x), std::nullopt};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown ensemble");
}

}  // namespace ctds
