#include "ctds/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ctds/error.hpp"

namespace ctds {

namespace {

void check_clause(const CnfFormula& f, std::size_t m) {
  if (m >= f.num_clauses()) {
    throw Error(ErrorCode::IndexOutOfRange, "clause " + std::to_string(m) + " of " + std::to_string(f.num_clauses()));
  }
}

constexpr std::size_t kInlineLength = 32;

}  // namespace

double constraint_value(const CnfFormula& formula, std::span<const double> s, std::size_t m) {
  check_clause(formula, m);
  const auto clause = formula.clause(m);
  double k = std::ldexp(1.0, -static_cast<int>(clause.size()));
  for (const Literal& l : clause) k *= 1.0 - l.sign * s[l.var];
  return k;
}

double constraint_partial(const CnfFormula& formula, std::span<const double> s, std::size_t m, std::size_t i) {
  check_clause(formula, m);
  const auto clause = formula.clause(m);
  bool found = false;
  double k = std::ldexp(1.0, -static_cast<int>(clause.size()));
  for (const Literal& l : clause) {
    if (l.var == i) {
      found = true;
      continue;
    }
    k *= 1.0 - l.sign * s[l.var];
  }
  if (!found) {
    throw Error(ErrorCode::VariableNotInClause, "variable " + std::to_string(i) + " not in clause " + std::to_string(m));
  }
  return k;
}

double energy_E(const CnfFormula& formula, std::span<const double> s) {
  double e = 0.0;
  for (std::size_t m = 0; m < formula.num_clauses(); ++m) {
    const double k = constraint_value(formula, s, m);
    e += k * k;
  }
  return e;
}

double energy_V(const CnfFormula& formula, std::span<const double> s, std::span<const double> log_a,
                const DynamicsParams& params) {
  double v = 0.0;
  for (std::size_t m = 0; m < formula.num_clauses(); ++m) {
    const double k = constraint_value(formula, s, m);
    if (k == 0.0) continue;
    if (log_a[m] > params.log_a_cap) throw Error(ErrorCode::Overflow, "auxiliary variable " + std::to_string(m) + " above cap");
    v += std::exp(log_a[m]) * k * k;
  }
  if (!std::isfinite(v)) throw Error(ErrorCode::Overflow, "V is not finite");
  return v;
}

FieldStatus rhs(const CnfFormula& formula, std::span<const double> s, std::span<const double> log_a,
                std::span<double> ds_dt, std::span<double> dlog_a_dt, const DynamicsParams& params) {
  std::fill(ds_dt.begin(), ds_dt.end(), 0.0);
  const auto lits = formula.literals();
  const auto offsets = formula.offsets();
  std::array<double, kInlineLength + 1> inline_prefix{};
  std::vector<double> heap_prefix;

  for (std::size_t m = 0; m < formula.num_clauses(); ++m) {
    const std::size_t begin = offsets[m];
    const std::size_t len = offsets[m + 1] - begin;
    double* prefix = inline_prefix.data();
    if (len > kInlineLength) {
      heap_prefix.resize(len + 1);
      prefix = heap_prefix.data();
    }
    // prefix[j] = 2^-k prod_{l<j} (1 - c_l s_l)
    prefix[0] = std::ldexp(1.0, -static_cast<int>(len));
    for (std::size_t j = 0; j < len; ++j) {
      const Literal& l = lits[begin + j];
      prefix[j + 1] = prefix[j] * (1.0 - l.sign * s[l.var]);
    }
    const double km = prefix[len];
    dlog_a_dt[m] = km;
    if (km == 0.0) continue;
    if (log_a[m] > params.log_a_cap) return FieldStatus::Overflow;
    const double weight = 2.0 * std::exp(log_a[m]) * km;
    double suffix = 1.0;
    for (std::size_t j = len; j-- > 0;) {
      const Literal& l = lits[begin + j];
      ds_dt[l.var] += weight * l.sign * prefix[j] * suffix;
      suffix *= 1.0 - l.sign * s[l.var];
    }
  }
  for (double d : ds_dt) {
    if (!std::isfinite(d)) return FieldStatus::Overflow;
  }
  return FieldStatus::Ok;
}

double attraction_sigma(std::size_t k) {
  return (static_cast<double>(k) - 1.0) / (static_cast<double>(k) + 1.0);
}

bool guaranteed_basin_test(const CnfFormula& formula, std::span<const double> s, std::span<const std::int8_t> s_star) {
  const auto k = formula.uniform_length();
  if (!k) throw Error(ErrorCode::MixedClauseLengths, "attraction bound needs a uniform clause length");
  if (s.size() != formula.num_vars() || s_star.size() != formula.num_vars()) {
    throw Error(ErrorCode::LengthMismatch, "state and solution must have length N");
  }
  double r2 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 0.0 || (s[i] > 0.0) != (s_star[i] > 0)) return false;
    r2 += s[i] * s[i];
  }
  const double sigma = attraction_sigma(*k);
  return r2 >= static_cast<double>(s.size()) - 1.0 + sigma * sigma;
}

}  // namespace ctds
