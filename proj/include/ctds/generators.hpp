#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctds/formula.hpp"

namespace ctds {

enum class Ensemble { RandomKSat, Lop1in3, XorSat };

const char* to_string(Ensemble e);
Ensemble ensemble_from_string(std::string_view name);

/// Parameters of one random instance. `density` is alpha = M/N for k-SAT,
/// l = 3M/N for +1-in-3-SAT and gamma = M/N for XORSAT.
struct EnsembleSpec {
  Ensemble ensemble = Ensemble::RandomKSat;
  std::size_t k = 3;
  std::size_t num_vars = 0;
  double density = 0.0;
  std::uint64_t seed = 0;

  /// M, the nearest integer to the density-implied constraint count.
  std::size_t num_constraints() const;
};

struct XorCheck {
  std::vector<std::uint32_t> vars;  // 0-based, distinct
  std::uint8_t parity = 0;          // y_m

  friend bool operator==(const XorCheck&, const XorCheck&) = default;
};

struct XorInstance {
  std::size_t num_vars = 0;
  std::vector<XorCheck> checks;

  friend bool operator==(const XorInstance&, const XorInstance&) = default;
};

/// Positive triples of a +1-in-3-SAT instance and their CNF encoding.
struct LopInstance {
  std::size_t num_vars = 0;
  std::vector<std::array<std::uint32_t, 3>> triples;
  CnfFormula cnf;
};

CnfFormula gen_random_ksat(std::size_t n, std::size_t m, std::size_t k, std::uint64_t seed);
LopInstance gen_lop_1in3(std::size_t n, std::size_t m, std::uint64_t seed);
XorInstance gen_xorsat(std::size_t n, std::size_t m, std::size_t k, std::uint64_t seed);

/// One clause per parity pattern that violates the check: 2^(k-1) clauses
/// whose conjunction holds exactly when the variables XOR to y_m.
CnfFormula encode_xorsat_cnf(const XorInstance& instance);

/// The 4-clause exactly-one encoding of positive triples.
CnfFormula encode_lop_cnf(std::size_t n, const std::vector<std::array<std::uint32_t, 3>>& triples);

/// Leaf removal: repeatedly deletes checks holding a degree-1 variable.
CoreReport leaf_removal_core(const XorInstance& instance, std::optional<std::uint64_t> order_seed = std::nullopt);

/// True iff the Boolean assignment (x_i = sigma_i > 0) satisfies every check.
bool xor_satisfied(const XorInstance& instance, std::span<const std::int8_t> assignment);

/// `p xor N M` followed by one `i j k : y` line per check (1-based indices).
std::string write_xor(const XorInstance& instance);
XorInstance parse_xor(std::string_view text);

/// A generated instance from any ensemble, always with its CNF form.
struct GeneratedInstance {
  EnsembleSpec spec;
  CnfFormula cnf;
  std::optional<XorInstance> xor_form;
  std::optional<LopInstance> lop_form;
};

GeneratedInstance generate(const EnsembleSpec& spec);

}  // namespace ctds
