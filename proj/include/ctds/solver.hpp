#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctds/formula.hpp"
#include "ctds/generators.hpp"
#include "ctds/integrator.hpp"

namespace ctds {

inline constexpr int kRecordSchemaVersion = 1;

enum class SatOracle { Sat, Unsat, Unknown };

const char* to_string(SatOracle o);
SatOracle sat_oracle_from_string(std::string_view name);

struct SolveConfig {
  StepControl control;
  std::size_t num_parallel_starts = 1;
  std::size_t max_restarts_on_overflow = 3;
  std::uint64_t seed = 0;
  DynamicsParams dynamics;
};

struct SolveRecord {
  std::string instance_id;
  std::string ensemble;
  std::size_t N = 0;
  std::size_t M = 0;
  std::size_t k = 0;  // 0 when clause lengths are mixed and no ensemble k applies
  double density = 0.0;
  SatOracle sat_oracle = SatOracle::Unknown;
  RunStatus status = RunStatus::TimeBudgetExceeded;
  std::optional<double> t_solve;
  std::uint64_t n_step_total = 0;
  double length_L = 0.0;
  double wall_time = 0.0;
  std::uint64_t seed = 0;  // seed of the initial-condition streams
  double eps = 0.0;

  std::uint64_t instance_seed = 0;  // generator seed (batch records only)
  std::uint64_t n_rejected_total = 0;
  std::size_t restarts = 0;
  std::size_t discarded = 0;  // Unsat draws replaced under oracle filtering
  bool oracle_flagged = false;
  std::optional<Assignment> witness;

  /// Everything except wall_time.
  bool same_outcome(const SolveRecord& other) const;
};

/// Independent starts from i.i.d. uniform s(0) in (-1,1)^N with a_m(0) = 1.
/// Starts share one analog clock: a start is stopped once an earlier start
/// has solved sooner, t_solve is the earliest solve time, and n_step_total
/// counts every accepted step of every start and restart. A start that
/// overflows restarts from a fresh point with its clock running on.
SolveRecord solve(const CnfFormula& formula, const SolveConfig& config);

struct BatchSpec {
  EnsembleSpec ensemble;  // num_vars and seed are filled per instance
  std::vector<std::size_t> n_values;
  std::size_t instances_per_n = 0;
  SolveConfig config;
  bool oracle_filter = false;
  std::uint64_t decision_budget = 10'000'000;
  std::size_t max_regenerations = 10'000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Generator seed for instance `index` at size `n`: seed ^ (n << 32 | index).
std::uint64_t instance_seed(std::uint64_t batch_seed, std::size_t n, std::size_t index);

/// Records sorted by N (in n_values order) then instance index, independent
/// of the thread count.
std::vector<SolveRecord> run_batch(const BatchSpec& batch);

/// Builds one batch record (generation, optional filtering, solve).
SolveRecord run_batch_instance(const BatchSpec& batch, std::size_t n, std::size_t index);

std::string record_to_json(const SolveRecord& record);
SolveRecord record_from_json(std::string_view line);
std::vector<SolveRecord> read_records_jsonl(std::string_view text);

}  // namespace ctds
