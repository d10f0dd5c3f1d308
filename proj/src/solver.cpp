#include "ctds/solver.hpp"

#include <chrono>
#include <limits>

#include <json.hpp>

#include "ctds/error.hpp"
#include "ctds/parallel.hpp"
#include "ctds/rng.hpp"

namespace ctds {

const char* to_string(SatOracle o) {
  switch (o) {
    case SatOracle::Sat: return "Sat";
    case SatOracle::Unsat: return "Unsat";
    case SatOracle::Unknown: return "Unknown";
  }
  return "?";
}

SatOracle sat_oracle_from_string(std::string_view name) {
  if (name == "Sat") return SatOracle::Sat;
  if (name == "Unsat") return SatOracle::Unsat;
  if (name == "Unknown") return SatOracle::Unknown;
  throw Error(ErrorCode::InvalidArgument, "unknown sat_oracle '" + std::string(name) + "'");
}

bool SolveRecord::same_outcome(const SolveRecord& o) const {
  return instance_id == o.instance_id && ensemble == o.ensemble && N == o.N && M == o.M && k == o.k &&
         density == o.density && sat_oracle == o.sat_oracle && status == o.status && t_solve == o.t_solve &&
         n_step_total == o.n_step_total && length_L == o.length_L && seed == o.seed && eps == o.eps &&
         instance_seed == o.instance_seed && n_rejected_total == o.n_rejected_total && restarts == o.restarts &&
         discarded == o.discarded && oracle_flagged == o.oracle_flagged && witness == o.witness;
}

SolveRecord solve(const CnfFormula& formula, const SolveConfig& config) {
  if (config.num_parallel_starts < 1) throw Error(ErrorCode::InvalidArgument, "num_parallel_starts must be >= 1");
  config.control.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  const std::size_t n = formula.num_vars();

  SolveRecord rec;
  rec.ensemble = "cnf";
  rec.N = n;
  rec.M = formula.num_clauses();
  rec.k = formula.uniform_length().value_or(0);
  rec.density = formula.density();
  rec.seed = config.seed;
  rec.eps = config.control.eps;

  double best_t = std::numeric_limits<double>::infinity();
  bool any_step_budget = false;
  bool any_overflow = false;
  for (std::size_t start = 0; start < config.num_parallel_starts; ++start) {
    Rng rng = Rng::substream(config.seed, start);
    const double limit = std::min(config.control.t_max, best_t);
    double elapsed = 0.0;
    std::uint64_t steps = 0;
    for (std::size_t attempt = 0;; ++attempt) {
      ContinuousState s0;
      s0.s.resize(n);
      for (double& x : s0.s) x = rng.uniform_open(-1.0, 1.0);
      s0.log_a.assign(formula.num_clauses(), 0.0);
      StepControl control = config.control;
      control.t_max = limit - elapsed;
      control.n_step_max = config.control.n_step_max - steps;
      if (control.t_max <= 0.0 || control.n_step_max == 0) break;
      if (control.h_init > control.t_max) control.h_init = std::max(control.h_min, control.t_max);
      if (control.h_init > control.h_max) control.h_init = control.h_max;

      RunOutcome run = integrate(formula, s0, control, false, config.dynamics);
      elapsed += run.t_final;
      steps += run.n_step;
      rec.n_step_total += run.n_step;
      rec.n_rejected_total += run.n_rejected;
      if (run.status == RunStatus::Solved) {
        if (elapsed < best_t) {
          best_t = elapsed;
          rec.witness = std::move(run.witness);
          rec.length_L = run.length_L;
        }
        break;
      }
      if (run.status == RunStatus::Overflow && attempt < config.max_restarts_on_overflow) {
        ++rec.restarts;
        continue;
      }
      if (run.status == RunStatus::Overflow) any_overflow = true;
      if (run.status == RunStatus::StepBudgetExceeded) any_step_budget = true;
      break;
    }
  }

  if (rec.witness) {
    rec.status = RunStatus::Solved;
    rec.t_solve = best_t;
  } else if (any_step_budget) {
    rec.status = RunStatus::StepBudgetExceeded;
  } else if (any_overflow) {
    rec.status = RunStatus::Overflow;
  } else {
    rec.status = RunStatus::TimeBudgetExceeded;
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return rec;
}

std::uint64_t instance_seed(std::uint64_t batch_seed, std::size_t n, std::size_t index) {
  return batch_seed ^ ((static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(index));
}

SolveRecord run_batch_instance(const BatchSpec& batch, std::size_t n, std::size_t index) {
  const auto wall_start = std::chrono::steady_clock::now();
  const std::uint64_t base = instance_seed(batch.seed, n, index);
  EnsembleSpec spec = batch.ensemble;
  spec.num_vars = n;

  SatOracle oracle = SatOracle::Unknown;
  bool flagged = false;
  std::size_t discarded = 0;
  std::optional<GeneratedInstance> instance;
  for (std::size_t attempt = 0;; ++attempt) {
    spec.seed = attempt == 0 ? base : mix64(base + attempt);
    instance.emplace(generate(spec));
    if (!batch.oracle_filter) break;
    const DpllResult r = dpll_solve(instance->cnf, batch.decision_budget);
    if (std::holds_alternative<dpll::Sat>(r)) {
      oracle = SatOracle::Sat;
      break;
    }
    if (std::holds_alternative<dpll::BudgetExceeded>(r)) {
      oracle = SatOracle::Unknown;
      flagged = true;
      break;
    }
    ++discarded;
    if (discarded > batch.max_regenerations) {
      throw Error(ErrorCode::InvalidArgument, "no satisfiable draw for n=" + std::to_string(n) + " after " +
                                                  std::to_string(discarded) + " attempts");
    }
  }

  SolveConfig config = batch.config;
  config.seed = mix64(spec.seed);
  SolveRecord rec = solve(instance->cnf, config);
  rec.instance_id = "n" + std::to_string(n) + "/" + std::to_string(index);
  rec.ensemble = to_string(spec.ensemble);
  rec.N = n;
  rec.k = spec.k;
  rec.density = spec.density;
  rec.sat_oracle = oracle;
  rec.instance_seed = spec.seed;
  rec.discarded = discarded;
  rec.oracle_flagged = flagged;
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return rec;
}

std::vector<SolveRecord> run_batch(const BatchSpec& batch) {
  const std::size_t per_n = batch.instances_per_n;
  const std::size_t total = per_n * batch.n_values.size();
  std::vector<SolveRecord> records(total);
  parallel_for(total, batch.threads, [&](std::size_t job) {
    records[job] = run_batch_instance(batch, batch.n_values[job / per_n], job % per_n);
  });
  return records;
}

namespace {

std::string assignment_string(const Assignment& a) {
  std::string s(a.size(), '0');
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] > 0 ? '1' : '0';
  return s;
}

Assignment assignment_from_string(const std::string& s) {
  Assignment a(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) a[i] = s[i] == '1' ? 1 : -1;
  return a;
}

}  // namespace

std::string record_to_json(const SolveRecord& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kRecordSchemaVersion;
  j["instance_id"] = r.instance_id;
  j["ensemble"] = r.ensemble;
  j["N"] = r.N;
  j["M"] = r.M;
  j["k"] = r.k;
  j["density"] = r.density;
  j["sat_oracle"] = to_string(r.sat_oracle);
  j["status"] = to_string(r.status);
  j["t_solve"] = r.t_solve ? nlohmann::ordered_json(*r.t_solve) : nlohmann::ordered_json(nullptr);
  j["n_step_total"] = r.n_step_total;
  j["length_L"] = r.length_L;
  j["wall_time"] = r.wall_time;
  j["seed"] = r.seed;
  j["eps"] = r.eps;
  j["instance_seed"] = r.instance_seed;
  j["n_rejected_total"] = r.n_rejected_total;
  j["restarts"] = r.restarts;
  j["discarded"] = r.discarded;
  j["oracle_flagged"] = r.oracle_flagged;
  j["witness"] = r.witness ? nlohmann::ordered_json(assignment_string(*r.witness)) : nlohmann::ordered_json(nullptr);
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

SolveRecord record_from_json(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad record JSON: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kRecordSchemaVersion) {
      throw Error(ErrorCode::InvalidArgument, "unsupported record schema_version");
    }
    SolveRecord r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.ensemble = j.at("ensemble").get<std::string>();
    r.N = j.at("N").get<std::size_t>();
    r.M = j.at("M").get<std::size_t>();
    r.k = j.at("k").get<std::size_t>();
    r.density = j.at("density").get<double>();
    r.sat_oracle = sat_oracle_from_string(j.at("sat_oracle").get<std::string>());
    r.status = run_status_from_string(j.at("status").get<std::string>());
    if (!j.at("t_solve").is_null()) r.t_solve = j.at("t_solve").get<double>();
    r.n_step_total = j.at("n_step_total").get<std::uint64_t>();
    r.length_L = j.at("length_L").get<double>();
    r.wall_time = j.at("wall_time").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.eps = j.at("eps").get<double>();
    r.instance_seed = j.value("instance_seed", std::uint64_t{0});
    r.n_rejected_total = j.value("n_rejected_total", std::uint64_t{0});
    r.restarts = j.value("restarts", std::size_t{0});
    r.discarded = j.value("discarded", std::size_t{0});
    r.oracle_flagged = j.value("oracle_flagged", false);
    if (j.contains("witness") && !j["witness"].is_null()) r.witness = assignment_from_string(j["witness"].get<std::string>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad record field: ") + e.what());
  }
}

std::vector<SolveRecord> read_records_jsonl(std::string_view text) {
  std::vector<SolveRecord> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    out.push_back(record_from_json(line));
  }
  return out;
}

}  // namespace ctds
