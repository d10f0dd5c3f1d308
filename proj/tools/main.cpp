#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctds/config.hpp"
#include "ctds/diagnostics.hpp"
#include "ctds/error.hpp"
#include "ctds/fits.hpp"
#include "ctds/formula.hpp"
#include "ctds/generators.hpp"
#include "ctds/maps.hpp"
#include "ctds/output.hpp"
#include "ctds/rng.hpp"
#include "ctds/solver.hpp"

using namespace ctds;
using json = nlohmann::ordered_json;

namespace {

constexpr int kManifestSchemaVersion = 1;

struct Globals {
  std::uint64_t seed = 0;
  double eps = 1e-3;
  std::size_t threads = 1;
  std::string out;
  std::string config;
};

struct Budget {
  double t_max = 1e4;
  std::uint64_t n_step_max = 10'000'000;
  double h_init = 1e-2;
  double h_min = 1e-12;
  double h_max = 1.0;
};

struct PlaneFlags {
  std::size_t var_i = 1, var_j = 2;
  std::vector<double> window{-1.0, 1.0, -1.0, 1.0};
  std::size_t width = 64, height = 64;
  std::optional<std::uint64_t> background_seed;
};

// The input being read when a runtime error fires; named in the message.
std::string g_input;

StepControl make_control(const Globals& g, const Budget& b) {
  StepControl c;
  c.eps = g.eps;
  c.t_max = b.t_max;
  c.n_step_max = b.n_step_max;
  c.h_init = b.h_init;
  c.h_min = b.h_min;
  c.h_max = b.h_max;
  c.validate();
  return c;
}

void add_budget_flags(CLI::App* cmd, Budget& b) {
  cmd->add_option("--t-max", b.t_max, "analog time budget per trajectory");
  cmd->add_option("--n-step-max", b.n_step_max, "accepted-step budget per trajectory");
  cmd->add_option("--h-init", b.h_init, "initial step size");
  cmd->add_option("--h-min", b.h_min, "smallest step size");
  cmd->add_option("--h-max", b.h_max, "largest step size");
}

void add_plane_flags(CLI::App* cmd, PlaneFlags& p) {
  cmd->add_option("--var-i", p.var_i, "horizontal variable (1-based)");
  cmd->add_option("--var-j", p.var_j, "vertical variable (1-based)");
  cmd->add_option("--window", p.window, "i_min i_max j_min j_max")->expected(4);
  cmd->add_option("--width", p.width, "grid columns");
  cmd->add_option("--height", p.height, "grid rows");
  cmd->add_option("--background-seed", p.background_seed, "seed of the fixed coordinates (default: --seed)");
}

PlaneSpec make_plane(const PlaneFlags& f, const Globals& g) {
  if (f.var_i == 0 || f.var_j == 0) throw Error(ErrorCode::InvalidArgument, "plane variables are 1-based");
  PlaneSpec p;
  p.var_i = f.var_i - 1;
  p.var_j = f.var_j - 1;
  p.i_min = f.window[0];
  p.i_max = f.window[1];
  p.j_min = f.window[2];
  p.j_max = f.window[3];
  p.width = f.width;
  p.height = f.height;
  p.background_seed = f.background_seed.value_or(g.seed);
  return p;
}

CnfFormula load_formula(const std::string& path) {
  g_input = path;
  CnfFormula f = read_dimacs_file(path);
  g_input.clear();
  return f;
}

std::vector<SolveRecord> load_records(const std::vector<std::string>& paths) {
  std::vector<SolveRecord> all;
  for (const auto& p : paths) {
    g_input = p;
    auto recs = read_records_jsonl(read_text_file(p));
    all.insert(all.end(), recs.begin(), recs.end());
  }
  g_input.clear();
  return all;
}

/// Writes to --out when set, else stdout.
void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(g.out, text);
  }
}

json option_values(const CLI::App* app) {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      j[name] = res.size() == 1 ? json(res.front()) : json(res);
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

void write_manifest(const CLI::App& app, const CLI::App* cmd, const Globals& g, const std::vector<std::string>& outputs,
                    const json& extra = json::object()) {
  json m;
  m["schema_version"] = kManifestSchemaVersion;
  m["record_schema_version"] = kRecordSchemaVersion;
  m["subcommand"] = cmd->get_name();
  m["rng"] = std::string(Rng::kAlgorithm);
  m["seed"] = g.seed;
  m["threads"] = g.threads;
  m["config_file"] = g.config;
  json resolved = option_values(&app);
  const json sub = option_values(cmd);
  for (const auto& [k, v] : sub.items()) resolved[k] = v;
  m["resolved"] = resolved;
  m["outputs"] = outputs;
  if (!extra.empty()) m["summary"] = extra;
  write_text_file(g.out + ".manifest.json", m.dump(2) + "\n");
}

/// Applies config-file entries to options not given on the command line.
void apply_config(CLI::App& app, CLI::App* cmd, const std::string& path) {
  g_input = path;
  const auto entries = load_config_file(path);
  for (const auto& e : entries) {
    CLI::Option* opt = nullptr;
    try {
      opt = cmd ? cmd->get_option("--" + e.key) : nullptr;
    } catch (const CLI::OptionNotFound&) {
    }
    if (!opt) {
      try {
        opt = app.get_option("--" + e.key);
      } catch (const CLI::OptionNotFound&) {
        throw Error(ErrorCode::UnknownKey, "unknown key '" + e.key + "' on line " + std::to_string(e.line));
      }
    }
    if (e.key == "config") throw Error(ErrorCode::UnknownKey, "config files cannot nest");
    if (opt->count() > 0) continue;
    try {
      if (opt->get_items_expected_max() > 1) {
        std::istringstream in(e.value);
        std::string item;
        while (in >> item) opt->add_result(item);
      } else {
        opt->add_result(e.value);
      }
      opt->run_callback();
    } catch (const CLI::Error& err) {
      throw Error(ErrorCode::TypeMismatch,
                  "key '" + e.key + "' = '" + e.value + "' on line " + std::to_string(e.line) + ": " + err.what());
    }
  }
  g_input.clear();
}

std::string format_core(const CoreReport& core) {
  json j;
  j["is_empty"] = core.is_empty;
  j["remaining_clauses"] = core.remaining_clauses.size();
  j["remaining_vars"] = core.remaining_vars.size();
  std::vector<std::size_t> clauses, vars;
  for (auto c : core.remaining_clauses) clauses.push_back(c + 1);
  for (auto v : core.remaining_vars) vars.push_back(v + 1);
  j["clauses"] = clauses;
  j["vars"] = vars;
  return j.dump() + "\n";
}

json fit_object(const ScalingFit& fit) { return json::parse(fit_json(fit)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time dynamical system SAT solver and analysis toolkit", "ctds"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--eps", g.eps, "relative local error tolerance")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output path (prefix for map outputs)");
  app.add_option("--config", g.config, "key = value config file; flags override it");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random instance")->fallthrough();
  std::string gen_ensemble = "ksat", gen_format = "cnf";
  std::size_t gen_k = 3, gen_n = 0;
  double gen_density = 0.0;
  gen->add_option("--ensemble", gen_ensemble, "ksat | lop | xorsat")->check(CLI::IsMember({"ksat", "lop", "1in3", "xorsat", "xor"}));
  gen->add_option("--k", gen_k, "clause / check length");
  gen->add_option("--n", gen_n, "number of variables")->required();
  gen->add_option("--alpha,--density,--l,--gamma", gen_density, "constraint density (alpha, l or gamma)")->required();
  gen->add_option("--format", gen_format, "cnf | xor (xor for xorsat only)")->check(CLI::IsMember({"cnf", "xor"}));

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "integrate the dynamics on a DIMACS formula")->fallthrough();
  std::string solve_input;
  std::size_t starts = 1, restarts = 3;
  bool with_witness = false;
  Budget solve_budget;
  solve_cmd->add_option("input", solve_input, "DIMACS file")->required();
  solve_cmd->add_option("--starts", starts, "parallel starts sharing one clock")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--restarts", restarts, "restarts after overflow");
  solve_cmd->add_flag("--witness", with_witness, "keep the witness in the record");
  add_budget_flags(solve_cmd, solve_budget);

  // batch
  auto* batch_cmd = app.add_subcommand("batch", "generate and solve an ensemble")->fallthrough();
  std::string batch_ensemble = "ksat";
  std::size_t batch_k = 3, batch_instances = 100, batch_starts = 1;
  std::vector<std::size_t> batch_ns;
  double batch_density = 4.25;
  bool batch_filter = false, batch_witness = false;
  std::uint64_t decision_budget = 10'000'000;
  Budget batch_budget;
  batch_cmd->add_option("--ensemble", batch_ensemble, "ksat | lop | xorsat")->check(CLI::IsMember({"ksat", "lop", "1in3", "xorsat", "xor"}));
  batch_cmd->add_option("--k", batch_k, "clause / check length");
  batch_cmd->add_option("--n-values", batch_ns, "sizes N")->required();
  batch_cmd->add_option("--instances", batch_instances, "instances per N");
  batch_cmd->add_option("--alpha,--density,--l,--gamma", batch_density, "constraint density");
  batch_cmd->add_flag("--filter", batch_filter, "replace DPLL-unsatisfiable draws");
  batch_cmd->add_option("--decision-budget", decision_budget, "DPLL decision budget");
  batch_cmd->add_option("--starts", batch_starts, "parallel starts per instance")->check(CLI::PositiveNumber);
  batch_cmd->add_flag("--witness", batch_witness, "keep witnesses in the records");
  add_budget_flags(batch_cmd, batch_budget);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit decay laws to solve records")->fallthrough();
  std::string fit_mode = "exp";
  std::vector<std::string> fit_inputs;
  double p_hi = 0.5, p_lo = 0.02;
  bool per_instance = false;
  fit_cmd->add_option("--mode", fit_mode, "exp | rate | steppow | eta")->check(CLI::IsMember({"exp", "rate", "steppow", "eta"}));
  fit_cmd->add_option("inputs", fit_inputs, "JSONL record files")->required();
  fit_cmd->add_option("--p-hi", p_hi, "upper survival bound of the window");
  fit_cmd->add_option("--p-lo", p_lo, "lower survival bound of the window");
  fit_cmd->add_flag("--per-instance", per_instance, "exp mode: one fit per instance_id");

  // basin
  auto* basin_cmd = app.add_subcommand("basin", "basin and search-time maps on a 2-D slice")->fallthrough();
  std::string basin_input, label_by = "solution";
  std::size_t max_enum_vars = 26;
  PlaneFlags basin_plane;
  Budget basin_budget;
  basin_cmd->add_option("input", basin_input, "DIMACS file")->required();
  basin_cmd->add_option("--label", label_by, "solution | cluster | approx-cluster")
      ->check(CLI::IsMember({"solution", "cluster", "approx-cluster"}));
  basin_cmd->add_option("--max-enum-vars", max_enum_vars, "enumeration guard for cluster labels");
  add_plane_flags(basin_cmd, basin_plane);
  add_budget_flags(basin_cmd, basin_budget);

  // fsle
  auto* fsle_cmd = app.add_subcommand("fsle", "finite-size Lyapunov exponent map")->fallthrough();
  std::string fsle_input;
  FsleParams fsle_params;
  std::optional<std::uint64_t> direction_seed;
  PlaneFlags fsle_plane;
  Budget fsle_budget;
  fsle_budget.t_max = 100.0;
  fsle_cmd->add_option("input", fsle_input, "DIMACS file")->required();
  fsle_cmd->add_option("--eps0", fsle_params.eps0, "initial separation")->check(CLI::PositiveNumber);
  fsle_cmd->add_option("--ratio", fsle_params.ratio, "amplification ratio")->check(CLI::Range(1.0 + 1e-12, 1e300));
  fsle_cmd->add_option("--directions", fsle_params.num_directions, "perturbation directions per cell");
  fsle_cmd->add_option("--direction-seed", direction_seed, "direction stream seed (default: --seed)");
  add_plane_flags(fsle_cmd, fsle_plane);
  add_budget_flags(fsle_cmd, fsle_budget);

  // core
  auto* core_cmd = app.add_subcommand("core", "pure-literal core (DIMACS) or leaf-removal core (xor)")->fallthrough();
  std::string core_input;
  core_cmd->add_option("input", core_input, "DIMACS or xor file")->required();

  // traj
  auto* traj_cmd = app.add_subcommand("traj", "record one trajectory and its diagnostics")->fallthrough();
  std::string traj_input;
  std::vector<std::size_t> traj_vars, traj_clauses;
  std::size_t max_points = 100'000;
  Budget traj_budget;
  traj_cmd->add_option("input", traj_input, "DIMACS file")->required();
  traj_cmd->add_option("--vars", traj_vars, "variables to record (1-based)");
  traj_cmd->add_option("--clauses", traj_clauses, "clauses whose a_m to record (1-based)");
  traj_cmd->add_option("--max-points", max_points, "trace thinning limit");
  add_budget_flags(traj_cmd, traj_budget);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    if (!g.config.empty()) apply_config(app, cmd, g.config);
    // Config values may have been applied after CLI11 ran its checks.
    if (!(g.eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "--eps must be positive");
    if (g.threads == 0) throw Error(ErrorCode::InvalidArgument, "--threads must be positive");

    if (cmd == gen) {
      EnsembleSpec spec;
      spec.ensemble = ensemble_from_string(gen_ensemble);
      spec.k = gen_k;
      spec.num_vars = gen_n;
      spec.density = gen_density;
      spec.seed = g.seed;
      const GeneratedInstance inst = generate(spec);
      if (gen_format == "xor") {
        if (!inst.xor_form) throw Error(ErrorCode::InvalidArgument, "--format xor needs --ensemble xorsat");
        emit(g, write_xor(*inst.xor_form));
      } else {
        emit(g, write_dimacs(inst.cnf));
      }
      if (!g.out.empty()) write_manifest(app, cmd, g, {g.out}, {{"M", spec.num_constraints()}});
    } else if (cmd == solve_cmd) {
      const CnfFormula f = load_formula(solve_input);
      SolveConfig config;
      config.control = make_control(g, solve_budget);
      config.num_parallel_starts = starts;
      config.max_restarts_on_overflow = restarts;
      config.seed = g.seed;
      SolveRecord rec = solve(f, config);
      rec.instance_id = solve_input;
      if (!with_witness) rec.witness.reset();
      emit(g, record_to_json(rec) + "\n");
      if (!g.out.empty()) write_manifest(app, cmd, g, {g.out});
    } else if (cmd == batch_cmd) {
      BatchSpec batch;
      batch.ensemble.ensemble = ensemble_from_string(batch_ensemble);
      batch.ensemble.k = batch_k;
      batch.ensemble.density = batch_density;
      batch.n_values = batch_ns;
      batch.instances_per_n = batch_instances;
      batch.config.control = make_control(g, batch_budget);
      batch.config.num_parallel_starts = batch_starts;
      batch.oracle_filter = batch_filter;
      batch.decision_budget = decision_budget;
      batch.seed = g.seed;
      batch.threads = g.threads;
      std::string text;
      std::size_t solved = 0;
      for (auto& rec : run_batch(batch)) {
        if (rec.status == RunStatus::Solved) ++solved;
        if (!batch_witness) rec.witness.reset();
        text += record_to_json(rec) + "\n";
      }
      emit(g, text);
      if (!g.out.empty()) write_manifest(app, cmd, g, {g.out}, {{"solved", solved}});
    } else if (cmd == fit_cmd) {
      const auto records = load_records(fit_inputs);
      const SurvivalWindow window{p_hi, p_lo};
      json result;
      std::string csv;
      auto group_by_n = [&] {
        std::map<std::size_t, std::vector<SolveRecord>> by_n;
        for (const auto& r : records) by_n[r.N].push_back(r);
        return by_n;
      };
      if (fit_mode == "exp" && per_instance) {
        std::map<std::string, std::vector<SolveRecord>> by_id;
        for (const auto& r : records) by_id[r.instance_id].push_back(r);
        result = json::array();
        csv = "instance_id,r,kappa,r_squared,samples\n";
        for (const auto& [id, recs] : by_id) {
          const ScalingFit fit = fit_exponential_decay(solve_times(recs), window);
          const auto& m = std::get<ExpDecay>(fit.model);
          json one = fit_object(fit);
          one["instance_id"] = id;
          result.push_back(one);
          std::ostringstream row;
          row.precision(17);
          row << id << ',' << m.r << ',' << m.lambda << ',' << fit.r_squared << ',' << fit.samples << '\n';
          csv += row.str();
        }
      } else if (fit_mode == "exp" || fit_mode == "steppow") {
        const ScalingFit fit = fit_mode == "exp" ? fit_exponential_decay(solve_times(records), window)
                                                 : fit_step_powerlaw(solve_steps(records), window);
        result = fit_object(fit);
        csv = fit_csv(fit);
      } else {
        const bool rate = fit_mode == "rate";
        std::vector<std::pair<double, double>> pairs;
        json per_n = json::array();
        for (const auto& [n, recs] : group_by_n()) {
          const ScalingFit fit = rate ? fit_exponential_decay(solve_times(recs), window)
                                      : fit_step_powerlaw(solve_steps(recs), window);
          const double value = rate ? std::get<ExpDecay>(fit.model).lambda : std::get<StepPowerLaw>(fit.model).eta;
          pairs.emplace_back(static_cast<double>(n), value);
          json one = fit_object(fit);
          one["N"] = n;
          per_n.push_back(one);
        }
        const ScalingFit law = rate ? fit_rate_scaling(pairs) : fit_eta_scaling(pairs);
        result = fit_object(law);
        result["per_n"] = per_n;
        csv = fit_csv(law);
      }
      if (g.out.empty()) {
        std::cout << result.dump(2) << "\n";
      } else {
        write_text_file(g.out + ".json", result.dump(2) + "\n");
        write_text_file(g.out + ".csv", csv);
        write_manifest(app, cmd, g, {g.out + ".json", g.out + ".csv"});
      }
    } else if (cmd == basin_cmd) {
      const CnfFormula f = load_formula(basin_input);
      if (g.out.empty()) g.out = "basin";
      const PlaneSpec plane = make_plane(basin_plane, g);
      const LabelBy by = label_by == "cluster"          ? LabelBy::Cluster
                         : label_by == "approx-cluster" ? LabelBy::ApproximateCluster
                                                        : LabelBy::Solution;
      const BasinMap map = basin_map(f, plane, make_control(g, basin_budget), by, g.threads, {}, max_enum_vars);
      write_text_file(g.out + ".labels.csv", label_csv(map));
      write_text_file(g.out + ".labels.ppm", label_ppm(map));
      write_text_file(g.out + ".times.csv", time_csv(map));
      write_text_file(g.out + ".times.ppm", time_ppm(map));
      json summary;
      summary["labels"] = map.representatives.size();
      summary["unresolved"] = map.unresolved_count();
      summary["approximate_clusters"] = map.approximate;
      try {
        const DimensionEstimate d = boundary_dimension(map);
        summary["boundary_dimension"] = d.dimension ? json(*d.dimension) : json(nullptr);
      } catch (const Error&) {
        summary["boundary_dimension"] = nullptr;
      }
      write_manifest(app, cmd, g,
                     {g.out + ".labels.csv", g.out + ".labels.ppm", g.out + ".times.csv", g.out + ".times.ppm"},
                     summary);
    } else if (cmd == fsle_cmd) {
      const CnfFormula f = load_formula(fsle_input);
      if (g.out.empty()) g.out = "fsle";
      fsle_params.direction_seed = direction_seed.value_or(g.seed);
      const FsleMap map = fsle_map(f, make_plane(fsle_plane, g), fsle_params, make_control(g, fsle_budget), g.threads);
      write_text_file(g.out + ".phi.csv", phi_csv(map));
      write_text_file(g.out + ".phi.ppm", phi_ppm(map));
      write_manifest(app, cmd, g, {g.out + ".phi.csv", g.out + ".phi.ppm"}, {{"mean_phi", map.mean()}});
    } else if (cmd == core_cmd) {
      g_input = core_input;
      const std::string text = read_text_file(core_input);
      const bool is_xor = text.find("p xor") != std::string::npos;
      const CoreReport core = is_xor ? leaf_removal_core(parse_xor(text)) : pure_literal_core(parse_dimacs(text));
      g_input.clear();
      emit(g, format_core(core));
      if (!g.out.empty()) write_manifest(app, cmd, g, {g.out});
    } else if (cmd == traj_cmd) {
      const CnfFormula f = load_formula(traj_input);
      StepControl control = make_control(g, traj_budget);
      control.max_trace_points = max_points;
      for (auto v : traj_vars) {
        if (v == 0 || v > f.num_vars()) throw Error(ErrorCode::IndexOutOfRange, "--vars entries are 1-based, <= N");
        control.trace_vars.push_back(v - 1);
      }
      for (auto c : traj_clauses) {
        if (c == 0 || c > f.num_clauses()) throw Error(ErrorCode::IndexOutOfRange, "--clauses entries are 1-based, <= M");
        control.trace_clauses.push_back(c - 1);
      }
      // Same initial point as the first start of `solve --seed`.
      Rng rng = Rng::substream(g.seed, 0);
      ContinuousState s0;
      s0.s.resize(f.num_vars());
      for (double& x : s0.s) x = rng.uniform_open(-1.0, 1.0);
      s0.log_a.assign(f.num_clauses(), 0.0);
      const RunOutcome run = integrate(f, s0, control, true);
      const TimeSeries ts = trajectory_diagnostics(run.trace);
      emit(g, diagnostics_csv(ts, control.trace_vars, control.trace_clauses));
      json summary;
      summary["status"] = to_string(run.status);
      summary["t_final"] = run.t_final;
      summary["n_step"] = run.n_step;
      summary["length_L"] = run.length_L;
      summary["final_E"] = ts.final_E;
      summary["speed_increment_excess_kurtosis"] = ts.speed_increment_excess_kurtosis;
      if (g.out.empty()) {
        std::cerr << summary.dump() << "\n";
      } else {
        write_manifest(app, cmd, g, {g.out}, summary);
      }
    }
  } catch (const Error& e) {
    std::cerr << "ctds " << cmd->get_name() << ": " << (g_input.empty() ? "" : g_input + ": ") << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ctds " << cmd->get_name() << ": " << (g_input.empty() ? "" : g_input + ": ") << e.what() << "\n";
    return 2;
  }
  return 0;
}
