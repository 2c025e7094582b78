// presto: predictable reflected stopping on finite two-phase filtration
// trees. Batch front door: model ingestion, solver runs, verification,
// oracle comparison and seeded sweeps.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "presto/instance.hpp"
#include "presto/io.hpp"
#include "presto/oracle.hpp"
#include "presto/snell.hpp"
#include "presto/stopping.hpp"

namespace fs = std::filesystem;
using namespace presto;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitMismatch = 3;

struct KvList {
  std::map<std::string, std::string> entries;

  bool has(const std::string& key) const { return entries.count(key) > 0; }
  std::string str(const std::string& key, const std::string& fallback = "") const {
    auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second;
  }
  double num(const std::string& key, double fallback) const {
    auto it = entries.find(key);
    return it == entries.end() ? fallback : std::stod(it->second);
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    auto it = entries.find(key);
    return it == entries.end() ? fallback : std::stoll(it->second);
  }
};

KvList parse_kv(const std::string& text, std::initializer_list<const char*> known = {}) {
  KvList out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      out.entries[item] = "1";
    else
      out.entries[item.substr(0, eq)] = item.substr(eq + 1);
  }
  if (known.size() > 0) {
    for (const auto& [key, value] : out.entries) {
      bool ok = false;
      for (const char* k : known) ok = ok || key == k;
      if (!ok) throw Error(ErrorCode::BadArgument, "unknown key '" + key + "' in '" + text + "'");
    }
  }
  return out;
}

std::uint64_t env_seed_override(std::uint64_t seed) {
  if (const char* env = std::getenv("PRESTO_SEED")) return std::stoull(env);
  return seed;
}

Driver driver_from_spec(const std::string& spec) {
  KvList kv = parse_kv(spec);
  const std::string name = kv.str("name", "zero");
  std::map<std::string, double> params;
  for (const auto& [key, value] : kv.entries)
    if (key != "name") params[key] = std::stod(value);
  return make_driver(name, params);
}

struct Problem {
  FiltrationTree tree;
  LadlagProcess obstacle;
  std::optional<Driver> driver;  // embedded in the model file, if any
};

LadlagProcess obstacle_from_spec(const FiltrationTree& tree, const std::string& spec) {
  KvList kv = parse_kv(spec, {"seed", "lusc", "nonneg", "dominated", "const"});
  if (kv.has("const")) return LadlagProcess::constant(tree, kv.num("const", 0.0));
  InstanceOptions opt;
  opt.lusc_obstacle = kv.has("lusc");
  opt.nonneg_obstacle = kv.has("nonneg");
  opt.right_dominated = kv.has("dominated");
  Rng rng(env_seed_override(static_cast<std::uint64_t>(kv.integer("seed", 1))));
  return random_obstacle(rng, tree, opt);
}

Problem resolve_problem(const std::string& model_path, const std::string& generate_spec,
                        const std::string& obstacle_spec) {
  if (!model_path.empty()) {
    Model model = load_model(model_path);
    if (!obstacle_spec.empty())
      return Problem{std::move(model.tree), obstacle_from_spec(model.tree, obstacle_spec),
                     std::move(model.driver)};
    if (model.obstacle)
      return Problem{std::move(model.tree), std::move(*model.obstacle), std::move(model.driver)};
    throw Error(ErrorCode::BadArgument, "model has no obstacle; pass --obstacle");
  }
  if (generate_spec.empty())
    throw Error(ErrorCode::BadArgument, "pass --model FILE or --generate seed=...,stages=...");
  KvList kv = parse_kv(generate_spec,
                       {"seed", "stages", "wbranches", "marks", "dt", "lusc", "nonneg", "dominated"});
  InstanceOptions opt;
  opt.max_stages = static_cast<int>(kv.integer("stages", 3));
  opt.max_w_branches = static_cast<int>(kv.integer("wbranches", 2));
  opt.max_marks = static_cast<int>(kv.integer("marks", 2));
  opt.dt_min = opt.dt_max = kv.num("dt", 0.5);
  opt.lusc_obstacle = kv.has("lusc");
  opt.nonneg_obstacle = kv.has("nonneg");
  opt.right_dominated = kv.has("dominated");
  opt.single_mark = kv.integer("marks", 2) == 1;
  const std::uint64_t seed = env_seed_override(static_cast<std::uint64_t>(kv.integer("seed", 1)));
  Rng rng(seed);
  const int stages = opt.max_stages;  // --generate pins the stage count
  FiltrationTree tree =
      build_random_tree(rng.bits(), stages, opt.max_w_branches, opt.max_marks, kv.num("dt", 0.5));
  LadlagProcess xi = obstacle_spec.empty() ? random_obstacle(rng, tree, opt)
                                           : obstacle_from_spec(tree, obstacle_spec);
  return Problem{std::move(tree), std::move(xi), std::nullopt};
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::BadArgument, "cannot create output directory " + out);
}

int run_solve(const Problem& problem, const Driver& driver, const std::string& out) {
  ensure_out_dir(out);
  RbsdeSolution sol = solve_rbsde(problem.tree, driver, problem.obstacle);
  std::ostringstream csv;
  write_solution_csv(csv, problem.tree, sol);
  write_file_atomic((fs::path(out) / "solution.csv").string(), csv.str());
  write_file_atomic((fs::path(out) / "summary.json").string(),
                    solution_summary(problem.tree, sol).dump(2) + "\n");
  std::cout << "Y0 = " << sol.y.value[0][0] << "\n";
  return kExitOk;
}

int run_stop(const Problem& problem, const Driver& driver, const std::string& rule, int stage,
             double alpha, InstantMode mode, const std::string& out) {
  ensure_out_dir(out);
  RbsdeSolution sol = solve_rbsde(problem.tree, driver, problem.obstacle);
  ExtendedStoppingTime tau;
  if (rule == "tau_tilde")
    tau = tau_tilde(problem.tree, sol, stage, mode);
  else if (rule == "tau_alpha")
    tau = tau_alpha(problem.tree, driver, sol, stage, alpha);
  else if (rule == "theta_alpha")
    tau = theta_alpha(problem.tree, sol, stage, alpha);
  else
    throw Error(ErrorCode::BadArgument,
                "unknown rule '" + rule + "' (tau_tilde | tau_alpha | theta_alpha)");
  StoppingDiagnostics diag = optimality_report(problem.tree, driver, sol, stage, tau);
  write_file_atomic((fs::path(out) / "stopping_time.json").string(),
                    stopping_time_to_json(tau).dump(2) + "\n");
  write_file_atomic((fs::path(out) / "diagnostics.json").string(),
                    diagnostics_to_json(stage, diag).dump(2) + "\n");
  std::cout << "rule " << rule << ": criterion (a) " << (diag.crit_a ? "holds" : "fails")
            << "\n";
  return kExitOk;
}

int run_verify(const Problem& problem, const Driver& driver, const std::string& out) {
  ensure_out_dir(out);
  ValidationReport tree_report = validate_tree(problem.tree);
  RbsdeSolution sol = solve_rbsde(problem.tree, driver, problem.obstacle);
  SkorokhodReport report = verify_rbsde(problem.tree, driver, sol);
  Json j = skorokhod_report_to_json(report);
  j["tree"] = validation_report_to_json(tree_report);
  write_file_atomic((fs::path(out) / "report.json").string(), j.dump(2) + "\n");
  const bool ok = report.empty() && tree_report.empty();
  std::cout << (ok ? "verification clean" : "violations found") << "\n";
  return ok ? kExitOk : kExitMismatch;
}

int run_oracle_compare(const std::string& model_path, const std::string& driver_spec,
                       std::uint64_t seed, int count, int stages, double tol,
                       std::int64_t budget, const std::string& out) {
  ensure_out_dir(out);
  std::ostringstream csv;
  csv << "seed,atom,solver,oracle,gap,status\n";
  char line[256];
  double max_gap = 0.0;
  int compared = 0;

  auto compare_one = [&](std::uint64_t instance_seed, const FiltrationTree& tree,
                         const LadlagProcess& obstacle, const Driver& driver) {
    if (count_stopping_times(tree, 0, InstantMode::Doubled) > budget) {
      csv << instance_seed << ",,,,," << "skipped_budget\n";
      return;
    }
    Array solver = value_function(tree, driver, obstacle, 0);
    BruteForceResult oracle =
        brute_force_value(tree, driver, obstacle, 0, {budget, InstantMode::Doubled});
    BruteForceResult grid =
        brute_force_value(tree, driver, obstacle, 0, {budget, InstantMode::Grid});
    ++compared;
    for (int i = 0; i < solver.size(); ++i) {
      const double gap = std::abs(solver[i] - oracle.values[i]);
      max_gap = std::max(max_gap, gap);
      if (grid.values[i] > solver[i] + 1e-12) max_gap = std::max(max_gap, 1.0);
      std::snprintf(line, sizeof(line), "%llu,%d,%.17g,%.17g,%.17g,ok\n",
                    static_cast<unsigned long long>(instance_seed), i, solver[i],
                    oracle.values[i], gap);
      csv << line;
    }
  };

  if (!model_path.empty()) {
    Problem problem = resolve_problem(model_path, "", "");
    compare_one(0, problem.tree, problem.obstacle, driver_from_spec(driver_spec));
  } else {
    InstanceOptions opt;
    opt.max_stages = stages;
    for (int i = 0; i < count; ++i) {
      Instance inst = random_instance(seed + static_cast<std::uint64_t>(i), opt);
      compare_one(seed + i, inst.tree, inst.obstacle, inst.driver);
    }
  }
  write_file_atomic((fs::path(out) / "oracle_compare.csv").string(), csv.str());
  std::cout << "compared " << compared << " instances, max gap " << max_gap << "\n";
  return max_gap <= tol ? kExitOk : kExitMismatch;
}

// One seeded instance of the sweep: the full invariant battery over the
// general population plus the regularity-conditioned subpopulations.
Json sweep_instance(std::uint64_t seed, int stages, std::int64_t budget, const std::string& out,
                    bool& ok) {
  Json entry;
  entry["seed"] = seed;

  InstanceOptions general;
  general.max_stages = stages;
  Instance inst = random_instance(seed, general);
  entry["stages"] = inst.tree.n_stages();
  entry["driver"] = inst.driver.name;

  bool instance_ok = validate_tree(inst.tree).empty();
  RbsdeSolution sol = solve_rbsde(inst.tree, inst.driver, inst.obstacle);
  SkorokhodReport report = verify_rbsde(inst.tree, inst.driver, sol);
  instance_ok = instance_ok && report.empty();
  entry["structure_ok"] = report.empty();

  PicardResult picard = solve_rbsde_picard(inst.tree, inst.driver, inst.obstacle);
  double picard_gap = 0.0;
  for (int k = 0; k <= inst.tree.n_stages(); ++k)
    picard_gap = std::max(picard_gap,
                          (picard.solution.y.value[k] - sol.y.value[k]).abs().maxCoeff());
  entry["picard_iterations"] = picard.iterations;
  entry["picard_gap"] = picard_gap;
  instance_ok = instance_ok && picard_gap <= 1e-8;

  if (count_stopping_times(inst.tree, 0, InstantMode::Doubled) <= budget) {
    BruteForceResult oracle =
        brute_force_value(inst.tree, inst.driver, inst.obstacle, 0, {budget, InstantMode::Doubled});
    const double gap = (oracle.values - sol.y.value[0]).abs().maxCoeff();
    entry["oracle_gap"] = gap;
    instance_ok = instance_ok && gap <= 1e-9;
    ExtendedStoppingTime best = tau_tilde(inst.tree, sol, 0);
    StoppingDiagnostics diag = optimality_report(inst.tree, inst.driver, sol, 0, best);
    entry["tau_tilde_optimal"] = diag.crit_a && diag.crit_b && diag.crit_c;
    instance_ok = instance_ok && diag.crit_a;
  } else {
    entry["oracle_gap"] = nullptr;
  }

  // left-regular subpopulation: no left reflections at all
  InstanceOptions lusc = general;
  lusc.lusc_obstacle = true;
  Instance regular = random_instance(seed, lusc);
  RbsdeSolution sol_lusc = solve_rbsde(regular.tree, regular.driver, regular.obstacle);
  double max_da = 0.0;
  for (const auto& layer : sol_lusc.da) max_da = std::max(max_da, layer.abs().maxCoeff());
  entry["lusc_dA"] = max_da;
  instance_ok = instance_ok && max_da == 0.0;

  // dominated zero-driver subpopulation: no right reflections
  InstanceOptions dominated = general;
  dominated.right_dominated = true;
  dominated.zero_driver = true;
  dominated.single_mark = true;
  Instance tame = random_instance(seed, dominated);
  RbsdeSolution sol_dom = solve_rbsde(tame.tree, tame.driver, tame.obstacle);
  double max_db = 0.0;
  for (const auto& layer : sol_dom.db) max_db = std::max(max_db, layer.abs().maxCoeff());
  entry["dominated_dB"] = max_db;
  instance_ok = instance_ok && max_db == 0.0;

  const std::string prefix = (fs::path(out) / ("sweep_" + std::to_string(seed))).string();
  write_file_atomic(prefix + "_model.json",
                    model_to_json(inst.tree, inst.obstacle).dump(2) + "\n");
  std::ostringstream csv;
  write_solution_csv(csv, inst.tree, sol);
  write_file_atomic(prefix + "_solution.csv", csv.str());
  write_file_atomic(prefix + "_report.json", skorokhod_report_to_json(report).dump(2) + "\n");

  entry["ok"] = instance_ok;
  ok = ok && instance_ok;
  return entry;
}

int run_sweep(std::uint64_t seed, int count, int stages, std::int64_t budget,
              const std::string& out) {
  ensure_out_dir(out);
  Json summary;
  summary["seed"] = seed;
  summary["count"] = count;
  summary["instances"] = Json::array();
  bool ok = true;
  for (int i = 0; i < count; ++i)
    summary["instances"].push_back(
        sweep_instance(seed + static_cast<std::uint64_t>(i), stages, budget, out, ok));
  summary["ok"] = ok;
  write_file_atomic((fs::path(out) / "sweep_summary.json").string(), summary.dump(2) + "\n");
  std::cout << (ok ? "sweep clean" : "sweep found violations") << "\n";
  return ok ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"predictable reflected stopping on finite two-phase filtration trees"};
  app.require_subcommand(1);

  std::string model_path, generate_spec, obstacle_spec, out_dir = ".";
  std::string driver_spec = "name=zero";
  std::string rule = "tau_tilde", mode_name = "doubled";
  int stage = 0, count = 20, stages = 3;
  double alpha = 0.5, tol = 1e-9;
  std::int64_t budget = 1000000;
  std::uint64_t seed = 1;

  auto add_common = [&](CLI::App* cmd, bool with_model) {
    if (with_model) {
      cmd->add_option("--model", model_path, "model JSON (tree, optional obstacle)");
      cmd->add_option("--generate", generate_spec,
                      "seed=...,stages=...,wbranches=...,marks=...,dt=...");
      cmd->add_option("--obstacle", obstacle_spec, "seed=...[,lusc][,nonneg] or const=...");
    }
    cmd->add_option("--driver", driver_spec, "name=...,param=value,...");
    cmd->add_option("--out", out_dir, "output directory");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve the reflected equation");
  add_common(solve, true);

  CLI::App* stop = app.add_subcommand("stop", "compute an optimal stopping rule");
  add_common(stop, true);
  stop->add_option("--rule", rule, "tau_tilde | tau_alpha | theta_alpha");
  stop->add_option("--stage", stage, "base stage S");
  stop->add_option("--alpha", alpha, "weight for tau_alpha / theta_alpha");
  stop->add_option("--mode", mode_name, "doubled | grid");

  CLI::App* verify = app.add_subcommand("verify", "solve and re-derive every identity");
  add_common(verify, true);

  CLI::App* oracle = app.add_subcommand("oracle-compare",
                                        "exhaustive maximization against the solver");
  add_common(oracle, true);
  oracle->add_option("--seed", seed, "base seed for generated instances");
  oracle->add_option("--count", count, "number of seeded instances");
  oracle->add_option("--stages", stages, "maximum stage count");
  oracle->add_option("--tol", tol, "acceptance gap");
  oracle->add_option("--budget", budget, "maximum stopping rules per instance");

  CLI::App* sweep = app.add_subcommand("sweep", "seeded batch over random instances");
  sweep->add_option("--seed", seed, "base seed");
  sweep->add_option("--count", count, "number of instances");
  sweep->add_option("--stages", stages, "maximum stage count");
  sweep->add_option("--budget", budget, "oracle budget per instance");
  sweep->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    seed = env_seed_override(seed);
    // a driver embedded in the model file applies unless the flag overrides it
    auto pick_driver = [&](const CLI::App* cmd, const Problem& problem) {
      if (problem.driver && cmd->count("--driver") == 0) return *problem.driver;
      return driver_from_spec(driver_spec);
    };
    if (solve->parsed()) {
      Problem problem = resolve_problem(model_path, generate_spec, obstacle_spec);
      return run_solve(problem, pick_driver(solve, problem), out_dir);
    }
    if (stop->parsed()) {
      Problem problem = resolve_problem(model_path, generate_spec, obstacle_spec);
      const InstantMode mode = mode_name == "grid" ? InstantMode::Grid : InstantMode::Doubled;
      return run_stop(problem, pick_driver(stop, problem), rule, stage, alpha, mode, out_dir);
    }
    if (verify->parsed()) {
      Problem problem = resolve_problem(model_path, generate_spec, obstacle_spec);
      return run_verify(problem, pick_driver(verify, problem), out_dir);
    }
    if (oracle->parsed())
      return run_oracle_compare(model_path, driver_spec, seed, count, stages, tol, budget,
                                out_dir);
    if (sweep->parsed()) return run_sweep(seed, count, stages, budget, out_dir);
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::NoContraction || e.code() == ErrorCode::NoConvergence)
      return kExitSolver;
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
