// stgcs: command-line front end for the space-time GCS multi-robot planner.
//
// Subcommands:
//   plan      solve one instance file and write the solution JSON
//   gen       sample random instance files for a catalog map
//   bench     run a (maps x robot-counts x methods) matrix, emit CSV metrics
//   validate  re-check a solution file against its instance
//   emit-svg  render a planar solution to SVG
//
// Exit codes: 0 success, 2 planning failure / failed validation, 3 invalid
// input (bad flags, malformed files, schema violations).

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "stgcs/stgcs.hpp"

namespace {

using namespace stgcs;

constexpr int kExitSuccess = 0;
constexpr int kExitPlanningFailure = 2;
constexpr int kExitInvalidInput = 3;

struct PlanArgs {
  std::string instance_path;
  std::string out_path;
  std::string method = "pbs";
  std::string solver = "heuristic";
  std::uint64_t seed = 0;
  bool seed_set = false;
  double budget_s = 150.0;
  double eps = 1e-3;
  int path_budget = 0;  // <= 0: auto = ceil(1e3 * ln|E|)
};

struct GenArgs {
  std::string map;
  int n = 1;
  int count = 12;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

struct BenchArgs {
  std::vector<std::string> maps{"empty"};
  std::vector<int> robots{1, 2, 3, 4};
  std::vector<std::string> methods{"sp", "rp", "pbs"};
  int instances = 12;
  std::uint64_t seed = 0;
  double budget_s = 150.0;
  std::string out_path;
  std::string summary_path;
};

struct FileArgs {
  std::string instance_path;
  std::string solution_path;
  std::string out_path;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << text;
}

int run_plan(const PlanArgs& args) {
  MrmpInstance inst = load_instance(args.instance_path);
  inst.time_budget_s = args.budget_s;
  inst.solve_params.epsilon = args.eps;
  inst.solve_params.path_budget = args.path_budget;
  inst.solve_params.mode =
      args.solver == "exhaustive" ? SolveMode::kExhaustive : SolveMode::kHeuristic;
  if (args.seed_set) inst.solve_params.rng_seed = args.seed;

  MrmpResult res;
  if (args.method == "sp")
    res = sp(inst);
  else if (args.method == "rp")
    res = rp(inst);
  else
    res = pbs(inst);

  if (!res.ok()) {
    std::fprintf(stderr, "planning failed: %s\n", res.failure.c_str());
    return kExitPlanningFailure;
  }

  const Json j = solution_to_json(*res.solution);
  if (args.out_path.empty())
    std::fputs((j.dump(2) + "\n").c_str(), stdout);
  else
    write_json_file(args.out_path, j);
  std::fprintf(stderr,
               "planned %zu robots with %s: soc %.6g, makespan %.6g, %.3f s\n",
               res.solution->trajectories.size(), args.method.c_str(),
               res.solution->metrics.soc, res.solution->metrics.makespan,
               res.solution->metrics.runtime_s);
  return kExitSuccess;
}

int run_gen(const GenArgs& args) {
  const std::vector<InstanceFile> files =
      gen_instances(args.map, args.n, args.count, args.seed);
  for (std::size_t i = 0; i < files.size(); ++i) {
    char name[128];
    std::snprintf(name, sizeof name, "%s/%s_n%d_%02zu.json", args.out_dir.c_str(),
                  args.map.c_str(), args.n, i);
    save_instance(files[i], name);
    std::fprintf(stdout, "%s\n", name);
  }
  return kExitSuccess;
}

int run_bench(const BenchArgs& args) {
  BenchMatrix matrix;
  matrix.maps = args.maps;
  matrix.robot_counts = args.robots;
  matrix.methods = args.methods;
  matrix.instances = args.instances;
  matrix.seed = args.seed;
  matrix.budget_s = args.budget_s;

  const std::vector<BenchRow> rows = run_bench(matrix);
  const std::string csv = bench_csv(rows);
  if (args.out_path.empty())
    std::fputs(csv.c_str(), stdout);
  else
    write_text(args.out_path, csv);
  if (!args.summary_path.empty())
    write_text(args.summary_path, summary_csv(summarize_bench(rows)));
  return kExitSuccess;
}

int run_validate(const FileArgs& args) {
  const MrmpInstance inst = load_instance(args.instance_path);
  const Solution sol = solution_from_json(read_json_file(args.solution_path));
  const ValidationReport rep = validate(sol, inst);
  if (rep.ok()) {
    std::fprintf(stdout, "valid: %zu trajectories pass all checks\n",
                 sol.trajectories.size());
    return kExitSuccess;
  }
  for (const Violation& v : rep.violations) {
    std::fprintf(stdout, "violation: %s robots (%d,%d) t=%.6g %s\n",
                 v.kind.c_str(), v.robot_a, v.robot_b, v.time, v.detail.c_str());
  }
  return kExitPlanningFailure;
}

int run_emit_svg(const FileArgs& args) {
  const InstanceFile inst =
      instance_from_json(read_json_file(args.instance_path));
  const Solution sol = solution_from_json(read_json_file(args.solution_path));
  emit_svg(sol, inst, args.out_path);
  std::fprintf(stderr, "wrote %s\n", args.out_path.c_str());
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot motion planning over space-time graphs of convex sets"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  CLI::App* plan_cmd = app.add_subcommand("plan", "Solve one instance file");
  plan_cmd->add_option("--instance", plan_args.instance_path, "Instance JSON file")
      ->required();
  plan_cmd->add_option("--out", plan_args.out_path,
                       "Solution JSON output path (default: stdout)");
  plan_cmd->add_option("--method", plan_args.method, "Planner")
      ->check(CLI::IsMember({"sp", "rp", "pbs"}))
      ->capture_default_str();
  plan_cmd->add_option("--solver", plan_args.solver, "Single-robot path search mode")
      ->check(CLI::IsMember({"heuristic", "exhaustive"}))
      ->capture_default_str();
  plan_cmd
      ->add_option("--seed", plan_args.seed,
                   "Override the instance's RNG seed")
      ->each([&plan_args](const std::string&) { plan_args.seed_set = true; });
  plan_cmd->add_option("--budget-s", plan_args.budget_s, "Wall-clock budget, seconds")
      ->capture_default_str();
  plan_cmd->add_option("--eps", plan_args.eps, "Minimum per-set dwell time")
      ->capture_default_str();
  plan_cmd->add_option("--path-budget", plan_args.path_budget,
                       "Rounding path budget (<= 0: auto = ceil(1e3 ln|E|))");

  GenArgs gen_args;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate random instance files");
  gen_cmd->add_option("--map", gen_args.map, "Catalog map name")->required();
  gen_cmd->add_option("--n", gen_args.n, "Robots per instance")->required();
  gen_cmd->add_option("--count", gen_args.count, "Number of instances")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen_args.seed, "Family seed")->capture_default_str();
  gen_cmd->add_option("--out-dir", gen_args.out_dir, "Output directory")
      ->capture_default_str();

  BenchArgs bench_args;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Run a benchmark matrix and emit CSV metrics");
  bench_cmd->add_option("--maps", bench_args.maps, "Catalog map names")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--robots", bench_args.robots, "Robot counts")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--methods", bench_args.methods, "Planners to compare")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--instances", bench_args.instances, "Instances per cell")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_args.seed, "Family seed")
      ->capture_default_str();
  bench_cmd->add_option("--budget-s", bench_args.budget_s,
                        "Per-solve wall-clock budget, seconds")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_args.out_path,
                        "CSV output path (default: stdout)");
  bench_cmd->add_option("--summary", bench_args.summary_path,
                        "Also write per-(map,n,method) summary CSV here");

  FileArgs validate_args;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Re-check a solution against its instance");
  validate_cmd->add_option("--instance", validate_args.instance_path, "Instance JSON")
      ->required();
  validate_cmd->add_option("--solution", validate_args.solution_path, "Solution JSON")
      ->required();

  FileArgs svg_args;
  CLI::App* svg_cmd = app.add_subcommand("emit-svg", "Render a 2D solution to SVG");
  svg_cmd->add_option("--instance", svg_args.instance_path, "Instance JSON")
      ->required();
  svg_cmd->add_option("--solution", svg_args.solution_path, "Solution JSON")
      ->required();
  svg_cmd->add_option("--out", svg_args.out_path, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitInvalidInput;
  }

  try {
    if (plan_cmd->parsed()) return run_plan(plan_args);
    if (gen_cmd->parsed()) return run_gen(gen_args);
    if (bench_cmd->parsed()) return run_bench(bench_args);
    if (validate_cmd->parsed()) return run_validate(validate_args);
    if (svg_cmd->parsed()) return run_emit_svg(svg_args);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPlanningFailure;
  }
  return kExitSuccess;
}
