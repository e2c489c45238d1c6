// Command-line front end: instance generation, single solves, evaluation of
// a given solution, the full experiment protocol, ablations and the AMC
// speed probe. Failures print one JSON line {"error": kind, "message": ...}
// on stderr and exit nonzero.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ddcc/baselines.hpp"
#include "ddcc/error.hpp"
#include "ddcc/generator.hpp"
#include "ddcc/harness.hpp"
#include "ddcc/search.hpp"
#include "json.hpp"

using json = nlohmann::json;
using namespace ddcc;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string evaluator = "auto";
  std::uint64_t mc_draws = kDefaultMonteCarloDraws;
  std::uint64_t rcl_draws = kDefaultRclDraws;
  double lambda = 1.0;
  std::size_t max_iter = 30;
  std::string sfe = "o";
  std::size_t reps = 10;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master random seed");
  cmd->add_option("--evaluator", c.evaluator, "auto, exact, mc, amc, gauss or brute")
      ->check(CLI::IsMember({"auto", "exact", "mc", "amc", "gauss", "brute"}));
  cmd->add_option("--mc-draws", c.mc_draws, "Monte Carlo draws per evaluation");
  cmd->add_option("--rcl-draws", c.rcl_draws, "Truth-model draws for real confidence");
  cmd->add_option("--lambda", c.lambda, "Surrogate weight factor");
  cmd->add_option("--max-iter", c.max_iter, "Search iterations");
  cmd->add_option("--sfe", c.sfe, "Output filter: o, v1, v2 or v3")
      ->check(CLI::IsMember({"o", "v1", "v2", "v3"}));
  cmd->add_option("--reps", c.reps, "Repetitions");
  cmd->add_option("--out", c.out, "Output path");
}

std::optional<EvaluatorKind> evaluator_override(const Common& c) {
  if (c.evaluator == "auto") return std::nullopt;
  return parse_evaluator_kind(c.evaluator);
}

EvaluatorConfig evaluator_config(const Instance& inst, const Common& c) {
  EvaluatorConfig ec;
  ec.kind = evaluator_override(c).value_or(evaluator_selection(inst));
  ec.mc_draws = c.mc_draws;
  ec.seed = derive_seed(c.seed, 1);
  return ec;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

struct Source {
  std::string instance;
  std::string truth;
  std::string preset;
  std::uint64_t instance_seed = 1;
};

void add_source(CLI::App* cmd, Source& s) {
  cmd->add_option("--instance", s.instance, "Instance file");
  cmd->add_option("--truth", s.truth, "Truth file (for real confidence)");
  cmd->add_option("--preset", s.preset, "Generate a preset benchmark instead, e.g. LAB-ss1-11");
  cmd->add_option("--instance-seed", s.instance_seed, "Generator seed used with --preset");
}

struct Loaded {
  std::string name;
  std::optional<Instance> instance;
  std::optional<TruthModel> truth;
};

Loaded load_source(const Source& s) {
  Loaded l;
  if (!s.preset.empty()) {
    GeneratedBenchmark g = generate(find_preset(s.preset), s.instance_seed);
    if (g.capacity_clamped) {
      std::cerr << "note: capacity " << g.requested_capacity << " clamped to "
                << g.instance.capacity() << "\n";
    }
    l.name = s.preset;
    l.instance = std::move(g.instance);
    l.truth = std::move(g.truth);
    return l;
  }
  if (s.instance.empty()) throw Error(ErrorKind::Config, "give --instance or --preset");
  l.name = s.instance;
  l.instance = load_instance_file(s.instance);
  if (!s.truth.empty()) l.truth = load_truth_file(s.truth);
  return l;
}

json outcome_json(const EvalOutcome& o) {
  json j = {{"verdict", o.feasible() ? "feasible" : "infeasible"},
            {"method", to_string(o.method)},
            {"screened", o.screened},
            {"heap_pops", o.work.heap_pops},
            {"draws", o.work.draws}};
  j["estimated_confidence"] =
      o.estimated_confidence ? json(*o.estimated_confidence) : json(nullptr);
  return j;
}

int cmd_gen(const Source& src, const std::string& family, std::size_t m, std::size_t n,
            std::size_t L, double W, double p0, const Common& c) {
  BenchmarkSpec spec;
  if (!src.preset.empty()) {
    spec = find_preset(src.preset);
  } else {
    spec.family = parse_benchmark_family(family);
    spec.m = m;
    spec.n = n;
    spec.L = L;
    spec.capacity = W;
  }
  spec.confidence_level = p0;
  GeneratedBenchmark g = generate(spec, c.seed);
  if (g.capacity_clamped) {
    std::cerr << "note: capacity " << g.requested_capacity << " clamped to "
              << g.instance.capacity() << "\n";
  }
  const std::string prefix = c.out.empty() ? (spec.name.empty() ? "instance" : spec.name) : c.out;
  save_instance_file(g.instance, prefix + ".instance.json");
  save_truth_file(g.truth, prefix + ".truth.json");
  std::cout << json({{"instance", prefix + ".instance.json"},
                     {"truth", prefix + ".truth.json"},
                     {"W", g.instance.capacity()},
                     {"clamped", g.capacity_clamped}})
                   .dump()
            << "\n";
  return 0;
}

int cmd_solve(const Source& src, const std::string& algorithm, std::uint64_t budget,
              const Common& c) {
  Loaded l = load_source(src);
  const Instance& inst = *l.instance;
  const EvaluatorConfig ec = evaluator_config(inst, c);
  Evaluator ev(inst, ec);
  const Algorithm alg = parse_algorithm(algorithm);
  ArchiveEntry out;
  bool feasible = false;
  std::uint64_t evals = 0;
  json extra = json::object();

  DdalsParams p;
  p.lambda = c.lambda;
  p.max_iter = c.max_iter;
  p.sfe = parse_sfe_variant(c.sfe);
  p.evaluator = ec;
  p.seed = derive_seed(c.seed, 2);
  switch (alg) {
    case Algorithm::Ddals:
    case Algorithm::Gaussian: {
      if (alg == Algorithm::Gaussian) p.evaluator.kind = EvaluatorKind::Gaussian;
      Evaluator run_ev(inst, p.evaluator);
      const DdalsResult r = ddals_with(inst, p, run_ev);
      out = r.output;
      feasible = r.feasible;
      evals = r.eval_count;
      extra["best_cost_history"] = r.best_cost_history;
      json shortlist = json::array();
      for (const auto& e : r.shortlist) {
        shortlist.push_back({{"picks", e.solution.picks}, {"cost", e.cost},
                             {"confidence", e.confidence}});
      }
      if (!shortlist.empty()) extra["shortlist"] = shortlist;
      break;
    }
    case Algorithm::Greedy: {
      const BaselineResult b = greedy(inst, c.lambda, ev);
      out = b.output;
      feasible = b.feasible;
      evals = b.eval_count;
      break;
    }
    case Algorithm::Ga: {
      GaParams gp;
      gp.budget = budget;
      gp.seed = derive_seed(c.seed, 3);
      gp.lambda = c.lambda;
      const BaselineResult b = genetic_algorithm(inst, gp, ev);
      out = b.output;
      feasible = b.feasible;
      evals = b.eval_count;
      break;
    }
    case Algorithm::Eda: {
      EdaParams ep;
      ep.budget = budget;
      ep.seed = derive_seed(c.seed, 4);
      ep.lambda = c.lambda;
      const BaselineResult b = eda(inst, ep, ev);
      out = b.output;
      feasible = b.feasible;
      evals = b.eval_count;
      break;
    }
  }
  json j = {{"picks", out.solution.picks},
            {"cost", out.cost},
            {"feasible", feasible},
            {"ET", evals},
            {"ECL", feasible ? out.confidence : ev.backfill_confidence(out.solution)},
            {"evaluator", to_string(ec.kind)}};
  if (l.truth) {
    j["RCL"] = real_confidence(*l.truth, out.solution, c.rcl_draws,
                               solution_seed(c.seed, out.solution));
  }
  for (auto& [k, v] : extra.items()) j[k] = v;
  if (!c.out.empty()) write_text_file(c.out, serialize_solution(out.solution));
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_eval(const Source& src, const std::string& solution_path, const Common& c) {
  Loaded l = load_source(src);
  const Instance& inst = *l.instance;
  const Solution sol = load_solution_file(solution_path);
  if (auto err = validate_solution(inst, sol)) {
    throw Error(ErrorKind::OutOfRange, err->message);
  }
  const EvaluatorConfig ec = evaluator_config(inst, c);
  Evaluator ev(inst, ec);
  const EvalOutcome o = ev.evaluate(sol);
  json j = outcome_json(o);
  j["cost"] = total_cost(inst, sol);
  if (l.truth) {
    j["RCL"] = real_confidence(*l.truth, sol, c.rcl_draws, solution_seed(c.seed, sol));
  }
  std::cout << j.dump() << "\n";
  return 0;
}

RunConfig run_config(const Common& c, unsigned jobs) {
  RunConfig rc;
  rc.repetitions = c.reps;
  rc.master_seed = c.seed;
  rc.evaluator = evaluator_override(c);
  rc.mc_draws = c.mc_draws;
  rc.rcl_draws = c.rcl_draws;
  rc.lambda = c.lambda;
  rc.max_iter = c.max_iter;
  rc.jobs = jobs;
  return rc;
}

int cmd_experiment(const Source& src, const std::vector<std::string>& algorithms,
                   unsigned jobs, const Common& c) {
  Loaded l = load_source(src);
  RunConfig rc = run_config(c, jobs);
  rc.benchmark = l.name;
  if (!algorithms.empty()) {
    rc.algorithms.clear();
    for (const auto& a : algorithms) rc.algorithms.push_back(parse_algorithm(a));
  }
  const ExperimentReport report =
      run_experiment(*l.instance, l.truth ? &*l.truth : nullptr, rc);
  emit(report_csv(report), c.out);
  return 0;
}

int cmd_ablate(const std::vector<std::string>& presets, const std::vector<std::string>& files,
               std::uint64_t instance_seed, unsigned jobs, const Common& c) {
  std::vector<Loaded> loaded;
  for (const auto& p : presets) {
    Source s;
    s.preset = p;
    s.instance_seed = instance_seed;
    loaded.push_back(load_source(s));
  }
  for (const auto& f : files) {
    Source s;
    s.instance = f;
    loaded.push_back(load_source(s));
  }
  if (loaded.empty()) throw Error(ErrorKind::Config, "give --preset or --instance");
  std::vector<AblationBenchmark> benches;
  for (const auto& l : loaded) benches.push_back({l.name, &*l.instance});
  emit(ablation_csv(run_ablation(benches, run_config(c, jobs))), c.out);
  return 0;
}

int cmd_probe(const Source& src, std::size_t n, const Common& c) {
  Loaded l = load_source(src);
  emit(probe_csv(amc_speed_probe(*l.instance, n, c.seed, c.mc_draws)), c.out);
  return 0;
}

void fail(const std::string& kind, const std::string& message) {
  std::cerr << json({{"error", kind}, {"message", message}}).dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven chance-constrained multiple-choice knapsack toolkit"};
  app.require_subcommand(1);

  Common common;
  Source source;

  auto* gen = app.add_subcommand("gen", "Generate an instance and its truth file");
  std::string family = "LAB";
  std::size_t gm = 3, gn = 5, gl = 30;
  double gw = 11.0, gp0 = 0.99;
  add_common(gen, common);
  gen->add_option("--preset", source.preset, "Preset name, e.g. APP-ls1-32");
  gen->add_option("--family", family, "LAB or APP (custom sizes)");
  gen->add_option("--m", gm, "Classes");
  gen->add_option("--n", gn, "Items per class");
  gen->add_option("--L", gl, "Samples per item");
  gen->add_option("--W", gw, "Capacity");
  gen->add_option("--p0", gp0, "Confidence level");

  auto* solve = app.add_subcommand("solve", "Run one algorithm on one instance");
  std::string algorithm = "ddals";
  std::uint64_t budget = 1000;
  add_common(solve, common);
  add_source(solve, source);
  solve->add_option("--algorithm", algorithm, "ddals, greedy, ga, eda or gauss");
  solve->add_option("--budget", budget, "Evaluation budget for ga and eda");

  auto* eval = app.add_subcommand("eval", "Evaluate a solution file");
  std::string solution_path;
  add_common(eval, common);
  add_source(eval, source);
  eval->add_option("--solution", solution_path, "Solution file {\"picks\": [...]}")->required();

  auto* experiment = app.add_subcommand("experiment", "Full comparison protocol to CSV");
  std::vector<std::string> algorithms;
  unsigned jobs = 1;
  add_common(experiment, common);
  add_source(experiment, source);
  experiment->add_option("--algorithms", algorithms, "Subset of ddals greedy ga eda gauss");
  experiment->add_option("--jobs", jobs, "Repetitions run concurrently");

  auto* ablate = app.add_subcommand("ablate", "Component ablation (PDR table) to CSV");
  std::vector<std::string> ab_presets, ab_files;
  std::uint64_t ab_seed = 1;
  add_common(ablate, common);
  ablate->add_option("--preset", ab_presets, "Preset benchmarks");
  ablate->add_option("--instance", ab_files, "Instance files");
  ablate->add_option("--instance-seed", ab_seed, "Generator seed used with --preset");
  ablate->add_option("--jobs", jobs, "Repetitions run concurrently");

  auto* probe = app.add_subcommand("probe-amc", "Plain vs accelerated Monte Carlo timing");
  std::size_t n_solutions = 10000;
  add_common(probe, common);
  add_source(probe, source);
  probe->add_option("--n", n_solutions, "Random solutions to evaluate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("usage", e.what());
    return 64;
  }

  try {
    if (*gen) return cmd_gen(source, family, gm, gn, gl, gw, gp0, common);
    if (*solve) return cmd_solve(source, algorithm, budget, common);
    if (*eval) return cmd_eval(source, solution_path, common);
    if (*experiment) return cmd_experiment(source, algorithms, jobs, common);
    if (*ablate) return cmd_ablate(ab_presets, ab_files, ab_seed, jobs, common);
    if (*probe) return cmd_probe(source, n_solutions, common);
  } catch (const Error& e) {
    fail(to_string(e.kind()), e.what());
    return 2;
  } catch (const std::exception& e) {
    fail("internal", e.what());
    return 3;
  }
  return 0;
}
