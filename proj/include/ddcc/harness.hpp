#pragma once

// Experiment protocol: repeated seeded runs of DDALS and the baselines
// under evaluation-budget parity, real-confidence measurement against the
// generating truth, aggregation, ablations and the screening speed probe.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddcc/baselines.hpp"
#include "ddcc/evaluator.hpp"
#include "ddcc/generator.hpp"
#include "ddcc/instance.hpp"
#include "ddcc/search.hpp"

namespace ddcc {

inline constexpr double kDefaultExactWorkCap = 1e6;
inline constexpr std::uint64_t kDefaultRclDraws = 10'000'000;
inline constexpr double kFeasibilityMargin = 0.005;

/// Exact heap evaluation when ceil((1 - P0) L^m) <= work_cap, otherwise
/// accelerated Monte Carlo.
EvaluatorKind evaluator_selection(const Instance& instance,
                                  double work_cap = kDefaultExactWorkCap);

enum class Algorithm { Ddals, Greedy, Ga, Eda, Gaussian };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct RunConfig {
  std::string benchmark = "instance";
  std::vector<Algorithm> algorithms = {Algorithm::Ddals, Algorithm::Greedy, Algorithm::Ga,
                                       Algorithm::Eda};
  std::size_t repetitions = 10;
  std::uint64_t master_seed = 0;
  std::optional<EvaluatorKind> evaluator;  // nullopt: evaluator_selection
  double exact_work_cap = kDefaultExactWorkCap;
  std::uint64_t mc_draws = kDefaultMonteCarloDraws;
  std::uint64_t rcl_draws = kDefaultRclDraws;
  double lambda = 1.0;
  std::size_t max_iter = 30;
  unsigned jobs = 1;  // repetitions run concurrently
};

void validate_config(const RunConfig& config);

struct RunRow {
  std::string benchmark;
  std::string algorithm;
  std::string variant;  // SFE variant for DDALS, "-" otherwise
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  Solution solution;
  bool solver_feasible = false;
  double cost = 0.0;
  std::uint64_t evaluations = 0;
  double ecl = 0.0;
  std::optional<double> rcl;
  bool feasible = false;  // see counts_as_feasible
};

/// A run counts toward FSR when its real confidence is at least P0 - 0.005;
/// without a truth model the solver's own verdict is used.
bool counts_as_feasible(bool solver_feasible, std::optional<double> rcl,
                        double confidence_level);

struct AggregateRow {
  std::string benchmark;
  std::string algorithm;
  std::string variant;
  std::size_t runs = 0;
  double cost_mean = 0.0, cost_std = 0.0;
  double et_mean = 0.0, et_std = 0.0;
  double ecl_mean = 0.0, ecl_std = 0.0;
  std::optional<double> rcl_mean, rcl_std;
  double fsr = 0.0;
};

struct ExperimentReport {
  std::string benchmark;
  double confidence_level = 0.99;
  std::uint64_t rcl_draws = 0;
  EvaluatorKind evaluator = EvaluatorKind::Exact;
  std::vector<RunRow> rows;
  std::vector<AggregateRow> aggregates;
};

/// Means, population standard deviations and FSR per (algorithm, variant),
/// in order of first appearance.
std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows);

/// Per repetition: DDALS first (all four output filters from one run), then
/// each baseline with DDALS's evaluation count as its budget. RCL is
/// measured when a truth model is given.
ExperimentReport run_experiment(const Instance& instance, const TruthModel* truth,
                                const RunConfig& config);

/// CSV with columns benchmark,algorithm,variant,rep,seed,C,ET,ECL,RCL,feasible;
/// aggregate rows carry rep=agg (means, feasible = FSR) and rep=agg_std.
std::string report_csv(const ExperimentReport& report, bool with_header = true);

// ---------------------------------------------------------------------------
// Ablation

struct AblationVariant {
  std::string name;
  DdalsComponents components;
};

/// r-CP, no-LSS, no-Degrade and no-FSS.
std::vector<AblationVariant> default_ablation_variants();

struct AblationRow {
  std::string benchmark;  // "Avg.PDR" for the average rows
  std::string variant;    // "all" for the mean over variants
  double cost_original = 0.0;
  double cost_variant = 0.0;
  double pdr = 0.0;  // (variant - original) / original
};

struct AblationBenchmark {
  std::string name;
  const Instance* instance;
};

std::vector<AblationRow> run_ablation(const std::vector<AblationBenchmark>& benchmarks,
                                      const RunConfig& config,
                                      const std::vector<AblationVariant>& variants =
                                          default_ablation_variants());

std::string ablation_csv(const std::vector<AblationRow>& rows);

// ---------------------------------------------------------------------------
// Screening speed probe

struct ProbeRow {
  std::size_t solutions = 0;  // evaluated so far
  double mc_seconds = 0.0;
  double amc_seconds = 0.0;
  std::size_t screened = 0;
  std::uint64_t mc_draws = 0;
  std::uint64_t amc_draws = 0;
};

struct ProbeReport {
  std::vector<ProbeRow> rows;  // one per 1000 solutions (and the final total)
  std::size_t screened = 0;
  std::uint64_t mc_draws = 0;
  std::uint64_t amc_draws = 0;
};

/// Evaluates `n_solutions` uniformly random solutions with plain and
/// accelerated Monte Carlo, timing both.
ProbeReport amc_speed_probe(const Instance& instance, std::size_t n_solutions,
                            std::uint64_t seed,
                            std::uint64_t draws = kDefaultMonteCarloDraws);

std::string probe_csv(const ProbeReport& report);

}  // namespace ddcc
