#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ddcc/eval.hpp"
#include "ddcc/instance.hpp"

namespace ddcc {

enum class EvaluatorKind { Exact, MonteCarlo, AcceleratedMC, Gaussian, BruteForce };

const char* to_string(EvaluatorKind kind);
EvaluatorKind parse_evaluator_kind(const std::string& name);

struct EvaluatorConfig {
  EvaluatorKind kind = EvaluatorKind::Exact;
  std::uint64_t mc_draws = kDefaultMonteCarloDraws;
  std::uint64_t seed = 0;
  // Run the (sound) screening test before the heap; verdicts are unchanged.
  bool screen_exact = true;
  std::size_t screen_tuples = kDefaultScreenTuples;
  unsigned workers = 1;
  std::uint64_t brute_force_limit = kDefaultBruteForceLimit;
  // Reuse the outcome of a solution evaluated before. Every call still
  // counts as an evaluation; only the work is skipped. Outcomes are
  // deterministic per solution, so results are unchanged.
  bool memoize = true;
};

inline constexpr std::uint64_t kBackfillDraws = 100'000;

/// Counted evaluation front-end used by every solver. Monte Carlo streams
/// are seeded from (config seed, pick vector), so re-evaluating the same
/// solution reproduces the same estimate.
class Evaluator {
 public:
  Evaluator(const Instance& instance, EvaluatorConfig config);

  EvalOutcome evaluate(const Solution& solution);

  /// Number of evaluate() calls so far.
  std::uint64_t calls() const { return calls_; }
  const EvalWork& total_work() const { return work_; }
  std::uint64_t screened_count() const { return screened_; }
  std::uint64_t cache_hits() const { return hits_; }
  const EvaluatorConfig& config() const { return config_; }
  const Instance& instance() const { return instance_; }

  /// Confidence for a solution whose evaluation carried none: a
  /// kBackfillDraws Monte Carlo estimate. Not counted as an evaluation.
  double backfill_confidence(const Solution& solution) const;
  /// `outcome.estimated_confidence`, or the backfill when absent.
  double confidence_of(const Solution& solution, const EvalOutcome& outcome) const;

 private:
  const Instance& instance_;
  EvaluatorConfig config_;
  std::vector<IndexTuple> tuples_;
  std::vector<std::vector<MomentSummary>> moments_;
  std::uint64_t calls_ = 0;
  std::uint64_t screened_ = 0;
  std::uint64_t hits_ = 0;
  EvalWork work_;
  std::unordered_map<Solution, EvalOutcome, SolutionHash> cache_;
};

}  // namespace ddcc
