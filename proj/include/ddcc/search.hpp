#pragma once

// Data-driven adaptive local search: a greedy construction repaired by
// surrogate weight, best-improvement single swaps, random degradation to
// escape local optima, a final pairwise swap pass, and an output filter
// over two archives of feasible solutions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddcc/evaluator.hpp"
#include "ddcc/instance.hpp"
#include "ddcc/rng.hpp"

namespace ddcc {

/// Surrogate weight mu + lambda * sigma per item, the utility
/// cost / surrogate weight, and per-class orderings by both.
struct SurrogateTable {
  double lambda = 1.0;
  std::vector<std::vector<double>> weight;
  std::vector<std::vector<double>> utility;
  // Item indices by utility, largest first (ties by index).
  std::vector<std::vector<std::size_t>> by_utility;
  // Item indices by surrogate weight, heaviest first (ties by index).
  std::vector<std::vector<std::size_t>> by_weight;
  // rank_by_weight[i][j] = position of item j in by_weight[i]
  std::vector<std::vector<std::size_t>> rank_by_weight;

  double weight_of(const Solution& s, std::size_t i) const { return weight[i][s.picks[i]]; }
};

SurrogateTable build_surrogates(const Instance& instance, double lambda);

struct ArchiveEntry {
  Solution solution;
  double cost = 0.0;
  double confidence = 0.0;
};

/// Two bounded lists of distinct feasible solutions: the cheapest seen
/// (cost ascending) and the most confident seen (confidence descending).
class SolutionArchive {
 public:
  static constexpr std::size_t kCapacity = 30;

  explicit SolutionArchive(std::size_t capacity = kCapacity) : capacity_(capacity) {}

  void offer(const ArchiveEntry& entry);

  const std::vector<ArchiveEntry>& cost_list() const { return cost_list_; }
  const std::vector<ArchiveEntry>& mc_list() const { return mc_list_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return cost_list_.empty() && mc_list_.empty(); }

  /// Capacity, ordering and uniqueness of both lists.
  bool invariants_hold() const;

 private:
  std::size_t capacity_;
  std::vector<ArchiveEntry> cost_list_;
  std::vector<ArchiveEntry> mc_list_;
};

enum class SfeVariant { Original, V1, V2, V3 };

const char* to_string(SfeVariant v);
SfeVariant parse_sfe_variant(const std::string& name);

/// Switches for the ablation variants; defaults give the full algorithm.
struct DdalsComponents {
  bool random_init = false;  // random construction instead of the greedy one
  bool lss = true;
  bool degrade = true;
  bool fss = true;
  bool lss_to_fixpoint = true;  // false: a single LSS pass per iteration
};

struct DdalsParams {
  double lambda = 1.0;
  std::size_t max_iter = 30;
  SfeVariant sfe = SfeVariant::Original;
  EvaluatorConfig evaluator;
  std::uint64_t seed = 0;
  DdalsComponents components;
};

void validate_params(const DdalsParams& params);

struct Evaluated {
  EvalOutcome outcome;
  double cost = 0.0;
  std::optional<double> confidence;  // set for feasible solutions

  bool feasible() const { return outcome.feasible(); }
};

/// Mutable state of one run. Every evaluation goes through `evaluate`,
/// which counts it and offers feasible results to both archives.
class SearchState {
 public:
  SearchState(const Instance& instance, const SurrogateTable& table,
              Evaluator& evaluator, std::uint64_t seed);

  Evaluated evaluate(const Solution& solution);

  /// Replaces `best` when `candidate` is strictly cheaper (or none yet).
  bool offer_best(const ArchiveEntry& candidate);

  std::uint64_t evaluations() const { return evaluator_.calls(); }

  const Instance& instance() const { return instance_; }
  const SurrogateTable& table() const { return table_; }
  Evaluator& evaluator() { return evaluator_; }

  std::optional<ArchiveEntry> best;
  SolutionArchive archives;
  Rng rng;

 private:
  const Instance& instance_;
  const SurrogateTable& table_;
  Evaluator& evaluator_;
};

struct ConstructionResult {
  ArchiveEntry entry;  // confidence is 0 when infeasible
  bool feasible = false;
  std::size_t evaluations = 0;
};

/// Greedy start at the largest-utility item of every class, repaired by
/// moving the heaviest pick to the next lighter item of its class; falls back
/// to the lightest item everywhere once that class runs out.
ConstructionResult constructive_procedure(SearchState& state);

/// Random start, repaired by re-drawing every class among items lighter than
/// the current pick until feasible or nothing lighter remains.
ConstructionResult random_construction(SearchState& state);

/// One best-improvement pass over cheaper same-class swaps; nullopt when no
/// cheaper swap is feasible.
std::optional<ArchiveEntry> local_swap_search(SearchState& state,
                                              const ArchiveEntry& current);

struct DegradeResult {
  ArchiveEntry entry;
  bool changed = false;
};

DegradeResult degrade(SearchState& state, const ArchiveEntry& current);

/// Scans every class pair and item pair, moving to any feasible strictly
/// cheaper double swap, and repeats until a full scan finds nothing.
ArchiveEntry further_swap_search(SearchState& state, const ArchiveEntry& best);

struct SfeSelection {
  ArchiveEntry chosen;
  std::vector<ArchiveEntry> shortlist;  // V3 only: first 10 of the cost list
  bool fell_back = false;               // returned `best` for lack of candidates
};

double sfe_v1_threshold(double confidence_level);

SfeSelection sfe_select(const SolutionArchive& archives, const ArchiveEntry& best,
                        SfeVariant variant, double confidence_level);

struct DdalsResult {
  ArchiveEntry output;
  bool feasible = false;
  ArchiveEntry fss_best;  // incumbent before the output filter
  ConstructionResult construction;
  std::uint64_t eval_count = 0;
  EvalWork work;
  SolutionArchive archives;
  // Best feasible cost after each iteration (+inf while none is known).
  std::vector<double> best_cost_history;
  std::vector<ArchiveEntry> shortlist;
  bool sfe_fell_back = false;
};

DdalsResult ddals(const Instance& instance, const DdalsParams& params);

/// Same search with a caller-provided evaluator (e.g. the Gaussian model).
DdalsResult ddals_with(const Instance& instance, const DdalsParams& params,
                       Evaluator& evaluator);

}  // namespace ddcc
