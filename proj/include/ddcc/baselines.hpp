#pragma once

// Comparison solvers. Budgets count evaluator calls; a generation in
// progress is finished, so a run may overshoot its budget by less than one
// population.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ddcc/evaluator.hpp"
#include "ddcc/instance.hpp"
#include "ddcc/rng.hpp"
#include "ddcc/search.hpp"

namespace ddcc {

struct BaselineResult {
  ArchiveEntry output;  // confidence 0 when infeasible
  bool feasible = false;
  std::uint64_t eval_count = 0;
  EvalWork work;
  std::size_t generations = 0;
};

/// The constructive procedure on its own.
BaselineResult greedy(const Instance& instance, double lambda, Evaluator& evaluator);

struct GaParams {
  std::size_t population = 10;
  std::size_t elite = 6;
  double crossover = 0.1;
  std::optional<double> mutation;  // per gene; defaults to 1/m
  std::uint64_t budget = 1000;
  std::uint64_t seed = 0;
  double lambda = 1.0;  // surrogate weights break ties among infeasible individuals
  std::vector<Solution> initial;  // used before random individuals
};

struct EdaParams {
  std::size_t population = 10;
  std::size_t selection = 6;
  std::optional<double> smoothing;  // defaults to 1 / (N * population)
  std::uint64_t budget = 1000;
  std::uint64_t seed = 0;
  double lambda = 1.0;
};

/// Evaluated individual as ranked by GA and EDA: feasible ones first by
/// cost, infeasible ones after them by estimated confidence (unknown counts
/// as 0), then by total surrogate weight.
struct Individual {
  Solution solution;
  bool feasible = false;
  double cost = 0.0;
  double confidence = 0.0;
  double surrogate = 0.0;
};

bool ranks_before(const Individual& a, const Individual& b);

BaselineResult genetic_algorithm(const Instance& instance, const GaParams& params,
                                 Evaluator& evaluator);

/// Independent categorical distribution over item indices per class.
class MarginalModel {
 public:
  explicit MarginalModel(const Instance& instance);

  Solution sample(Rng& rng) const;
  /// p_ij = (count_ij / |selected| + eps) / (1 + n_i eps)
  void refit(const std::vector<Solution>& selected, double eps);

  double probability(std::size_t i, std::size_t j) const { return probs_[i][j]; }
  std::vector<double>& class_probabilities(std::size_t i) { return probs_[i]; }

 private:
  std::vector<std::vector<double>> probs_;
};

BaselineResult eda(const Instance& instance, const EdaParams& params, Evaluator& evaluator);

/// The local search driven by the Gaussian-quantile feasibility test.
DdalsResult gaussian_baseline(const Instance& instance, DdalsParams params);

}  // namespace ddcc
