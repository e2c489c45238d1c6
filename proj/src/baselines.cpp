#include "ddcc/baselines.hpp"

#include <algorithm>
#include <random>

#include "ddcc/error.hpp"

namespace ddcc {

namespace {

Individual assess(const Instance& inst, const SurrogateTable& table,
                  Evaluator& evaluator, Solution s) {
  Individual ind;
  const EvalOutcome out = evaluator.evaluate(s);
  ind.feasible = out.feasible();
  ind.cost = total_cost(inst, s);
  if (ind.feasible) {
    ind.confidence = evaluator.confidence_of(s, out);
  } else {
    ind.confidence = out.estimated_confidence.value_or(0.0);
  }
  for (std::size_t i = 0; i < s.picks.size(); ++i) ind.surrogate += table.weight_of(s, i);
  ind.solution = std::move(s);
  return ind;
}

Solution random_solution(const Instance& inst, Rng& rng) {
  Solution s;
  for (std::size_t i = 0; i < inst.num_classes(); ++i) {
    s.picks.push_back(uniform_index(rng, inst.cls(i).size()));
  }
  return s;
}

void keep_best(std::optional<Individual>& best, const Individual& ind) {
  if (!best || ranks_before(ind, *best)) best = ind;
}

BaselineResult finish(const std::optional<Individual>& best, const Evaluator& evaluator,
                      std::uint64_t calls_before, std::size_t generations) {
  BaselineResult r;
  r.output = ArchiveEntry{best->solution, best->cost, best->feasible ? best->confidence : 0.0};
  r.feasible = best->feasible;
  r.eval_count = evaluator.calls() - calls_before;
  r.work = evaluator.total_work();
  r.generations = generations;
  return r;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::Config, std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

bool ranks_before(const Individual& a, const Individual& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.feasible) {
    if (a.cost != b.cost) return a.cost < b.cost;
  } else {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.surrogate != b.surrogate) return a.surrogate < b.surrogate;
  }
  return a.solution < b.solution;
}

BaselineResult greedy(const Instance& instance, double lambda, Evaluator& evaluator) {
  const std::uint64_t calls_before = evaluator.calls();
  const SurrogateTable table = build_surrogates(instance, lambda);
  SearchState state(instance, table, evaluator, 0);
  const ConstructionResult cp = constructive_procedure(state);
  BaselineResult r;
  r.output = cp.entry;
  r.feasible = cp.feasible;
  r.eval_count = evaluator.calls() - calls_before;
  r.work = evaluator.total_work();
  return r;
}

BaselineResult genetic_algorithm(const Instance& instance, const GaParams& params,
                                 Evaluator& evaluator) {
  if (params.population < 2 || params.elite < 1 || params.elite >= params.population) {
    throw Error(ErrorKind::Config, "GA needs 1 <= elite < population");
  }
  if (params.budget == 0) throw Error(ErrorKind::Config, "GA budget must be positive");
  const std::size_t m = instance.num_classes();
  const double pm = params.mutation.value_or(1.0 / static_cast<double>(m));
  check_probability(params.crossover, "crossover probability");
  check_probability(pm, "mutation probability");

  const std::uint64_t calls_before = evaluator.calls();
  const SurrogateTable table = build_surrogates(instance, params.lambda);
  Rng rng(params.seed);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution do_cross(params.crossover);
  std::bernoulli_distribution do_mutate(pm);

  std::optional<Individual> best;
  std::vector<Individual> pop;
  for (std::size_t k = 0; k < params.population; ++k) {
    Solution s = k < params.initial.size() ? params.initial[k] : random_solution(instance, rng);
    pop.push_back(assess(instance, table, evaluator, std::move(s)));
    keep_best(best, pop.back());
  }

  std::size_t generations = 0;
  while (evaluator.calls() - calls_before < params.budget) {
    std::sort(pop.begin(), pop.end(), ranks_before);
    pop.resize(params.elite);
    std::vector<Individual> children;
    for (std::size_t k = params.elite; k < params.population; ++k) {
      const std::size_t a = uniform_index(rng, params.elite);
      std::size_t b = a;
      if (params.elite > 1) {
        b = uniform_index(rng, params.elite - 1);
        if (b >= a) ++b;
      }
      Solution child = pop[a].solution;
      if (do_cross(rng)) {
        for (std::size_t i = 0; i < m; ++i) {
          if (coin(rng)) child.picks[i] = pop[b].solution.picks[i];
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t n = instance.cls(i).size();
        if (n < 2 || !do_mutate(rng)) continue;
        std::size_t j = uniform_index(rng, n - 1);
        if (j >= child.picks[i]) ++j;
        child.picks[i] = j;
      }
      children.push_back(assess(instance, table, evaluator, std::move(child)));
      keep_best(best, children.back());
    }
    for (auto& c : children) pop.push_back(std::move(c));
    ++generations;
  }
  return finish(best, evaluator, calls_before, generations);
}

MarginalModel::MarginalModel(const Instance& instance) {
  for (std::size_t i = 0; i < instance.num_classes(); ++i) {
    const std::size_t n = instance.cls(i).size();
    probs_.emplace_back(n, 1.0 / static_cast<double>(n));
  }
}

Solution MarginalModel::sample(Rng& rng) const {
  Solution s;
  for (const auto& p : probs_) {
    std::discrete_distribution<std::size_t> d(p.begin(), p.end());
    s.picks.push_back(d(rng));
  }
  return s;
}

void MarginalModel::refit(const std::vector<Solution>& selected, double eps) {
  if (selected.empty()) return;
  const double k = static_cast<double>(selected.size());
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    auto& p = probs_[i];
    std::vector<double> count(p.size(), 0.0);
    for (const auto& s : selected) count[s.picks[i]] += 1.0;
    const double denom = 1.0 + static_cast<double>(p.size()) * eps;
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = (count[j] / k + eps) / denom;
  }
}

BaselineResult eda(const Instance& instance, const EdaParams& params, Evaluator& evaluator) {
  if (params.population < 1 || params.selection < 1 ||
      params.selection > params.population) {
    throw Error(ErrorKind::Config, "EDA needs 1 <= selection <= population");
  }
  if (params.budget == 0) throw Error(ErrorKind::Config, "EDA budget must be positive");
  const double eps = params.smoothing.value_or(
      1.0 / static_cast<double>(instance.max_class_size() * params.population));
  if (!(eps > 0.0)) throw Error(ErrorKind::Config, "EDA smoothing must be positive");

  const std::uint64_t calls_before = evaluator.calls();
  const SurrogateTable table = build_surrogates(instance, params.lambda);
  Rng rng(params.seed);
  MarginalModel model(instance);
  std::optional<Individual> best;
  std::size_t generations = 0;
  do {
    std::vector<Individual> pop;
    for (std::size_t k = 0; k < params.population; ++k) {
      pop.push_back(assess(instance, table, evaluator, model.sample(rng)));
      keep_best(best, pop.back());
    }
    std::sort(pop.begin(), pop.end(), ranks_before);
    std::vector<Solution> chosen;
    for (std::size_t k = 0; k < params.selection; ++k) chosen.push_back(pop[k].solution);
    model.refit(chosen, eps);
    ++generations;
  } while (evaluator.calls() - calls_before < params.budget);
  return finish(best, evaluator, calls_before, generations);
}

DdalsResult gaussian_baseline(const Instance& instance, DdalsParams params) {
  params.evaluator.kind = EvaluatorKind::Gaussian;
  return ddals(instance, params);
}

}  // namespace ddcc
