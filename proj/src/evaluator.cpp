#include "ddcc/evaluator.hpp"

#include "ddcc/error.hpp"
#include "ddcc/rng.hpp"

namespace ddcc {

const char* to_string(EvaluatorKind kind) {
  switch (kind) {
    case EvaluatorKind::Exact: return "exact";
    case EvaluatorKind::MonteCarlo: return "mc";
    case EvaluatorKind::AcceleratedMC: return "amc";
    case EvaluatorKind::Gaussian: return "gauss";
    case EvaluatorKind::BruteForce: return "brute";
  }
  return "?";
}

EvaluatorKind parse_evaluator_kind(const std::string& name) {
  if (name == "exact") return EvaluatorKind::Exact;
  if (name == "mc") return EvaluatorKind::MonteCarlo;
  if (name == "amc") return EvaluatorKind::AcceleratedMC;
  if (name == "gauss") return EvaluatorKind::Gaussian;
  if (name == "brute") return EvaluatorKind::BruteForce;
  throw Error(ErrorKind::Config, "unknown evaluator \"" + name + "\"");
}

Evaluator::Evaluator(const Instance& instance, EvaluatorConfig config)
    : instance_(instance), config_(config) {
  if (config_.kind == EvaluatorKind::AcceleratedMC ||
      (config_.kind == EvaluatorKind::Exact && config_.screen_exact)) {
    tuples_ = build_screen_tuples(instance.num_classes(), instance.sample_count(),
                                  instance.confidence_level(), config_.screen_tuples);
  }
  if (config_.kind == EvaluatorKind::Gaussian) {
    moments_.resize(instance.num_classes());
    for (std::size_t i = 0; i < instance.num_classes(); ++i) {
      for (const auto& it : instance.cls(i).items) {
        moments_[i].push_back(summarize_samples(it.samples()));
      }
    }
  }
}

EvalOutcome Evaluator::evaluate(const Solution& solution) {
  require_valid(instance_, solution);
  ++calls_;
  if (config_.memoize) {
    if (auto it = cache_.find(solution); it != cache_.end()) {
      ++hits_;
      if (it->second.screened) ++screened_;
      EvalOutcome out = it->second;
      out.work = EvalWork{};
      out.cached = true;
      return out;
    }
  }
  EvalOutcome out;
  const std::uint64_t seed = solution_seed(config_.seed, solution);
  switch (config_.kind) {
    case EvaluatorKind::Exact:
      if (!tuples_.empty() &&
          fast_screen(instance_, solution, tuples_) == ScreenResult::Infeasible) {
        out.method = EvalMethod::ExactHeap;
        out.verdict = Verdict::Infeasible;
        out.screened = true;
        out.work.screen_checks = tuples_.size();
      } else {
        out = exact_feasibility(instance_, solution);
        out.work.screen_checks = tuples_.size();
      }
      break;
    case EvaluatorKind::MonteCarlo:
      out = monte_carlo_confidence(instance_, solution, config_.mc_draws, seed,
                                   config_.workers);
      break;
    case EvaluatorKind::AcceleratedMC:
      out = accelerated_mc(instance_, solution, tuples_, config_.mc_draws, seed,
                           config_.workers);
      break;
    case EvaluatorKind::Gaussian: {
      std::vector<MomentSummary> picked;
      picked.reserve(solution.picks.size());
      for (std::size_t i = 0; i < solution.picks.size(); ++i) {
        picked.push_back(moments_[i][solution.picks[i]]);
      }
      out = gaussian_feasibility(picked, instance_.capacity(),
                                 instance_.confidence_level());
      break;
    }
    case EvaluatorKind::BruteForce:
      out = brute_force_feasibility(instance_, solution, config_.brute_force_limit);
      break;
  }
  if (out.screened) ++screened_;
  work_.heap_pops += out.work.heap_pops;
  work_.heap_pushes += out.work.heap_pushes;
  work_.draws += out.work.draws;
  work_.screen_checks += out.work.screen_checks;
  work_.combinations += out.work.combinations;
  if (config_.memoize) cache_.emplace(solution, out);
  return out;
}

double Evaluator::backfill_confidence(const Solution& solution) const {
  const std::uint64_t seed = derive_seed(solution_seed(config_.seed, solution), 0xbac4f111);
  return *monte_carlo_confidence(instance_, solution, kBackfillDraws, seed)
              .estimated_confidence;
}

double Evaluator::confidence_of(const Solution& solution,
                                const EvalOutcome& outcome) const {
  if (outcome.estimated_confidence) return *outcome.estimated_confidence;
  return backfill_confidence(solution);
}

}  // namespace ddcc
