#include <algorithm>
#include <random>

#include "ddcc/baselines.hpp"
#include "ddcc/error.hpp"
#include "ddcc/generator.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ddcc;

namespace {

EvaluatorConfig exact() {
  EvaluatorConfig c;
  c.kind = EvaluatorKind::Exact;
  return c;
}

Instance single_sample(std::vector<std::vector<std::pair<double, double>>> cost_weight,
                       double w, double p0) {
  std::vector<ItemClass> cs(cost_weight.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (auto [c, x] : cost_weight[i]) cs[i].items.emplace_back(c, std::vector<double>{x});
  }
  return Instance::create(cs, w, p0);
}

// Only (1, 1) fits.
Instance unique_feasible() {
  return single_sample({{{1, 5}, {9, 1}, {2, 4}}, {{1, 5}, {9, 1}, {3, 3}}}, 2, 0.5);
}

}  // namespace

TEST_CASE("greedy is the constructive procedure") {
  const Instance loose = single_sample({{{10, 5}, {1, 1}}, {{9, 3}, {1, 2}}}, 8, 0.5);
  Evaluator ev(loose, exact());
  const auto g = greedy(loose, 1.0, ev);
  CHECK(g.eval_count == 1);
  CHECK(g.output.solution == Solution{{0, 0}});

  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const Instance inst = oracle::random_instance(rng);
    Evaluator e1(inst, exact());
    const auto gr = greedy(inst, 1.0, e1);
    DdalsParams p;
    p.evaluator = exact();
    p.max_iter = 2;
    const auto d = ddals(inst, p);
    CHECK(gr.output.solution == d.construction.entry.solution);
    CHECK(gr.feasible == d.construction.feasible);
    if (gr.feasible && d.feasible) CHECK(d.fss_best.cost <= gr.output.cost);
  }
}

TEST_CASE("feasible individuals rank first") {
  Individual f{Solution{{0}}, true, 9.0, 0.99, 1.0};
  Individual g{Solution{{1}}, true, 3.0, 0.991, 5.0};
  Individual i1{Solution{{2}}, false, 1.0, 0.8, 9.0};
  Individual i2{Solution{{3}}, false, 1.0, 0.5, 1.0};
  Individual i3{Solution{{4}}, false, 1.0, 0.5, 0.5};
  CHECK(ranks_before(g, f));
  CHECK(ranks_before(f, i1));
  CHECK_FALSE(ranks_before(i1, f));
  CHECK(ranks_before(i1, i2));
  CHECK(ranks_before(i3, i2));

  std::mt19937_64 rng(5);
  std::vector<Individual> pop;
  for (int k = 0; k < 200; ++k) {
    pop.push_back(Individual{Solution{{rng() % 9}}, rng() % 2 == 0,
                             static_cast<double>(rng() % 5), static_cast<double>(rng() % 4) / 4,
                             static_cast<double>(rng() % 3)});
  }
  std::sort(pop.begin(), pop.end(), ranks_before);
  const auto first_infeasible =
      std::find_if(pop.begin(), pop.end(), [](auto& x) { return !x.feasible; });
  CHECK(std::none_of(first_infeasible, pop.end(), [](auto& x) { return x.feasible; }));
}

TEST_CASE("GA") {
  const Instance inst = unique_feasible();
  GaParams gp;
  gp.budget = 400;
  gp.seed = 1;
  Evaluator ev(inst, exact());
  const auto r = genetic_algorithm(inst, gp, ev);
  CHECK(r.feasible);
  CHECK(r.output.solution == Solution{{1, 1}});

  // No variation operators: every child is a copy of the common start.
  GaParams frozen;
  frozen.budget = 50;
  frozen.mutation = 0.0;
  frozen.crossover = 1.0;
  frozen.initial.assign(frozen.population, Solution{{0, 2}});
  Evaluator ef(inst, exact());
  const auto fr = genetic_algorithm(inst, frozen, ef);
  CHECK(fr.output.solution == Solution{{0, 2}});
  CHECK(ef.cache_hits() == ef.calls() - 1);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const Instance ri = oracle::random_instance(rng);
    GaParams p;
    p.budget = 1 + rng() % 80;
    p.seed = rng();
    Evaluator e1(ri, exact()), e2(ri, exact());
    const auto a = genetic_algorithm(ri, p, e1);
    const auto b = genetic_algorithm(ri, p, e2);
    CHECK(a.output.solution == b.output.solution);
    CHECK(a.eval_count == b.eval_count);
    CHECK(a.eval_count <= p.budget + p.population);
    CHECK(a.eval_count >= std::min<std::uint64_t>(p.budget, p.population));
    if (a.feasible) CHECK(oracle::feasible(ri, a.output.solution));
  }

  GaParams bad;
  bad.elite = 10;
  Evaluator eb(inst, exact());
  CHECK_THROWS_AS(genetic_algorithm(inst, bad, eb), Error);
}

TEST_CASE("marginal model") {
  std::mt19937_64 r0(11);
  const Instance inst = oracle::random_instance(r0, {3, 5, 3});
  MarginalModel model(inst);
  for (std::size_t i = 0; i < inst.num_classes(); ++i) {
    auto& p = model.class_probabilities(i);
    std::fill(p.begin(), p.end(), 0.0);
    p.back() = 1.0;
  }
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto s = model.sample(rng);
    for (std::size_t i = 0; i < s.picks.size(); ++i) CHECK(s.picks[i] == inst.cls(i).size() - 1);
  }

  MarginalModel fit(inst);
  fit.refit({Solution(std::vector<std::size_t>(inst.num_classes(), 0))}, 0.01);
  for (std::size_t i = 0; i < inst.num_classes(); ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < inst.cls(i).size(); ++j) {
      CHECK(fit.probability(i, j) > 0.0);
      total += fit.probability(i, j);
    }
    CHECK(total == doctest::Approx(1.0));
  }
}

TEST_CASE("EDA") {
  const Instance inst = unique_feasible();
  EdaParams ep;
  ep.budget = 400;
  ep.seed = 3;
  Evaluator ev(inst, exact());
  const auto r = eda(inst, ep, ev);
  CHECK(r.feasible);
  CHECK(r.output.solution == Solution{{1, 1}});

  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const Instance ri = oracle::random_instance(rng);
    EdaParams p;
    p.budget = 1 + rng() % 80;
    p.seed = rng();
    Evaluator e1(ri, exact()), e2(ri, exact());
    const auto a = eda(ri, p, e1);
    const auto b = eda(ri, p, e2);
    CHECK(a.output.solution == b.output.solution);
    CHECK(a.eval_count <= p.budget + p.population);
    if (a.feasible) CHECK(oracle::feasible(ri, a.output.solution));
  }
}

TEST_CASE("Gaussian baseline") {
  // Zero variance: the quantile term vanishes and the test is sum <= W.
  const Instance det = single_sample({{{5, 3}, {1, 4}}, {{4, 2}, {1, 5}}}, 7, 0.99);
  DdalsParams p;
  const auto d = gaussian_baseline(det, p);
  CHECK(d.feasible);
  CHECK(d.output.solution == Solution{{1, 0}});  // 4 + 2 fits at cost 5; (0,1) 3+5 does not

  // Normal samples with a loose capacity: the output holds up on the data.
  Rng rng(5);
  std::normal_distribution<double> nd(5.0, 1.0);
  std::vector<ItemClass> cs(2);
  for (auto& c : cs) {
    for (int j = 0; j < 4; ++j) {
      std::vector<double> s(6);
      for (auto& x : s) x = std::max(0.0, nd(rng));
      c.items.emplace_back(1.0 + j, s);
    }
  }
  const Instance normal = Instance::create(cs, 12.0, 0.9);
  const auto g = gaussian_baseline(normal, p);
  REQUIRE(g.feasible);
  CHECK(oracle::confidence(normal, g.output.solution) >= 0.9);
}
