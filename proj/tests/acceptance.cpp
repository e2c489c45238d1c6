// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "ddcc/baselines.hpp"
#include "ddcc/eval.hpp"
#include "ddcc/generator.hpp"
#include "ddcc/harness.hpp"
#include "ddcc/search.hpp"
#include "oracles.hpp"

using namespace ddcc;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[PRIMARY] criterion %d %s: %s (%s; %.1fs)\n", id, name, o.pass ? "PASS" : "FAIL",
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double population_std(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Shared by criteria 1 and 4.
struct OracleCase {
  Instance instance;
  std::vector<Solution> solutions;
};

std::vector<OracleCase> oracle_cases() {
  std::mt19937_64 rng(20240611);
  std::vector<OracleCase> out;
  const oracle::RandomShape shape{4, 5, 6, 9};
  for (int t = 0; t < 600; ++t) {
    OracleCase c{oracle::random_instance(rng, shape), {}};
    for (int k = 0; k < 12; ++k) c.solutions.push_back(oracle::random_solution(rng, c.instance));
    out.push_back(std::move(c));
  }
  return out;
}

Outcome exact_equivalence(const std::vector<OracleCase>& cases) {
  std::size_t checked = 0, mismatches = 0, feasible = 0;
  for (const auto& c : cases) {
    for (const auto& s : c.solutions) {
      const bool exact = exact_feasibility(c.instance, s).feasible();
      const bool brute = brute_force_feasibility(c.instance, s).feasible();
      mismatches += exact != brute || brute != oracle::feasible(c.instance, s);
      feasible += brute;
      ++checked;
    }
  }
  return {mismatches == 0, fmt("%zu instances, %zu solutions, %zu feasible, %zu mismatches",
                               cases.size(), checked, feasible, mismatches)};
}

Outcome descending_prefix() {
  std::mt19937_64 rng(77);
  const oracle::RandomShape shape{4, 5, 10, 30};
  std::size_t pairs = 0, bad = 0;
  while (pairs < 150) {
    const Instance inst = oracle::random_instance(rng, shape);
    if (std::pow(static_cast<double>(inst.sample_count()), inst.num_classes()) > 1e4) continue;
    const Solution s = oracle::random_solution(rng, inst);
    auto expected = oracle::all_sums(inst, s);
    std::sort(expected.rbegin(), expected.rend());
    const auto popped = popped_sums_prefix(inst, s, expected.size());
    bad += popped != expected;
    ++pairs;
  }
  return {bad == 0, fmt("%zu pairs, %zu with a differing prefix", pairs, bad)};
}

Outcome mc_calibration() {
  const auto g = generate(find_preset("APP-ls1-37"), 1);
  std::mt19937_64 rng(3);
  double worst_small = 0.0, worst_large = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Solution s = oracle::random_solution(rng, g.instance);
    std::vector<double> small, large;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      small.push_back(*monte_carlo_confidence(g.instance, s, 10'000, seed).estimated_confidence);
      large.push_back(
          *monte_carlo_confidence(g.instance, s, 1'000'000, seed).estimated_confidence);
    }
    worst_small = std::max(worst_small, population_std(small));
    worst_large = std::max(worst_large, population_std(large));
  }
  // Control: an instance small enough for the bootstrap-exact value.
  const auto ctl = generate(find_preset("LAB-ss1-14"), 2);
  double worst_z = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Solution s = oracle::random_solution(rng, ctl.instance);
    const double p = brute_force_confidence(ctl.instance, s);
    const double est =
        *monte_carlo_confidence(ctl.instance, s, 1'000'000, 100 + k).estimated_confidence;
    const double se = std::sqrt(p * (1 - p) / 1e6);
    worst_z = std::max(worst_z, se > 0 ? std::abs(est - p) / se : (est == p ? 0.0 : 1e9));
  }
  const bool ok = worst_small <= 0.01 && worst_large <= 0.001 && worst_z <= 3.0;
  return {ok, fmt("max std %.3f pp at 1e4, %.4f pp at 1e6; control max |z| %.2f",
                  100 * worst_small, 100 * worst_large, worst_z)};
}

Outcome screening_soundness(const std::vector<OracleCase>& cases) {
  std::size_t screened = 0, false_elims = 0;
  for (const auto& c : cases) {
    const auto tuples = build_screen_tuples(c.instance.num_classes(), c.instance.sample_count(),
                                            c.instance.confidence_level());
    for (const auto& s : c.solutions) {
      if (fast_screen(c.instance, s, tuples) != ScreenResult::Infeasible) continue;
      ++screened;
      false_elims += oracle::feasible(c.instance, s);
    }
  }
  return {false_elims == 0 && screened > 0,
          fmt("%zu screened infeasible, %zu false eliminations", screened, false_elims)};
}

Outcome sample_sizes() {
  const std::uint64_t got[4] = {required_sample_size(0.05), required_sample_size(0.005),
                                required_sample_size(0.0005), required_sample_size(0.00005)};
  const bool ok = got[0] == 139 && got[1] == 13863 && got[2] == 1386295 && got[3] == 138629437;
  return {ok, fmt("%llu %llu %llu %llu", (unsigned long long)got[0], (unsigned long long)got[1],
                  (unsigned long long)got[2], (unsigned long long)got[3])};
}

Outcome bound_gap() {
  const auto g = generate(find_preset("LAB-ss2-26"), 1);
  const Instance& inst = g.instance;
  // Five solutions spread over the confidence range above one half.
  std::vector<std::pair<double, Solution>> ranked;
  for (const auto& s : oracle::all_solutions(inst)) {
    const double p = brute_force_confidence(inst, s);
    if (p >= 0.5) ranked.emplace_back(p, s);
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  if (ranked.size() < 5) return {false, "fewer than 5 solutions above confidence 0.5"};
  bool valid = true;
  double lowest_gap = 0.0;
  std::string rows;
  for (int k = 0; k < 5; ++k) {
    const auto& [p, s] = ranked[k * (ranked.size() - 1) / 4];
    const auto mom = picked_moments(inst, s);
    const double b = bernstein_lower_bound(mom, inst.capacity());
    const double h = hoeffding_lower_bound(mom, inst.capacity());
    valid = valid && b <= p && h <= p;
    if (k == 0) lowest_gap = p - std::max(b, h);
    rows += fmt(" %.3f/%.3f/%.3f", p, b, h);
  }
  return {valid && lowest_gap >= 0.10,
          fmt("exact/Bernstein/Hoeffding:%s; gap at lowest %.1f pp", rows.c_str(),
              100 * lowest_gap)};
}

Outcome solver_dominance() {
  bool ok = true;
  std::string detail;
  for (const char* preset : {"LAB-ss1-14", "LAB-ss2-26", "LAB-ss3-20", "LAB-ss4-16"}) {
    double c_ddals = 0.0, c_greedy = 0.0;
    int feasible = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto g = generate(find_preset(preset), seed);
      RunConfig cfg;
      cfg.benchmark = preset;
      cfg.algorithms = {Algorithm::Ddals, Algorithm::Greedy};
      cfg.repetitions = 1;
      cfg.master_seed = seed;
      cfg.rcl_draws = 100'000;
      const auto r = run_experiment(g.instance, &g.truth, cfg);
      for (const auto& row : r.rows) {
        if (row.algorithm == "DDALS" && row.variant == "O") {
          c_ddals += row.cost;
          feasible += row.feasible;
        } else if (row.algorithm == "Greedy") {
          c_greedy += row.cost;
        }
      }
    }
    const bool dominant = c_ddals <= c_greedy;
    ok = ok && dominant && feasible >= 9;
    detail += fmt("%s%s C %.2f vs %.2f FSR %.1f", detail.empty() ? "" : "; ", preset,
                  c_ddals / 10, c_greedy / 10, feasible / 10.0);
  }
  return {ok, detail};
}

Outcome optimum_recovery() {
  std::mt19937_64 rng(8);
  const oracle::RandomShape shape{3, 5, 5, 20};
  int instances = 0, worst = 10;
  while (instances < 15) {
    const Instance inst = oracle::random_instance(rng, shape);
    const auto best = oracle::optimum(inst);
    if (!best) continue;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      DdalsParams p;
      p.seed = seed;
      p.evaluator.kind = EvaluatorKind::Exact;
      const auto r = ddals(inst, p);
      hits += r.feasible && std::abs(r.output.cost - *best) <= 1e-9;
    }
    worst = std::min(worst, hits);
    ++instances;
  }
  return {worst >= 8, fmt("%d instances, worst recovery %d/10 seeds", instances, worst)};
}

Outcome ablation_sign() {
  std::vector<GeneratedBenchmark> gens;
  std::vector<AblationBenchmark> suite;
  const char* presets[] = {"LAB-ss1-14", "LAB-ss2-18", "LAB-ss2-26",
                           "LAB-ss3-20", "LAB-ss4-10", "LAB-ss4-16"};
  for (const char* p : presets) gens.push_back(generate(find_preset(p), 2));
  for (std::size_t k = 0; k < gens.size(); ++k) suite.push_back({presets[k], &gens[k].instance});
  RunConfig cfg;
  cfg.repetitions = 10;
  cfg.master_seed = 9;
  const auto rows = run_ablation(suite, cfg);
  double no_degrade = NAN, all = NAN;
  std::string detail;
  for (const auto& r : rows) {
    if (r.benchmark != "Avg.PDR") continue;
    detail += fmt("%s%s %+.4f", detail.empty() ? "" : ", ", r.variant.c_str(), r.pdr);
    if (r.variant == "no-Degrade") no_degrade = r.pdr;
    if (r.variant == "all") all = r.pdr;
  }
  return {no_degrade >= 0.0 && all >= 0.0, detail};
}

Outcome app_fidelity() {
  Rng rng(4);
  std::array<std::uint64_t, 4> counts{};
  const std::uint64_t draws = 1'000'000;
  for (std::uint64_t k = 0; k < draws; ++k) ++counts[sample_attempt(rng) - 1];
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    worst = std::max(worst, std::abs(counts[k] / double(draws) - kAttemptProbabilities[k]));
  }
  const auto g = generate(find_preset("APP-ls1-37"), 5);
  double max_delay = 0.0;
  for (std::uint64_t k = 0; k < draws; ++k) {
    const std::size_t i = k % g.instance.num_classes();
    const std::size_t j = (k / g.instance.num_classes()) % g.instance.cls(i).size();
    max_delay = std::max(max_delay, sample_true_delay(g.truth, i, j, rng));
  }
  std::vector<double> spread, cost;
  for (std::size_t i = 0; i < g.instance.num_classes(); ++i) {
    for (const auto& item : g.instance.cls(i).items) {
      const auto m = summarize_samples(item.samples());
      spread.push_back(m.mean + m.stddev);
      cost.push_back(item.cost());
    }
  }
  const double rho = oracle::spearman(spread, cost);
  const bool ok = worst <= 0.005 && max_delay <= 40.0 && rho < 0.0 && spread.size() >= 100;
  return {ok, fmt("max attempt deviation %.5f, max delay %.3f, Spearman %.3f over %zu items",
                  worst, max_delay, rho, spread.size())};
}

Outcome gaussian_failure() {
  int runs = 0, gauss_fail = 0;
  double rcl_gauss = 0.0, rcl_ddals = 0.0;
  for (const char* preset : {"APP-ss2-49", "APP-ss3-38"}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto g = generate(find_preset(preset), seed);
      const double p0 = g.instance.confidence_level();
      DdalsParams p;
      p.seed = seed;
      p.evaluator.kind = EvaluatorKind::Exact;
      const auto gauss = gaussian_baseline(g.instance, p);
      p.sfe = SfeVariant::V1;
      const auto mine = ddals(g.instance, p);
      const std::uint64_t rcl_seed = 1000 + seed;
      const double rg = real_confidence(g.truth, gauss.output.solution, 100'000, rcl_seed);
      const double rd = real_confidence(g.truth, mine.output.solution, 100'000, rcl_seed);
      gauss_fail += rg < p0 - kFeasibilityMargin;
      rcl_gauss += rg;
      rcl_ddals += rd;
      ++runs;
    }
  }
  rcl_gauss /= runs;
  rcl_ddals /= runs;
  return {gauss_fail >= 3 && rcl_ddals > rcl_gauss,
          fmt("%d runs, Gaussian below P0-0.005 in %d; mean RCL DDALS(V1) %.4f vs Gaussian %.4f",
              runs, gauss_fail, rcl_ddals, rcl_gauss)};
}

}  // namespace

int main() {
  const auto cases = oracle_cases();
  report(1, "exact evaluator matches brute force", [&] { return exact_equivalence(cases); });
  report(2, "heap pops the largest sums in order", descending_prefix);
  report(3, "Monte Carlo calibration", mc_calibration);
  report(4, "fast screen never eliminates a feasible solution",
         [&] { return screening_soundness(cases); });
  report(5, "Hoeffding sample sizes", sample_sizes);
  report(6, "concentration bounds are valid and loose", bound_gap);
  report(7, "DDALS cost and feasibility on LAB", solver_dominance);
  report(8, "DDALS recovers the exhaustive optimum", optimum_recovery);
  report(9, "ablation PDR sign", ablation_sign);
  report(10, "APP generator fidelity", app_fidelity);
  report(11, "Gaussian baseline misses P0 on APP", gaussian_failure);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
