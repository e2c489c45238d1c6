#include "ddcc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

#include "ddcc/error.hpp"
#include "ddcc/rng.hpp"

namespace ddcc {

namespace {

constexpr std::uint64_t kTagEvaluator = 1;
constexpr std::uint64_t kTagSearch = 2;
constexpr std::uint64_t kTagGa = 3;
constexpr std::uint64_t kTagEda = 4;
constexpr std::uint64_t kTagRcl = 0x7c1;

constexpr SfeVariant kVariants[] = {SfeVariant::Original, SfeVariant::V1, SfeVariant::V2,
                                    SfeVariant::V3};

// Runs task(0..n-1) on up to `jobs` threads.
template <class Task>
void parallel_for(std::size_t n, unsigned jobs, Task&& task) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs <= 1) {
    for (std::size_t k = 0; k < n; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t k = next++; k < n; k = next++) task(k);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(v / static_cast<double>(xs.size()));
  return s;
}

void check_truth(const Instance& instance, const TruthModel& truth) {
  bool ok = truth.items.size() == instance.num_classes();
  for (std::size_t i = 0; ok && i < truth.items.size(); ++i) {
    ok = truth.items[i].size() == instance.cls(i).size();
  }
  if (!ok) {
    throw Error(ErrorKind::Validation, "truth model does not match the instance shape");
  }
}

EvaluatorConfig evaluator_for(const Instance& instance, const RunConfig& config,
                              std::uint64_t seed) {
  EvaluatorConfig ec;
  ec.kind = config.evaluator.value_or(evaluator_selection(instance, config.exact_work_cap));
  ec.mc_draws = config.mc_draws;
  ec.seed = seed;
  return ec;
}

DdalsParams search_params(const RunConfig& config, const EvaluatorConfig& ec,
                          std::uint64_t seed) {
  DdalsParams p;
  p.lambda = config.lambda;
  p.max_iter = config.max_iter;
  p.evaluator = ec;
  p.seed = seed;
  return p;
}

bool contains(const std::vector<Algorithm>& algs, Algorithm a) {
  return std::find(algs.begin(), algs.end(), a) != algs.end();
}

}  // namespace

EvaluatorKind evaluator_selection(const Instance& instance, double work_cap) {
  const long double log_work =
      std::log(static_cast<long double>(1.0 - instance.confidence_level())) +
      static_cast<long double>(instance.num_classes()) *
          std::log(static_cast<long double>(instance.sample_count()));
  if (log_work > std::log(static_cast<long double>(work_cap)) + 1e-9L) {
    return EvaluatorKind::AcceleratedMC;
  }
  const long double work = std::ceil(std::exp(log_work) - 1e-9L);
  return work <= work_cap ? EvaluatorKind::Exact : EvaluatorKind::AcceleratedMC;
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Ddals: return "DDALS";
    case Algorithm::Greedy: return "Greedy";
    case Algorithm::Ga: return "GA";
    case Algorithm::Eda: return "EDA";
    case Algorithm::Gaussian: return "Gaussian";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  std::string n;
  for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (n == "ddals") return Algorithm::Ddals;
  if (n == "greedy") return Algorithm::Greedy;
  if (n == "ga") return Algorithm::Ga;
  if (n == "eda") return Algorithm::Eda;
  if (n == "gauss" || n == "gaussian") return Algorithm::Gaussian;
  throw Error(ErrorKind::Config, "unknown algorithm \"" + name + "\"");
}

bool counts_as_feasible(bool solver_feasible, std::optional<double> rcl,
                        double confidence_level) {
  if (!rcl) return solver_feasible;
  return *rcl >= confidence_level - kFeasibilityMargin;
}

void validate_config(const RunConfig& config) {
  if (config.repetitions < 1) throw Error(ErrorKind::Config, "repetitions must be >= 1");
  if (config.max_iter < 1) throw Error(ErrorKind::Config, "max_iter must be >= 1");
  if (config.rcl_draws < 1) throw Error(ErrorKind::Config, "rcl draws must be >= 1");
  if (config.mc_draws < 1) throw Error(ErrorKind::Config, "mc draws must be >= 1");
  if (!(config.lambda >= 0.0)) throw Error(ErrorKind::Config, "lambda must be >= 0");
  if (config.algorithms.empty()) throw Error(ErrorKind::Config, "no algorithm selected");
}

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<std::vector<const RunRow*>> groups;
  for (const auto& r : rows) {
    std::size_t g = 0;
    while (g < out.size() && !(out[g].benchmark == r.benchmark &&
                               out[g].algorithm == r.algorithm &&
                               out[g].variant == r.variant)) {
      ++g;
    }
    if (g == out.size()) {
      AggregateRow a;
      a.benchmark = r.benchmark;
      a.algorithm = r.algorithm;
      a.variant = r.variant;
      out.push_back(std::move(a));
      groups.emplace_back();
    }
    groups[g].push_back(&r);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    std::vector<double> c, et, ecl, rcl;
    std::size_t feasible = 0;
    for (const RunRow* r : groups[g]) {
      c.push_back(r->cost);
      et.push_back(static_cast<double>(r->evaluations));
      ecl.push_back(r->ecl);
      if (r->rcl) rcl.push_back(*r->rcl);
      feasible += r->feasible ? 1 : 0;
    }
    auto& a = out[g];
    a.runs = groups[g].size();
    const Stats sc = stats_of(c), se = stats_of(et), sl = stats_of(ecl);
    a.cost_mean = sc.mean;
    a.cost_std = sc.std;
    a.et_mean = se.mean;
    a.et_std = se.std;
    a.ecl_mean = sl.mean;
    a.ecl_std = sl.std;
    if (rcl.size() == groups[g].size()) {
      const Stats sr = stats_of(rcl);
      a.rcl_mean = sr.mean;
      a.rcl_std = sr.std;
    }
    a.fsr = static_cast<double>(feasible) / static_cast<double>(a.runs);
  }
  return out;
}

ExperimentReport run_experiment(const Instance& instance, const TruthModel* truth,
                                const RunConfig& config) {
  validate_config(config);
  if (truth) check_truth(instance, *truth);
  const double p0 = instance.confidence_level();
  const auto& algs = config.algorithms;
  const bool need_search = contains(algs, Algorithm::Ddals) || contains(algs, Algorithm::Ga) ||
                           contains(algs, Algorithm::Eda);

  // rows_by_rep[rep] holds that repetition's rows in reporting order.
  std::vector<std::vector<RunRow>> rows_by_rep(config.repetitions);
  parallel_for(config.repetitions, config.jobs, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(config.master_seed, rep);
    const EvaluatorConfig ec =
        evaluator_for(instance, config, derive_seed(rep_seed, kTagEvaluator));
    const DdalsParams params = search_params(config, ec, derive_seed(rep_seed, kTagSearch));
    std::map<Solution, double> rcl_cache;
    auto& out = rows_by_rep[rep];

    auto emit = [&](Algorithm alg, const char* variant, const ArchiveEntry& entry,
                    bool solver_feasible, std::uint64_t evals, const Evaluator& ev) {
      RunRow row;
      row.benchmark = config.benchmark;
      row.algorithm = to_string(alg);
      row.variant = variant;
      row.rep = rep;
      row.seed = rep_seed;
      row.solution = entry.solution;
      row.solver_feasible = solver_feasible;
      row.cost = entry.cost;
      row.evaluations = evals;
      row.ecl = solver_feasible ? entry.confidence : ev.backfill_confidence(entry.solution);
      if (truth) {
        auto it = rcl_cache.find(entry.solution);
        if (it == rcl_cache.end()) {
          const std::uint64_t seed =
              solution_seed(derive_seed(config.master_seed, kTagRcl), entry.solution);
          it = rcl_cache
                   .emplace(entry.solution,
                            real_confidence(*truth, entry.solution, config.rcl_draws, seed))
                   .first;
        }
        row.rcl = it->second;
      }
      row.feasible = counts_as_feasible(solver_feasible, row.rcl, p0);
      out.push_back(std::move(row));
    };

    std::uint64_t budget = 0;
    if (need_search) {
      Evaluator ev(instance, ec);
      const DdalsResult r = ddals_with(instance, params, ev);
      budget = std::max<std::uint64_t>(1, r.eval_count);
      if (contains(algs, Algorithm::Ddals)) {
        for (SfeVariant v : kVariants) {
          const ArchiveEntry chosen =
              r.feasible ? sfe_select(r.archives, r.fss_best, v, p0).chosen : r.output;
          emit(Algorithm::Ddals, to_string(v), chosen, r.feasible, r.eval_count, ev);
        }
      }
    }
    for (Algorithm alg : algs) {
      switch (alg) {
        case Algorithm::Ddals:
          break;
        case Algorithm::Greedy: {
          Evaluator ev(instance, ec);
          const BaselineResult b = greedy(instance, config.lambda, ev);
          emit(alg, "-", b.output, b.feasible, b.eval_count, ev);
          break;
        }
        case Algorithm::Ga: {
          Evaluator ev(instance, ec);
          GaParams gp;
          gp.budget = budget;
          gp.seed = derive_seed(rep_seed, kTagGa);
          gp.lambda = config.lambda;
          const BaselineResult b = genetic_algorithm(instance, gp, ev);
          emit(alg, "-", b.output, b.feasible, b.eval_count, ev);
          break;
        }
        case Algorithm::Eda: {
          Evaluator ev(instance, ec);
          EdaParams ep;
          ep.budget = budget;
          ep.seed = derive_seed(rep_seed, kTagEda);
          ep.lambda = config.lambda;
          const BaselineResult b = eda(instance, ep, ev);
          emit(alg, "-", b.output, b.feasible, b.eval_count, ev);
          break;
        }
        case Algorithm::Gaussian: {
          EvaluatorConfig gc = ec;
          gc.kind = EvaluatorKind::Gaussian;
          DdalsParams gp = params;
          gp.evaluator = gc;
          Evaluator ev(instance, gc);
          const DdalsResult r = ddals_with(instance, gp, ev);
          emit(alg, "-", r.output, r.feasible, r.eval_count, ev);
          break;
        }
      }
    }
  });

  ExperimentReport report;
  report.benchmark = config.benchmark;
  report.confidence_level = p0;
  report.rcl_draws = truth ? config.rcl_draws : 0;
  report.evaluator = config.evaluator.value_or(evaluator_selection(instance, config.exact_work_cap));
  // Reorder to (algorithm, variant, rep).
  const std::size_t per_rep = rows_by_rep.front().size();
  for (std::size_t k = 0; k < per_rep; ++k) {
    for (auto& rep_rows : rows_by_rep) report.rows.push_back(rep_rows[k]);
  }
  report.aggregates = aggregate(report.rows);
  return report;
}

std::string report_csv(const ExperimentReport& report, bool with_header) {
  std::ostringstream os;
  if (with_header) {
    if (report.rcl_draws > 0) {
      os << "# rcl_draws=" << report.rcl_draws << " binomial_se_max="
         << fmt(0.5 / std::sqrt(static_cast<double>(report.rcl_draws))) << "\n";
    } else {
      os << "# rcl_draws=0 (no truth model; feasible = solver verdict)\n";
    }
    os << "# evaluator=" << to_string(report.evaluator) << " P0=" << fmt(report.confidence_level)
       << "\n";
    os << "benchmark,algorithm,variant,rep,seed,C,ET,ECL,RCL,feasible\n";
  }
  std::size_t next = 0;
  for (const auto& a : report.aggregates) {
    while (next < report.rows.size() && report.rows[next].algorithm == a.algorithm &&
           report.rows[next].variant == a.variant) {
      const auto& r = report.rows[next++];
      os << r.benchmark << ',' << r.algorithm << ',' << r.variant << ',' << r.rep << ','
         << r.seed << ',' << fmt(r.cost) << ',' << r.evaluations << ',' << fmt(r.ecl) << ','
         << (r.rcl ? fmt(*r.rcl) : "") << ',' << (r.feasible ? 1 : 0) << '\n';
    }
    os << a.benchmark << ',' << a.algorithm << ',' << a.variant << ",agg,," << fmt(a.cost_mean)
       << ',' << fmt(a.et_mean) << ',' << fmt(a.ecl_mean) << ','
       << (a.rcl_mean ? fmt(*a.rcl_mean) : "") << ',' << fmt(a.fsr) << '\n';
    os << a.benchmark << ',' << a.algorithm << ',' << a.variant << ",agg_std,,"
       << fmt(a.cost_std) << ',' << fmt(a.et_std) << ',' << fmt(a.ecl_std) << ','
       << (a.rcl_std ? fmt(*a.rcl_std) : "") << ",\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Ablation

std::vector<AblationVariant> default_ablation_variants() {
  std::vector<AblationVariant> v(4);
  v[0].name = "r-CP";
  v[0].components.random_init = true;
  v[1].name = "no-LSS";
  v[1].components.lss = false;
  v[2].name = "no-Degrade";
  v[2].components.degrade = false;
  v[3].name = "no-FSS";
  v[3].components.fss = false;
  return v;
}

std::vector<AblationRow> run_ablation(const std::vector<AblationBenchmark>& benchmarks,
                                      const RunConfig& config,
                                      const std::vector<AblationVariant>& variants) {
  validate_config(config);
  std::vector<AblationRow> rows;
  std::vector<double> pdr_sum(variants.size(), 0.0);
  for (const auto& b : benchmarks) {
    const Instance& inst = *b.instance;
    // costs[rep][0] is the original; costs[rep][1 + v] the variants.
    std::vector<std::vector<double>> costs(config.repetitions,
                                           std::vector<double>(variants.size() + 1));
    parallel_for(config.repetitions, config.jobs, [&](std::size_t rep) {
      const std::uint64_t rep_seed = derive_seed(config.master_seed, rep);
      const EvaluatorConfig ec = evaluator_for(inst, config, derive_seed(rep_seed, kTagEvaluator));
      DdalsParams p = search_params(config, ec, derive_seed(rep_seed, kTagSearch));
      costs[rep][0] = ddals(inst, p).output.cost;
      for (std::size_t v = 0; v < variants.size(); ++v) {
        p.components = variants[v].components;
        costs[rep][v + 1] = ddals(inst, p).output.cost;
      }
    });
    double original = 0.0;
    for (const auto& c : costs) original += c[0];
    original /= static_cast<double>(config.repetitions);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      double variant = 0.0;
      for (const auto& c : costs) variant += c[v + 1];
      variant /= static_cast<double>(config.repetitions);
      const double pdr = original > 0.0 ? (variant - original) / original : 0.0;
      pdr_sum[v] += pdr;
      rows.push_back({b.name, variants[v].name, original, variant, pdr});
    }
  }
  double all = 0.0;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const double avg = benchmarks.empty() ? 0.0 : pdr_sum[v] / static_cast<double>(benchmarks.size());
    all += avg;
    rows.push_back({"Avg.PDR", variants[v].name, 0.0, 0.0, avg});
  }
  if (!variants.empty()) {
    rows.push_back({"Avg.PDR", "all", 0.0, 0.0, all / static_cast<double>(variants.size())});
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "benchmark,variant,C_original,C_variant,PDR\n";
  for (const auto& r : rows) {
    os << r.benchmark << ',' << r.variant << ',';
    if (r.benchmark == "Avg.PDR") os << ",,";
    else os << fmt(r.cost_original) << ',' << fmt(r.cost_variant) << ',';
    os << fmt(r.pdr) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Probe

ProbeReport amc_speed_probe(const Instance& instance, std::size_t n_solutions,
                            std::uint64_t seed, std::uint64_t draws) {
  EvaluatorConfig mc;
  mc.kind = EvaluatorKind::MonteCarlo;
  mc.mc_draws = draws;
  mc.seed = seed;
  mc.memoize = false;
  EvaluatorConfig amc = mc;
  amc.kind = EvaluatorKind::AcceleratedMC;
  Evaluator ev_mc(instance, mc);
  Evaluator ev_amc(instance, amc);

  Rng rng(seed);
  ProbeReport report;
  double t_mc = 0.0, t_amc = 0.0;
  using Clock = std::chrono::steady_clock;
  for (std::size_t k = 1; k <= n_solutions; ++k) {
    Solution s;
    for (std::size_t i = 0; i < instance.num_classes(); ++i) {
      s.picks.push_back(uniform_index(rng, instance.cls(i).size()));
    }
    auto t0 = Clock::now();
    ev_mc.evaluate(s);
    auto t1 = Clock::now();
    ev_amc.evaluate(s);
    auto t2 = Clock::now();
    t_mc += std::chrono::duration<double>(t1 - t0).count();
    t_amc += std::chrono::duration<double>(t2 - t1).count();
    if (k % 1000 == 0 || k == n_solutions) {
      report.rows.push_back({k, t_mc, t_amc, static_cast<std::size_t>(ev_amc.screened_count()),
                             ev_mc.total_work().draws, ev_amc.total_work().draws});
    }
  }
  report.screened = ev_amc.screened_count();
  report.mc_draws = ev_mc.total_work().draws;
  report.amc_draws = ev_amc.total_work().draws;
  return report;
}

std::string probe_csv(const ProbeReport& report) {
  std::ostringstream os;
  os << "solutions,mc_seconds,amc_seconds,screened,mc_draws,amc_draws\n";
  for (const auto& r : report.rows) {
    os << r.solutions << ',' << fmt(r.mc_seconds) << ',' << fmt(r.amc_seconds) << ','
       << r.screened << ',' << r.mc_draws << ',' << r.amc_draws << '\n';
  }
  return os.str();
}

}  // namespace ddcc
