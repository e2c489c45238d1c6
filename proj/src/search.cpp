#include "ddcc/search.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "ddcc/error.hpp"

namespace ddcc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool cheaper(const ArchiveEntry& a, const ArchiveEntry& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.solution < b.solution;
}

bool more_confident(const ArchiveEntry& a, const ArchiveEntry& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return cheaper(a, b);
}

template <class Less>
void insert_bounded(std::vector<ArchiveEntry>& list, const ArchiveEntry& e,
                    std::size_t capacity, Less less) {
  for (const auto& x : list) {
    if (x.solution == e.solution) return;
  }
  auto pos = std::upper_bound(list.begin(), list.end(), e, less);
  if (list.size() >= capacity && pos == list.end()) return;
  list.insert(pos, e);
  if (list.size() > capacity) list.pop_back();
}

template <class Less>
bool list_ok(const std::vector<ArchiveEntry>& list, std::size_t capacity, Less less) {
  if (list.size() > capacity) return false;
  for (std::size_t a = 0; a < list.size(); ++a) {
    if (a + 1 < list.size() && less(list[a + 1], list[a])) return false;
    for (std::size_t b = a + 1; b < list.size(); ++b) {
      if (list[a].solution == list[b].solution) return false;
    }
  }
  return true;
}

ArchiveEntry infeasible_entry(const Instance& inst, const Solution& s) {
  return ArchiveEntry{s, total_cost(inst, s), 0.0};
}

}  // namespace

// ---------------------------------------------------------------------------
// Surrogates

SurrogateTable build_surrogates(const Instance& instance, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::Config, "lambda must be a finite value >= 0");
  }
  SurrogateTable t;
  t.lambda = lambda;
  const std::size_t m = instance.num_classes();
  t.weight.resize(m);
  t.utility.resize(m);
  t.by_utility.resize(m);
  t.by_weight.resize(m);
  t.rank_by_weight.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& items = instance.cls(i).items;
    for (const auto& it : items) {
      const MomentSummary s = summarize_samples(it.samples(), 1);
      const double w = s.mean + lambda * s.stddev;
      t.weight[i].push_back(w);
      t.utility[i].push_back(w > 0.0 ? it.cost() / w : kInf);
    }
    std::vector<std::size_t> idx(items.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    t.by_utility[i] = idx;
    std::stable_sort(t.by_utility[i].begin(), t.by_utility[i].end(),
                     [&](std::size_t a, std::size_t b) {
                       return t.utility[i][a] > t.utility[i][b];
                     });
    t.by_weight[i] = idx;
    std::stable_sort(t.by_weight[i].begin(), t.by_weight[i].end(),
                     [&](std::size_t a, std::size_t b) {
                       return t.weight[i][a] > t.weight[i][b];
                     });
    t.rank_by_weight[i].resize(items.size());
    for (std::size_t r = 0; r < items.size(); ++r) t.rank_by_weight[i][t.by_weight[i][r]] = r;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Archive

void SolutionArchive::offer(const ArchiveEntry& entry) {
  insert_bounded(cost_list_, entry, capacity_, cheaper);
  insert_bounded(mc_list_, entry, capacity_, more_confident);
}

bool SolutionArchive::invariants_hold() const {
  return list_ok(cost_list_, capacity_, cheaper) &&
         list_ok(mc_list_, capacity_, more_confident);
}

const char* to_string(SfeVariant v) {
  switch (v) {
    case SfeVariant::Original: return "O";
    case SfeVariant::V1: return "V1";
    case SfeVariant::V2: return "V2";
    case SfeVariant::V3: return "V3";
  }
  return "?";
}

SfeVariant parse_sfe_variant(const std::string& name) {
  std::string n;
  for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (n == "o" || n == "original") return SfeVariant::Original;
  if (n == "v1") return SfeVariant::V1;
  if (n == "v2") return SfeVariant::V2;
  if (n == "v3") return SfeVariant::V3;
  throw Error(ErrorKind::Config, "unknown output filter \"" + name + "\"");
}

void validate_params(const DdalsParams& params) {
  if (params.max_iter < 1) throw Error(ErrorKind::Config, "max_iter must be >= 1");
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
    throw Error(ErrorKind::Config, "lambda must be a finite value >= 0");
  }
}

// ---------------------------------------------------------------------------
// State

SearchState::SearchState(const Instance& instance, const SurrogateTable& table,
                         Evaluator& evaluator, std::uint64_t seed)
    : rng(seed), instance_(instance), table_(table), evaluator_(evaluator) {}

Evaluated SearchState::evaluate(const Solution& solution) {
  Evaluated r;
  r.outcome = evaluator_.evaluate(solution);
  r.cost = total_cost(instance_, solution);
  if (r.outcome.feasible()) {
    r.confidence = evaluator_.confidence_of(solution, r.outcome);
    archives.offer(ArchiveEntry{solution, r.cost, *r.confidence});
  }
  return r;
}

bool SearchState::offer_best(const ArchiveEntry& candidate) {
  if (!best || candidate.cost < best->cost) {
    best = candidate;
    return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Construction

ConstructionResult constructive_procedure(SearchState& state) {
  const auto& t = state.table();
  const std::size_t m = state.instance().num_classes();
  ConstructionResult res;
  Solution s;
  for (std::size_t i = 0; i < m; ++i) s.picks.push_back(t.by_utility[i].front());

  for (;;) {
    Evaluated ev = state.evaluate(s);
    ++res.evaluations;
    if (ev.feasible()) {
      res.entry = ArchiveEntry{s, ev.cost, *ev.confidence};
      res.feasible = true;
      return res;
    }
    std::size_t heavy = 0;
    for (std::size_t i = 1; i < m; ++i) {
      if (t.weight_of(s, i) > t.weight_of(s, heavy)) heavy = i;
    }
    const std::size_t next = t.rank_by_weight[heavy][s.picks[heavy]] + 1;
    if (next < t.by_weight[heavy].size()) {
      s.picks[heavy] = t.by_weight[heavy][next];
      continue;
    }
    Solution lightest;
    for (std::size_t i = 0; i < m; ++i) lightest.picks.push_back(t.by_weight[i].back());
    if (lightest == s) {
      res.entry = infeasible_entry(state.instance(), s);
      return res;
    }
    Evaluated fb = state.evaluate(lightest);
    ++res.evaluations;
    res.feasible = fb.feasible();
    res.entry = ArchiveEntry{lightest, fb.cost, fb.confidence.value_or(0.0)};
    return res;
  }
}

ConstructionResult random_construction(SearchState& state) {
  const auto& t = state.table();
  const auto& inst = state.instance();
  const std::size_t m = inst.num_classes();
  ConstructionResult res;
  Solution s;
  for (std::size_t i = 0; i < m; ++i) {
    s.picks.push_back(uniform_index(state.rng, inst.cls(i).size()));
  }
  std::vector<std::size_t> lighter;
  for (;;) {
    Evaluated ev = state.evaluate(s);
    ++res.evaluations;
    if (ev.feasible()) {
      res.entry = ArchiveEntry{s, ev.cost, *ev.confidence};
      res.feasible = true;
      return res;
    }
    bool changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      lighter.clear();
      const double w = t.weight[i][s.picks[i]];
      for (std::size_t j = 0; j < inst.cls(i).size(); ++j) {
        if (t.weight[i][j] < w) lighter.push_back(j);
      }
      if (lighter.empty()) continue;
      s.picks[i] = lighter[uniform_index(state.rng, lighter.size())];
      changed = true;
    }
    if (!changed) {
      res.entry = infeasible_entry(inst, s);
      return res;
    }
  }
}

// ---------------------------------------------------------------------------
// Neighborhoods

std::optional<ArchiveEntry> local_swap_search(SearchState& state,
                                              const ArchiveEntry& current) {
  const auto& inst = state.instance();
  std::optional<ArchiveEntry> chosen;
  Solution cand = current.solution;
  for (std::size_t i = 0; i < inst.num_classes(); ++i) {
    const std::size_t pick = current.solution.picks[i];
    const double pick_cost = inst.item(i, pick).cost();
    for (std::size_t j = 0; j < inst.cls(i).size(); ++j) {
      if (!(inst.item(i, j).cost() < pick_cost)) continue;
      cand.picks[i] = j;
      Evaluated ev = state.evaluate(cand);
      if (ev.feasible() && (!chosen || ev.cost < chosen->cost)) {
        chosen = ArchiveEntry{cand, ev.cost, *ev.confidence};
      }
    }
    cand.picks[i] = pick;
  }
  return chosen;
}

DegradeResult degrade(SearchState& state, const ArchiveEntry& current) {
  const auto& inst = state.instance();
  const auto& t = state.table();
  std::vector<std::size_t> order(inst.num_classes());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), state.rng);

  Solution cand = current.solution;
  std::vector<std::size_t> pool;
  for (std::size_t i : order) {
    const std::size_t n = inst.cls(i).size();
    const std::size_t pick = current.solution.picks[i];
    if (n < 2) continue;
    std::size_t r = uniform_index(state.rng, n - 1);
    if (r >= pick) ++r;
    cand.picks[i] = r;
    Evaluated ev = state.evaluate(cand);
    if (ev.feasible()) return {ArchiveEntry{cand, ev.cost, *ev.confidence}, true};

    pool.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != pick && j != r && t.weight[i][j] < t.weight[i][r]) pool.push_back(j);
    }
    std::shuffle(pool.begin(), pool.end(), state.rng);
    for (std::size_t j : pool) {
      cand.picks[i] = j;
      Evaluated e2 = state.evaluate(cand);
      if (e2.feasible()) return {ArchiveEntry{cand, e2.cost, *e2.confidence}, true};
    }
    cand.picks[i] = pick;
  }
  return {current, false};
}

ArchiveEntry further_swap_search(SearchState& state, const ArchiveEntry& best) {
  const auto& inst = state.instance();
  const std::size_t m = inst.num_classes();
  ArchiveEntry inc = best;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i0 = 0; i0 < m; ++i0) {
      for (std::size_t i1 = i0 + 1; i1 < m; ++i1) {
        for (std::size_t a = 0; a < inst.cls(i0).size(); ++a) {
          for (std::size_t b = 0; b < inst.cls(i1).size(); ++b) {
            if (a == inc.solution.picks[i0] && b == inc.solution.picks[i1]) continue;
            Solution cand = inc.solution;
            cand.picks[i0] = a;
            cand.picks[i1] = b;
            const double c = total_cost(inst, cand);
            if (!(c < inc.cost)) continue;
            Evaluated ev = state.evaluate(cand);
            if (ev.feasible()) {
              inc = ArchiveEntry{cand, ev.cost, *ev.confidence};
              improved = true;
            }
          }
        }
      }
    }
  }
  return inc;
}

// ---------------------------------------------------------------------------
// Output filter

double sfe_v1_threshold(double confidence_level) {
  return 1.0 - (1.0 - confidence_level) / 2.0;
}

SfeSelection sfe_select(const SolutionArchive& archives, const ArchiveEntry& best,
                        SfeVariant variant, double confidence_level) {
  SfeSelection sel;
  sel.chosen = best;
  if (variant == SfeVariant::Original) return sel;
  if (archives.empty()) {
    sel.fell_back = true;
    return sel;
  }

  std::vector<ArchiveEntry> pool = archives.cost_list();
  for (const auto& e : archives.mc_list()) {
    bool seen = false;
    for (const auto& p : pool) seen = seen || p.solution == e.solution;
    if (!seen) pool.push_back(e);
  }

  switch (variant) {
    case SfeVariant::Original:
      break;
    case SfeVariant::V1: {
      const double thr = sfe_v1_threshold(confidence_level);
      const ArchiveEntry* pickd = nullptr;
      for (const auto& e : pool) {
        if (e.confidence >= thr && (!pickd || cheaper(e, *pickd))) pickd = &e;
      }
      if (pickd) sel.chosen = *pickd;
      else sel.fell_back = true;
      break;
    }
    case SfeVariant::V2: {
      const auto rank_score = [&](const std::vector<ArchiveEntry>& list,
                                  const Solution& s) -> std::size_t {
        for (std::size_t r = 0; r < list.size(); ++r) {
          if (list[r].solution == s) return archives.capacity() - r;  // capacity+1 - (r+1)
        }
        return 0;
      };
      const ArchiveEntry* top = nullptr;
      std::size_t top_score = 0;
      for (const auto& e : pool) {
        const std::size_t score = rank_score(archives.cost_list(), e.solution) +
                                  rank_score(archives.mc_list(), e.solution);
        if (!top || score > top_score || (score == top_score && cheaper(e, *top))) {
          top = &e;
          top_score = score;
        }
      }
      sel.chosen = *top;
      break;
    }
    case SfeVariant::V3: {
      const auto& cl = archives.cost_list();
      sel.shortlist.assign(cl.begin(), cl.begin() + std::min<std::ptrdiff_t>(10, cl.size()));
      if (sel.shortlist.empty()) {
        sel.fell_back = true;
        break;
      }
      const ArchiveEntry* top = &sel.shortlist.front();
      for (const auto& e : sel.shortlist) {
        if (e.confidence > top->confidence ||
            (e.confidence == top->confidence && cheaper(e, *top))) {
          top = &e;
        }
      }
      sel.chosen = *top;
      break;
    }
  }
  return sel;
}

// ---------------------------------------------------------------------------
// Driver

DdalsResult ddals(const Instance& instance, const DdalsParams& params) {
  Evaluator evaluator(instance, params.evaluator);
  return ddals_with(instance, params, evaluator);
}

DdalsResult ddals_with(const Instance& instance, const DdalsParams& params,
                       Evaluator& evaluator) {
  validate_params(params);
  const std::uint64_t calls_before = evaluator.calls();
  const SurrogateTable table = build_surrogates(instance, params.lambda);
  SearchState state(instance, table, evaluator, params.seed);
  const auto& comp = params.components;

  DdalsResult out;
  out.construction = comp.random_init ? random_construction(state)
                                      : constructive_procedure(state);
  if (out.construction.feasible) {
    ArchiveEntry current = out.construction.entry;
    state.offer_best(current);
    for (std::size_t t = 0; t < params.max_iter; ++t) {
      if (comp.lss) {
        while (auto next = local_swap_search(state, current)) {
          current = *next;
          if (!comp.lss_to_fixpoint) break;
        }
      }
      state.offer_best(current);
      out.best_cost_history.push_back(state.best->cost);
      if (comp.degrade) current = degrade(state, current).entry;
    }
    ArchiveEntry best = *state.best;
    if (comp.fss) best = further_swap_search(state, best);
    state.best = best;
    out.fss_best = best;
    out.feasible = true;

    const SfeSelection sel =
        sfe_select(state.archives, best, params.sfe, instance.confidence_level());
    out.output = sel.chosen;
    out.shortlist = sel.shortlist;
    out.sfe_fell_back = sel.fell_back;
  } else {
    out.output = out.construction.entry;
    out.fss_best = out.construction.entry;
    out.best_cost_history.assign(params.max_iter, kInf);
  }
  out.eval_count = evaluator.calls() - calls_before;
  out.work = evaluator.total_work();
  out.archives = state.archives;
  return out;
}

}  // namespace ddcc
