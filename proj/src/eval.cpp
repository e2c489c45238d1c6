#include "ddcc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ddcc/error.hpp"
#include "ddcc/parallel.hpp"
#include "ddcc/rng.hpp"

namespace ddcc {

const char* to_string(EvalMethod method) {
  switch (method) {
    case EvalMethod::ExactHeap: return "exact";
    case EvalMethod::BruteForce: return "brute";
    case EvalMethod::MonteCarlo: return "mc";
    case EvalMethod::AcceleratedMC: return "amc";
    case EvalMethod::GaussianQuantile: return "gauss";
  }
  return "?";
}

MomentSummary summarize_samples(std::span<const double> samples, int max_order) {
  MomentSummary s;
  if (samples.empty()) return s;
  const double n = static_cast<double>(samples.size());
  s.min = *std::min_element(samples.begin(), samples.end());
  s.max = *std::max_element(samples.begin(), samples.end());
  double sum = 0.0;
  for (double d : samples) sum += d;
  s.mean = sum / n;
  double sq = 0.0;
  for (double d : samples) sq += (d - s.mean) * (d - s.mean);
  s.stddev = std::sqrt(sq / n);
  s.raw_moments.assign(static_cast<std::size_t>(std::max(max_order, 0)), 0.0);
  for (double d : samples) {
    double p = 1.0;
    for (auto& mk : s.raw_moments) {
      p *= d;
      mk += p;
    }
  }
  for (auto& mk : s.raw_moments) mk /= n;
  // guard the ordering invariant against rounding in the mean
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

std::vector<MomentSummary> picked_moments(const Instance& instance,
                                          const Solution& solution) {
  require_valid(instance, solution);
  std::vector<MomentSummary> out;
  out.reserve(instance.num_classes());
  for (std::size_t i = 0; i < instance.num_classes(); ++i) {
    out.push_back(summarize_samples(instance.picked(solution, i).samples()));
  }
  return out;
}

double combination_count(std::size_t sample_count, std::size_t num_classes) {
  return std::pow(static_cast<double>(sample_count),
                  static_cast<double>(num_classes));
}

std::uint64_t violation_allowance(double confidence_level,
                                  std::size_t sample_count,
                                  std::size_t num_classes) {
  const long double total = std::pow(static_cast<long double>(sample_count),
                                     static_cast<long double>(num_classes));
  long double t = (1.0L - static_cast<long double>(confidence_level)) * total;
  if (!(t < 1.8e19L)) return std::numeric_limits<std::uint64_t>::max();
  if (t <= 0.0L) return 0;
  const long double r = std::nearbyint(t);
  if (std::fabs(t - r) <= 1e-9L * std::max(1.0L, t)) t = r;
  return static_cast<std::uint64_t>(std::floor(t));
}

// ---------------------------------------------------------------------------
// Brute force

namespace {

// Calls fn(total) for every combination of the picked items' samples.
template <typename Fn>
void for_each_total(const Instance& instance, const Solution& solution, Fn&& fn) {
  const std::size_t m = instance.num_classes();
  const std::size_t L = instance.sample_count();
  std::vector<std::span<const double>> cols(m);
  for (std::size_t i = 0; i < m; ++i) cols[i] = instance.picked(solution, i).samples_desc();
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += cols[i][idx[i]];
    fn(total);
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < L) break;
      idx[pos] = 0;
      if (pos == 0) return;
    }
    if (m == 0) return;
  }
}

std::uint64_t count_fitting(const Instance& instance, const Solution& solution,
                            std::uint64_t limit) {
  require_valid(instance, solution);
  const double total = combination_count(instance.sample_count(), instance.num_classes());
  if (total > static_cast<double>(limit)) {
    throw Error(ErrorKind::Guard, "brute force refused: L^m = " +
                                      std::to_string(total) + " exceeds limit " +
                                      std::to_string(limit));
  }
  const double w = instance.capacity();
  std::uint64_t fit = 0;
  for_each_total(instance, solution, [&](double t) { fit += (t <= w) ? 1 : 0; });
  return fit;
}

}  // namespace

double brute_force_confidence(const Instance& instance, const Solution& solution,
                              std::uint64_t limit) {
  const std::uint64_t fit = count_fitting(instance, solution, limit);
  return static_cast<double>(fit) /
         combination_count(instance.sample_count(), instance.num_classes());
}

EvalOutcome brute_force_feasibility(const Instance& instance,
                                    const Solution& solution, std::uint64_t limit) {
  const std::uint64_t fit = count_fitting(instance, solution, limit);
  const auto total = static_cast<std::uint64_t>(
      combination_count(instance.sample_count(), instance.num_classes()));
  const std::uint64_t allowance = violation_allowance(
      instance.confidence_level(), instance.sample_count(), instance.num_classes());
  EvalOutcome out;
  out.method = EvalMethod::BruteForce;
  out.verdict = (total - fit <= allowance) ? Verdict::Feasible : Verdict::Infeasible;
  out.estimated_confidence = static_cast<double>(fit) / static_cast<double>(total);
  out.work.combinations = total;
  return out;
}

// ---------------------------------------------------------------------------
// Heap enumeration

DescendingSumEnumerator::DescendingSumEnumerator(const Instance& instance,
                                                 const Solution& solution)
    : m_(instance.num_classes()), L_(instance.sample_count()) {
  require_valid(instance, solution);
  columns_.reserve(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    columns_.push_back(instance.picked(solution, i).samples_desc());
  }
  arena_.assign(m_, 0);
  push(0);
}

double DescendingSumEnumerator::sum_of(std::size_t node) const {
  const std::uint32_t* t = arena_.data() + node * m_;
  double total = 0.0;
  for (std::size_t i = 0; i < m_; ++i) total += columns_[i][t[i]];
  return total;
}

void DescendingSumEnumerator::push(std::size_t node) {
  heap_.push_back({sum_of(node), node});
  std::push_heap(heap_.begin(), heap_.end());
  ++pushes_;
}

std::optional<double> DescendingSumEnumerator::next() {
  if (heap_.empty()) return std::nullopt;
  std::pop_heap(heap_.begin(), heap_.end());
  const HeapEntry top = heap_.back();
  heap_.pop_back();
  ++pops_;
  last_node_ = top.node;

  // A tuple's only parent is the tuple with its last nonzero coordinate
  // decremented, so a popped tuple advances coordinates from its last
  // nonzero one onwards and every tuple is pushed exactly once.
  const std::size_t base = top.node * m_;
  std::size_t first = m_;
  while (first > 0 && arena_[base + first - 1] == 0) --first;
  if (first > 0) --first;
  for (std::size_t i = first; i < m_; ++i) {
    if (arena_[base + i] + 1 >= L_) continue;
    const std::size_t child = arena_.size() / m_;
    arena_.resize(arena_.size() + m_);
    std::copy_n(arena_.begin() + static_cast<std::ptrdiff_t>(base), m_,
                arena_.begin() + static_cast<std::ptrdiff_t>(child * m_));
    ++arena_[child * m_ + i];
    push(child);
  }
  return top.sum;
}

std::span<const std::uint32_t> DescendingSumEnumerator::last_tuple() const {
  return {arena_.data() + last_node_ * m_, m_};
}

EvalOutcome exact_feasibility(const Instance& instance, const Solution& solution) {
  const std::uint64_t allowance = violation_allowance(
      instance.confidence_level(), instance.sample_count(), instance.num_classes());
  const double total = combination_count(instance.sample_count(), instance.num_classes());
  const double w = instance.capacity();

  DescendingSumEnumerator sums(instance, solution);
  EvalOutcome out;
  out.method = EvalMethod::ExactHeap;
  out.verdict = Verdict::Infeasible;
  std::uint64_t violations = 0;
  while (auto s = sums.next()) {
    if (*s <= w) {
      out.verdict = Verdict::Feasible;
      out.estimated_confidence = 1.0 - static_cast<double>(violations) / total;
      break;
    }
    if (++violations > allowance) break;
  }
  out.work.heap_pops = sums.pops();
  out.work.heap_pushes = sums.pushes();
  return out;
}

std::vector<double> popped_sums_prefix(const Instance& instance,
                                       const Solution& solution, std::size_t k) {
  const double total = combination_count(instance.sample_count(), instance.num_classes());
  if (k == 0 || static_cast<double>(k) > total) {
    throw Error(ErrorKind::OutOfRange,
                "k = " + std::to_string(k) + " outside [1, L^m]");
  }
  DescendingSumEnumerator sums(instance, solution);
  std::vector<double> out;
  out.reserve(k);
  while (out.size() < k) out.push_back(*sums.next());
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

std::uint64_t mc_count_chunk(std::span<const std::span<const double>> cols,
                             std::size_t L, double w, std::uint64_t draws,
                             std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, L - 1);
  std::uint64_t fit = 0;
  for (std::uint64_t d = 0; d < draws; ++d) {
    double total = 0.0;
    for (const auto& col : cols) total += col[pick(rng)];
    fit += (total <= w) ? 1 : 0;
  }
  return fit;
}

}  // namespace

EvalOutcome monte_carlo_confidence(const Instance& instance, const Solution& solution,
                                   std::uint64_t draws, std::uint64_t seed,
                                   unsigned workers) {
  if (draws == 0) throw Error(ErrorKind::OutOfRange, "draws must be positive");
  require_valid(instance, solution);
  const std::size_t m = instance.num_classes();
  std::vector<std::span<const double>> cols(m);
  for (std::size_t i = 0; i < m; ++i) cols[i] = instance.picked(solution, i).samples();

  const std::size_t L = instance.sample_count();
  const double w = instance.capacity();
  const std::uint64_t fit = sum_over_chunks(
      draws, kMonteCarloChunk, workers, [&](std::uint64_t c, std::uint64_t n) {
        return mc_count_chunk(cols, L, w, n, derive_seed(seed, c));
      });

  EvalOutcome out;
  out.method = EvalMethod::MonteCarlo;
  const double p = static_cast<double>(fit) / static_cast<double>(draws);
  out.estimated_confidence = p;
  out.verdict = p >= instance.confidence_level() ? Verdict::Feasible : Verdict::Infeasible;
  out.work.draws = draws;
  return out;
}

// ---------------------------------------------------------------------------
// Screening

namespace {

using Counts = std::vector<std::uint64_t>;  // l_i + 1 per position

// prod(counts) >= target, computed exactly with saturation.
bool reaches(const Counts& counts, std::uint64_t target) {
  unsigned __int128 p = 1;
  for (std::uint64_t c : counts) {
    p *= c;
    if (p >= target) {
      // remaining factors are >= 1
      return true;
    }
  }
  return p >= target;
}

// Fallback for saturated targets: compare in log space with a margin so the
// check stays conservative.
bool reaches_log(const Counts& counts, double log_k) {
  double s = 0.0;
  for (std::uint64_t c : counts) s += std::log(static_cast<double>(c));
  return s > log_k + 1e-9 * std::max(1.0, std::fabs(log_k));
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> f;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      f.push_back(p);
      n /= p;
    }
  }
  if (n > 1) f.push_back(n);
  return f;
}

// Largest prime first, each into the currently smallest bin that stays <= L.
std::optional<Counts> split_balanced(std::uint64_t n, std::size_t m, std::uint64_t L) {
  auto primes = prime_factors(n);
  std::sort(primes.rbegin(), primes.rend());
  Counts bins(m, 1);
  for (std::uint64_t p : primes) {
    std::size_t best = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (bins[i] * p <= L && (best == m || bins[i] < bins[best])) best = i;
    }
    if (best == m) return std::nullopt;
    bins[best] *= p;
  }
  std::sort(bins.rbegin(), bins.rend());
  return bins;
}

}  // namespace

std::vector<IndexTuple> build_screen_tuples(std::size_t num_classes,
                                            std::size_t sample_count,
                                            double confidence_level,
                                            std::size_t max_tuples) {
  const std::size_t m = num_classes;
  const std::uint64_t L = sample_count;
  if (m == 0 || L == 0) return {};
  max_tuples = std::max<std::size_t>(max_tuples, 1);

  const std::uint64_t allowance = violation_allowance(confidence_level, L, m);
  const bool saturated = allowance == std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t target = saturated ? allowance : allowance + 1;
  const double log_k =
      std::log1p(-confidence_level) + static_cast<double>(m) * std::log(static_cast<double>(L));
  auto ok = [&](const Counts& c) {
    for (std::uint64_t v : c) {
      if (v < 1 || v > L) return false;
    }
    return saturated ? reaches_log(c, log_k) : reaches(c, target);
  };

  std::vector<IndexTuple> out;
  auto add = [&](const Counts& c) {
    if (out.size() >= max_tuples || !ok(c)) return;
    IndexTuple t;
    t.indices.reserve(m);
    for (std::uint64_t v : c) t.indices.push_back(static_cast<std::size_t>(v - 1));
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  };

  // Balanced: smallest b with b^m >= target.
  const double log_target = saturated ? log_k : std::log(static_cast<double>(target));
  auto b = static_cast<std::uint64_t>(
      std::max(1.0, std::ceil(std::exp(log_target / static_cast<double>(m))) - 1.0));
  b = std::min<std::uint64_t>(b, L);
  while (b < L && !ok(Counts(m, b))) ++b;
  while (b > 1 && ok(Counts(m, b - 1))) --b;
  if (!ok(Counts(m, b))) return out;  // target exceeds L^m
  add(Counts(m, b));
  if (m == 1) return out;

  // Factorization splits of target, target+1, ... and their rotations.
  if (!saturated && target <= 1'000'000'000'000ull) {
    for (std::uint64_t n = target; n < target + 4 && out.size() < max_tuples; ++n) {
      auto bins = split_balanced(n, m, L);
      if (!bins) continue;
      for (std::size_t r = 0; r < m; ++r) {
        Counts rot(m);
        for (std::size_t i = 0; i < m; ++i) rot[i] = (*bins)[(i + r) % m];
        add(rot);
      }
    }
  }

  // Skewed: all positions at a < b except one carrying the remainder.
  for (std::uint64_t a = b - 1; a >= 1 && a + 3 >= b && out.size() < max_tuples; --a) {
    for (std::size_t p = 0; p < m; ++p) {
      Counts c(m, a);
      double rest = log_target - static_cast<double>(m - 1) * std::log(static_cast<double>(a));
      auto heavy = static_cast<std::uint64_t>(std::max(1.0, std::floor(std::exp(rest))));
      heavy = std::min<std::uint64_t>(heavy, L);
      c[p] = heavy;
      while (c[p] < L && !ok(c)) ++c[p];
      add(c);
    }
    if (a == 1) break;
  }
  return out;
}

ScreenResult fast_screen(const Instance& instance, const Solution& solution,
                         std::span<const IndexTuple> tuples) {
  const std::size_t m = instance.num_classes();
  const double w = instance.capacity();
  for (const auto& t : tuples) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      total += instance.picked(solution, i).samples_desc()[t.indices[i]];
    }
    if (total > w) return ScreenResult::Infeasible;
  }
  return ScreenResult::Undecided;
}

EvalOutcome accelerated_mc(const Instance& instance, const Solution& solution,
                           std::span<const IndexTuple> tuples, std::uint64_t draws,
                           std::uint64_t seed, unsigned workers) {
  require_valid(instance, solution);
  if (draws == 0) throw Error(ErrorKind::OutOfRange, "draws must be positive");
  if (fast_screen(instance, solution, tuples) == ScreenResult::Infeasible) {
    EvalOutcome out;
    out.method = EvalMethod::AcceleratedMC;
    out.verdict = Verdict::Infeasible;
    out.screened = true;
    out.work.screen_checks = tuples.size();
    return out;
  }
  EvalOutcome out = monte_carlo_confidence(instance, solution, draws, seed, workers);
  out.method = EvalMethod::AcceleratedMC;
  out.work.screen_checks = tuples.size();
  return out;
}

EvalOutcome accelerated_mc(const Instance& instance, const Solution& solution,
                           std::uint64_t draws, std::uint64_t seed) {
  const auto tuples = build_screen_tuples(instance.num_classes(), instance.sample_count(),
                                          instance.confidence_level());
  return accelerated_mc(instance, solution, tuples, draws, seed);
}

// ---------------------------------------------------------------------------
// Bounds and the Gaussian model

double bernstein_lower_bound(std::span<const MomentSummary> moments, double capacity) {
  double mean = 0.0, v = 0.0, c = 0.0;
  for (const auto& s : moments) {
    mean += s.mean;
    v += s.variance();
    c = std::max(c, s.range());
  }
  const double alpha = capacity - mean;
  if (alpha <= 0.0) return 0.0;
  const double denom = v + c * alpha / 3.0;
  if (denom <= 0.0) return 1.0;
  return 1.0 - std::exp(-(alpha * alpha / 2.0) / denom);
}

double hoeffding_lower_bound(std::span<const MomentSummary> moments, double capacity) {
  double mean = 0.0, ranges = 0.0;
  for (const auto& s : moments) {
    mean += s.mean;
    ranges += s.range() * s.range();
  }
  const double alpha = capacity - mean;
  if (alpha <= 0.0) return 0.0;
  if (ranges <= 0.0) return 1.0;
  return 1.0 - std::exp(-2.0 * alpha * alpha / ranges);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  // Acklam's coefficients
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // one Halley step against erfc
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

EvalOutcome gaussian_feasibility(std::span<const MomentSummary> moments, double capacity,
                                 double confidence_level) {
  double mean = 0.0, var = 0.0;
  for (const auto& s : moments) {
    mean += s.mean;
    var += s.variance();
  }
  const double sd = std::sqrt(var);
  EvalOutcome out;
  out.method = EvalMethod::GaussianQuantile;
  out.verdict = (mean + normal_quantile(confidence_level) * sd <= capacity)
                    ? Verdict::Feasible
                    : Verdict::Infeasible;
  if (sd > 0.0) {
    out.estimated_confidence = normal_cdf((capacity - mean) / sd);
  } else {
    out.estimated_confidence = mean <= capacity ? 1.0 : 0.0;
  }
  return out;
}

std::uint64_t required_sample_size(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorKind::OutOfRange, "epsilon must be positive");
  }
  return static_cast<std::uint64_t>(
      std::ceil(std::log(2.0) / (2.0 * epsilon * epsilon)));
}

}  // namespace ddcc
