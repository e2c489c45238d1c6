#pragma once

// Chance-constraint evaluation from raw sample data.
//
// Every evaluator answers the same question for a solution S: is the
// fraction of sample combinations (one sample per picked item) whose total
// exceeds W small enough, i.e. at most (1 - P0) * L^m? Totals equal to W
// count as fitting. Exact methods enumerate combinations; Monte Carlo
// methods resample them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddcc/instance.hpp"

namespace ddcc {

enum class Verdict { Feasible, Infeasible };

enum class EvalMethod {
  ExactHeap,
  BruteForce,
  MonteCarlo,
  AcceleratedMC,
  GaussianQuantile,
};

const char* to_string(EvalMethod method);

struct EvalWork {
  std::uint64_t heap_pops = 0;
  std::uint64_t heap_pushes = 0;
  std::uint64_t draws = 0;
  std::uint64_t screen_checks = 0;
  std::uint64_t combinations = 0;  // brute-force enumeration size
};

struct EvalOutcome {
  Verdict verdict = Verdict::Infeasible;
  // Absent when the heap method stopped early knowing only the verdict.
  std::optional<double> estimated_confidence;
  EvalMethod method = EvalMethod::ExactHeap;
  EvalWork work;
  bool screened = false;  // decided by the fast screening test
  bool cached = false;    // repeated evaluation served from memory

  bool feasible() const { return verdict == Verdict::Feasible; }
};

/// Per-class sample positions (l_1, ..., l_m) into the descending-sorted
/// samples of the picked items.
struct IndexTuple {
  std::vector<std::size_t> indices;

  friend bool operator==(const IndexTuple&, const IndexTuple&) = default;
};

/// Statistics of one item's samples. Variance and standard deviation use
/// the population divisor L.
struct MomentSummary {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  // raw_moments[k-1] = mean of samples^k, k = 1..order
  std::vector<double> raw_moments;

  double variance() const { return stddev * stddev; }
  double range() const { return max - min; }
};

MomentSummary summarize_samples(std::span<const double> samples,
                                int max_order = 4);
std::vector<MomentSummary> picked_moments(const Instance& instance,
                                          const Solution& solution);

// ---------------------------------------------------------------------------
// Feasibility boundary shared by every exact method.

/// L^m as a double (may be +inf for absurd sizes).
double combination_count(std::size_t sample_count, std::size_t num_classes);

/// Largest number of violating combinations (total > W) a feasible solution
/// may have: floor((1 - P0) * L^m), with values within 1e-9 (relative) of an
/// integer snapped to it so that e.g. P0 = 0.99, L^m = 27000 yields 270.
/// Saturates at UINT64_MAX.
std::uint64_t violation_allowance(double confidence_level,
                                  std::size_t sample_count,
                                  std::size_t num_classes);

// ---------------------------------------------------------------------------
// Exhaustive and heap-based exact evaluation

inline constexpr std::uint64_t kDefaultBruteForceLimit = 10'000'000;

/// Fraction of all L^m combinations whose total is <= W. Test oracle; throws
/// Error(Guard) when L^m exceeds `limit`.
double brute_force_confidence(const Instance& instance, const Solution& solution,
                              std::uint64_t limit = kDefaultBruteForceLimit);

/// Brute-force verdict using the same violation allowance as the heap method.
EvalOutcome brute_force_feasibility(const Instance& instance,
                                    const Solution& solution,
                                    std::uint64_t limit = kDefaultBruteForceLimit);

/// Enumerates combination totals of a fixed solution in non-increasing
/// order. A max-heap is seeded with the all-largest tuple; each pop pushes
/// its successors (one coordinate advanced), restricted so that no tuple is
/// pushed twice. Totals are always summed from scratch in class order, so
/// they are bit-identical to the brute-force totals.
class DescendingSumEnumerator {
 public:
  DescendingSumEnumerator(const Instance& instance, const Solution& solution);

  /// Next largest total, or nullopt once all L^m combinations are popped.
  std::optional<double> next();

  std::uint64_t pops() const { return pops_; }
  std::uint64_t pushes() const { return pushes_; }
  /// Index tuple of the most recent pop.
  std::span<const std::uint32_t> last_tuple() const;
  /// Every tuple ever pushed, in push order (m entries each).
  std::span<const std::uint32_t> pushed_tuples() const { return arena_; }

 private:
  struct HeapEntry {
    double sum;
    std::uint64_t node;
    bool operator<(const HeapEntry& o) const { return sum < o.sum; }
  };
  double sum_of(std::size_t node) const;
  void push(std::size_t node);

  std::vector<std::span<const double>> columns_;
  std::size_t m_;
  std::size_t L_;
  std::vector<std::uint32_t> arena_;
  std::vector<HeapEntry> heap_;
  std::uint64_t pops_ = 0;
  std::uint64_t pushes_ = 0;
  std::size_t last_node_ = 0;
};

/// Heap method: pops totals until one fits (Feasible, with the exact
/// confidence 1 - violations / L^m) or the violation allowance is exceeded
/// (Infeasible, confidence unknown).
EvalOutcome exact_feasibility(const Instance& instance, const Solution& solution);

/// First k popped totals; equal to the k largest combination totals.
std::vector<double> popped_sums_prefix(const Instance& instance,
                                       const Solution& solution, std::size_t k);

// ---------------------------------------------------------------------------
// Monte Carlo

inline constexpr std::uint64_t kDefaultMonteCarloDraws = 1'000'000;
inline constexpr std::uint64_t kMonteCarloChunk = 1u << 16;

/// Bootstrap estimate: each draw sums one uniformly resampled value per
/// picked item. Draws are split into fixed chunks with seeds derived from
/// `seed` and the chunk index, so the count does not depend on `workers`.
EvalOutcome monte_carlo_confidence(const Instance& instance,
                                   const Solution& solution,
                                   std::uint64_t draws, std::uint64_t seed,
                                   unsigned workers = 1);

// ---------------------------------------------------------------------------
// Fast screening and accelerated Monte Carlo

inline constexpr std::size_t kDefaultScreenTuples = 64;

/// Index tuples whose dominated-combination count prod(l_i + 1) exceeds
/// (1 - P0) * L^m. The balanced tuple comes first, then splits of the
/// prime factorization of the target count (and its next few integers)
/// across positions, then skewed tuples with one heavy coordinate.
std::vector<IndexTuple> build_screen_tuples(std::size_t num_classes,
                                            std::size_t sample_count,
                                            double confidence_level,
                                            std::size_t max_tuples = kDefaultScreenTuples);

enum class ScreenResult { Infeasible, Undecided };

/// Infeasible when some tuple's total exceeds W: every combination it
/// dominates in the descending order is at least as large, and there are
/// more of them than the allowance.
ScreenResult fast_screen(const Instance& instance, const Solution& solution,
                         std::span<const IndexTuple> tuples);

EvalOutcome accelerated_mc(const Instance& instance, const Solution& solution,
                           std::span<const IndexTuple> tuples,
                           std::uint64_t draws, std::uint64_t seed,
                           unsigned workers = 1);
EvalOutcome accelerated_mc(const Instance& instance, const Solution& solution,
                           std::uint64_t draws, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Distribution-free bounds and the Gaussian model

/// 1 - exp(-(a^2/2) / (V + C a / 3)), a = W - sum of means; 0 when a <= 0.
double bernstein_lower_bound(std::span<const MomentSummary> moments, double capacity);
/// 1 - exp(-2 a^2 / sum (b_j - a_j)^2); 0 when a <= 0.
double hoeffding_lower_bound(std::span<const MomentSummary> moments, double capacity);

double normal_cdf(double x);
/// Inverse standard normal CDF (rational approximation plus one Halley step).
double normal_quantile(double p);

/// Feasible iff sum(mu) + z_{P0} * sqrt(sum(sigma^2)) <= W. The reported
/// confidence is Phi((W - sum mu) / sqrt(sum sigma^2)).
EvalOutcome gaussian_feasibility(std::span<const MomentSummary> moments,
                                 double capacity, double confidence_level);

/// Smallest L with L >= ln 2 / (2 eps^2).
std::uint64_t required_sample_size(double epsilon);

}  // namespace ddcc
