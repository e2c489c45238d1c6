#pragma once

// LAB (mixed synthetic distributions) and APP (end-to-end delay with up to
// four transmission attempts) benchmark generators. Each instance comes with
// a TruthModel that holds the generating distributions; solvers only ever
// see the samples, the harness uses the truth to measure real confidence.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ddcc/distributions.hpp"
#include "ddcc/instance.hpp"
#include "ddcc/rng.hpp"

namespace ddcc {

enum class BenchmarkFamily { Lab, App };

const char* to_string(BenchmarkFamily family);
BenchmarkFamily parse_benchmark_family(const std::string& name);

struct BenchmarkSpec {
  std::string name;  // e.g. "LAB-ss1-11"; empty for custom sizes
  BenchmarkFamily family = BenchmarkFamily::Lab;
  std::size_t m = 3;
  std::size_t n = 5;
  std::size_t L = 30;
  double capacity = 11.0;
  double confidence_level = 0.99;
};

/// Attempt k (1-based) adds 10 * (k - 1) to the first-attempt delay. The
/// four weights are normalized by their total, which is already 1.
inline constexpr double kAttemptTotal = 0.9 + 0.09 + 0.009 + 0.001;
inline constexpr double kAttemptProbabilities[4] = {0.9 / kAttemptTotal, 0.09 / kAttemptTotal,
                                                    0.009 / kAttemptTotal,
                                                    0.001 / kAttemptTotal};
inline constexpr double kAttemptWindow = 10.0;

struct ItemTruth {
  DistributionSpec base;
  bool retransmission = false;  // APP items
  double scale = 1.0;           // first-attempt delay = min(10, scale * X)
};

struct TruthModel {
  BenchmarkFamily family = BenchmarkFamily::Lab;
  double capacity = 0.0;
  double confidence_level = 0.99;
  std::uint64_t seed = 0;
  std::vector<std::vector<ItemTruth>> items;
};

struct GeneratedBenchmark {
  Instance instance;
  TruthModel truth;
  double requested_capacity = 0.0;
  bool capacity_clamped = false;  // requested W fell outside the non-trivial band
};

GeneratedBenchmark generate_lab(const BenchmarkSpec& spec, std::uint64_t seed);
GeneratedBenchmark generate_app(const BenchmarkSpec& spec, std::uint64_t seed);
GeneratedBenchmark generate(const BenchmarkSpec& spec, std::uint64_t seed);

/// One draw of the true weight of item (i, j).
double sample_true_delay(const TruthModel& truth, std::size_t i, std::size_t j, Rng& rng);
/// Attempt number (1..4) for one APP draw.
int sample_attempt(Rng& rng);

/// Fraction of `draws` independent true totals that are <= W. Draws are
/// split into fixed chunks with derived seeds; `workers` does not change the
/// result.
double real_confidence(const TruthModel& truth, const Solution& solution,
                       std::uint64_t draws, std::uint64_t seed, unsigned workers = 1);

/// The 20 LAB and 20 APP rows (each benchmark size with both capacities).
std::vector<BenchmarkSpec> preset_benchmarks();
BenchmarkSpec find_preset(const std::string& name);

std::string serialize_truth(const TruthModel& truth);
TruthModel parse_truth(const std::string& text);
TruthModel load_truth_file(const std::string& path);
void save_truth_file(const TruthModel& truth, const std::string& path);

}  // namespace ddcc
