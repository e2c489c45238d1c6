#include "ddcc/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ddcc/error.hpp"
#include "ddcc/parallel.hpp"
#include "json.hpp"

namespace ddcc {

using json = nlohmann::json;

namespace {

constexpr int kMomentRetries = 10000;
constexpr std::uint64_t kTruthChunk = 1u << 16;

struct PresetRow {
  const char* id;
  std::size_t m, n, L;
  double lab[2];
  double app[2];
};

constexpr PresetRow kPresets[] = {
    {"ss1", 3, 5, 30, {11, 14}, {21, 27}},
    {"ss2", 4, 5, 30, {18, 26}, {47, 49}},
    {"ss3", 5, 5, 30, {11, 20}, {27, 38}},
    {"ss4", 5, 10, 30, {10, 16}, {16, 27}},
    {"ls1", 10, 10, 500, {19, 23}, {32, 37}},
    {"ls2", 10, 20, 500, {12, 15}, {13, 16}},
    {"ls3", 20, 10, 500, {25, 32}, {43, 48}},
    {"ls4", 30, 10, 500, {43, 52}, {58, 70}},
    {"ls5", 40, 10, 500, {55, 63}, {85, 95}},
    {"ls6", 50, 10, 500, {63, 75}, {91, 100}},
};

// Family drawn uniformly, then moments from the family's ranges until the
// family can realize them.
DistributionSpec draw_lab_distribution(Rng& rng) {
  const Family family = kAllFamilies[uniform_index(rng, std::size(kAllFamilies))];
  for (int attempt = 0; attempt < kMomentRetries; ++attempt) {
    double mean, variance;
    if (family == Family::Gamma) {
      mean = uniform_real(rng, 0.5, 2.5);
      variance = uniform_real(rng, 0.05, 0.625);
    } else {
      mean = uniform_real(rng, 2.0, 8.0);
      variance = uniform_real(rng, 1.0, 19.0);
    }
    if (auto spec = solve_distribution(family, mean, variance)) return *spec;
  }
  throw Error(ErrorKind::Validation,
              std::string("cannot realize moments for family ") + to_string(family));
}

int draw_attempt(Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    acc += kAttemptProbabilities[k];
    if (u < acc) return k + 1;
  }
  return 4;
}

double sample_true_delay_item(const ItemTruth& t, Rng& rng) {
  const double x = sample(t.base, rng);
  if (!t.retransmission) return x;
  return std::min(kAttemptWindow, t.scale * x) + kAttemptWindow * (draw_attempt(rng) - 1);
}

void validate_spec(const BenchmarkSpec& spec) {
  if (spec.m == 0 || spec.n == 0 || spec.L == 0) {
    throw Error(ErrorKind::Config, "benchmark sizes m, N, L must be positive");
  }
  if (!(spec.confidence_level > 0.0 && spec.confidence_level < 1.0)) {
    throw Error(ErrorKind::Config, "P0 must lie in (0, 1)");
  }
  if (!std::isfinite(spec.capacity) || spec.capacity < 0.0) {
    throw Error(ErrorKind::Config, "capacity must be finite and nonnegative");
  }
}

GeneratedBenchmark assemble(const BenchmarkSpec& spec, std::uint64_t seed,
                            std::vector<ItemClass> classes, TruthModel truth) {
  double lo = 0.0, hi = 0.0;
  for (const auto& c : classes) {
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    for (const auto& it : c.items) {
      cmin = std::min(cmin, it.min_sample());
      cmax = std::max(cmax, it.max_sample());
    }
    lo += cmin;
    hi += cmax;
  }
  const double w = std::clamp(spec.capacity, lo, hi);
  truth.capacity = w;
  truth.confidence_level = spec.confidence_level;
  truth.seed = seed;
  GeneratedBenchmark g{Instance::create(std::move(classes), w, spec.confidence_level),
                       std::move(truth), spec.capacity, w != spec.capacity};
  return g;
}

}  // namespace

const char* to_string(BenchmarkFamily family) {
  return family == BenchmarkFamily::Lab ? "LAB" : "APP";
}

BenchmarkFamily parse_benchmark_family(const std::string& name) {
  if (name == "LAB" || name == "lab") return BenchmarkFamily::Lab;
  if (name == "APP" || name == "app") return BenchmarkFamily::App;
  throw Error(ErrorKind::Parse, "unknown benchmark family \"" + name + "\"");
}

int sample_attempt(Rng& rng) { return draw_attempt(rng); }

double sample_true_delay(const TruthModel& truth, std::size_t i, std::size_t j, Rng& rng) {
  return sample_true_delay_item(truth.items.at(i).at(j), rng);
}

GeneratedBenchmark generate_lab(const BenchmarkSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  Rng rng(seed);
  TruthModel truth;
  truth.family = BenchmarkFamily::Lab;
  std::vector<ItemClass> classes(spec.m);
  truth.items.resize(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) {
    for (std::size_t j = 0; j < spec.n; ++j) {
      ItemTruth t{draw_lab_distribution(rng), false, 1.0};
      const double cost = uniform_real(rng, 1.0, 10.0);
      std::vector<double> samples(spec.L);
      for (auto& x : samples) x = sample(t.base, rng);
      classes[i].items.emplace_back(cost, std::move(samples));
      truth.items[i].push_back(std::move(t));
    }
  }
  return assemble(spec, seed, std::move(classes), std::move(truth));
}

GeneratedBenchmark generate_app(const BenchmarkSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  Rng rng(seed);
  TruthModel truth;
  truth.family = BenchmarkFamily::App;
  std::vector<ItemClass> classes(spec.m);
  truth.items.resize(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) {
    for (std::size_t j = 0; j < spec.n; ++j) {
      ItemTruth t{draw_lab_distribution(rng), true, 1.0};
      // Squash so that the bulk of the draw (mean + 3 sd) fits in one window.
      const double reach = t.base.mean + 3.0 * std::sqrt(t.base.variance);
      t.scale = kAttemptWindow / std::max(kAttemptWindow, reach);
      std::vector<double> samples(spec.L);
      for (auto& x : samples) x = sample_true_delay_item(t, rng);
      double mean = 0.0;
      for (double x : samples) mean += x;
      mean /= static_cast<double>(samples.size());
      double var = 0.0;
      for (double x : samples) var += (x - mean) * (x - mean);
      var /= static_cast<double>(samples.size());
      const double cost = 10.0 / (mean + std::sqrt(var)) * uniform_real(rng, 0.8, 1.2);
      classes[i].items.emplace_back(cost, std::move(samples));
      truth.items[i].push_back(std::move(t));
    }
  }
  return assemble(spec, seed, std::move(classes), std::move(truth));
}

GeneratedBenchmark generate(const BenchmarkSpec& spec, std::uint64_t seed) {
  return spec.family == BenchmarkFamily::Lab ? generate_lab(spec, seed)
                                             : generate_app(spec, seed);
}

double real_confidence(const TruthModel& truth, const Solution& solution,
                       std::uint64_t draws, std::uint64_t seed, unsigned workers) {
  if (draws == 0) throw Error(ErrorKind::OutOfRange, "draws must be positive");
  if (solution.picks.size() != truth.items.size()) {
    throw Error(ErrorKind::OutOfRange, "solution length does not match the truth model");
  }
  std::vector<const ItemTruth*> picked;
  for (std::size_t i = 0; i < solution.picks.size(); ++i) {
    if (solution.picks[i] >= truth.items[i].size()) {
      throw Error(ErrorKind::OutOfRange,
                  "class " + std::to_string(i) + ": pick out of range");
    }
    picked.push_back(&truth.items[i][solution.picks[i]]);
  }
  const double w = truth.capacity;
  const std::uint64_t fit = sum_over_chunks(
      draws, kTruthChunk, workers, [&](std::uint64_t c, std::uint64_t n) {
        Rng rng(derive_seed(seed, c));
        std::uint64_t count = 0;
        for (std::uint64_t d = 0; d < n; ++d) {
          double total = 0.0;
          for (const ItemTruth* t : picked) total += sample_true_delay_item(*t, rng);
          count += total <= w ? 1 : 0;
        }
        return count;
      });
  return static_cast<double>(fit) / static_cast<double>(draws);
}

std::vector<BenchmarkSpec> preset_benchmarks() {
  std::vector<BenchmarkSpec> out;
  for (BenchmarkFamily fam : {BenchmarkFamily::Lab, BenchmarkFamily::App}) {
    for (const auto& row : kPresets) {
      const double* caps = fam == BenchmarkFamily::Lab ? row.lab : row.app;
      for (int k = 0; k < 2; ++k) {
        BenchmarkSpec s;
        s.family = fam;
        s.m = row.m;
        s.n = row.n;
        s.L = row.L;
        s.capacity = caps[k];
        s.name = std::string(to_string(fam)) + "-" + row.id + "-" +
                 std::to_string(static_cast<int>(caps[k]));
        out.push_back(s);
      }
    }
  }
  return out;
}

BenchmarkSpec find_preset(const std::string& name) {
  for (const auto& s : preset_benchmarks()) {
    if (s.name == name) return s;
  }
  throw Error(ErrorKind::Config, "unknown preset \"" + name + "\"");
}

std::string serialize_truth(const TruthModel& truth) {
  json classes = json::array();
  for (const auto& cls : truth.items) {
    json jc = json::array();
    for (const auto& t : cls) {
      jc.push_back({{"family", to_string(t.base.family)},
                    {"mean", t.base.mean},
                    {"variance", t.base.variance},
                    {"params", t.base.params},
                    {"retransmission", t.retransmission},
                    {"scale", t.scale}});
    }
    classes.push_back(std::move(jc));
  }
  json doc = {{"benchmark", to_string(truth.family)},
              {"W", truth.capacity},
              {"P0", truth.confidence_level},
              {"seed", truth.seed},
              {"classes", std::move(classes)}};
  return doc.dump(2) + "\n";
}

TruthModel parse_truth(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  try {
    TruthModel truth;
    truth.family = parse_benchmark_family(doc.at("benchmark").get<std::string>());
    truth.capacity = doc.at("W").get<double>();
    truth.confidence_level = doc.at("P0").get<double>();
    truth.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& jc : doc.at("classes")) {
      std::vector<ItemTruth> cls;
      for (const auto& ji : jc) {
        ItemTruth t;
        t.base.family = parse_family(ji.at("family").get<std::string>());
        t.base.mean = ji.at("mean").get<double>();
        t.base.variance = ji.at("variance").get<double>();
        t.base.params = ji.at("params").get<std::vector<double>>();
        t.retransmission = ji.at("retransmission").get<bool>();
        t.scale = ji.at("scale").get<double>();
        const std::size_t want = t.base.family == Family::Bimodal ? 3 : 2;
        if (t.base.params.size() != want) {
          throw Error(ErrorKind::Validation, "truth item has the wrong parameter count");
        }
        cls.push_back(std::move(t));
      }
      truth.items.push_back(std::move(cls));
    }
    return truth;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("truth file: ") + e.what());
  }
}

TruthModel load_truth_file(const std::string& path) { return parse_truth(read_text_file(path)); }

void save_truth_file(const TruthModel& truth, const std::string& path) {
  write_text_file(path, serialize_truth(truth));
}

}  // namespace ddcc
