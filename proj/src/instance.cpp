#include "ddcc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "ddcc/error.hpp"
#include "json.hpp"

namespace ddcc {

using nlohmann::json;

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse_error";
    case ErrorKind::Validation: return "validation_error";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::Guard: return "guard_limit";
    case ErrorKind::Io: return "io_error";
    case ErrorKind::Config: return "config_error";
  }
  return "error";
}

Item::Item(double cost, std::vector<double> samples)
    : cost_(cost), samples_(std::move(samples)), samples_desc_(samples_) {
  // stable_sort keeps ties in original sample order
  std::stable_sort(samples_desc_.begin(), samples_desc_.end(),
                   std::greater<double>());
}

double Item::min_sample() const {
  return samples_desc_.empty() ? 0.0 : samples_desc_.back();
}

double Item::max_sample() const {
  return samples_desc_.empty() ? 0.0 : samples_desc_.front();
}

std::size_t SolutionHash::operator()(const Solution& s) const {
  std::size_t h = 0xcbf29ce484222325ull;
  for (std::size_t p : s.picks) {
    h ^= p + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorKind::Validation, message);
}

}  // namespace

Instance Instance::create(std::vector<ItemClass> classes, double capacity,
                          double confidence_level) {
  Instance inst;
  inst.classes_ = std::move(classes);
  inst.capacity_ = capacity;
  inst.confidence_level_ = confidence_level;
  inst.sample_count_ = (!inst.classes_.empty() && !inst.classes_[0].items.empty())
                           ? inst.classes_[0].items[0].sample_count()
                           : 0;
  inst.validate();
  return inst;
}

void Instance::validate() const {
  if (classes_.empty()) invalid("m: instance must have at least one class");
  if (!std::isfinite(capacity_) || capacity_ < 0.0) {
    invalid("W: capacity must be a finite nonnegative number");
  }
  if (!(confidence_level_ > 0.0 && confidence_level_ < 1.0)) {
    invalid("P0: confidence level must lie in (0,1)");
  }
  if (sample_count_ == 0) invalid("L: sample count must be positive");
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& items = classes_[i].items;
    if (items.empty()) {
      invalid("classes[" + std::to_string(i) + "]: class has no items");
    }
    for (std::size_t j = 0; j < items.size(); ++j) {
      const Item& it = items[j];
      const std::string path =
          "classes[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      if (!std::isfinite(it.cost()) || it.cost() < 0.0) {
        invalid(path + ".cost: must be a finite nonnegative number");
      }
      if (it.sample_count() != sample_count_) {
        invalid(path + ".samples: expected " + std::to_string(sample_count_) +
                " samples, found " + std::to_string(it.sample_count()));
      }
      for (std::size_t l = 0; l < it.sample_count(); ++l) {
        const double d = it.samples()[l];
        if (!std::isfinite(d) || d < 0.0) {
          invalid(path + ".samples[" + std::to_string(l) +
                  "]: must be a finite nonnegative number");
        }
      }
    }
  }
  if (!is_nontrivial()) {
    std::ostringstream os;
    os.precision(17);
    os << "W: non-triviality violated, capacity " << capacity_
       << " outside [" << capacity_lower_bound() << ", "
       << capacity_upper_bound() << "]";
    invalid(os.str());
  }
}

std::size_t Instance::max_class_size() const {
  std::size_t n = 0;
  for (const auto& c : classes_) n = std::max(n, c.size());
  return n;
}

std::size_t Instance::solution_space_size() const {
  std::size_t total = 1;
  for (const auto& c : classes_) {
    if (total > std::numeric_limits<std::size_t>::max() / c.size()) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= c.size();
  }
  return total;
}

double Instance::capacity_lower_bound() const {
  double sum = 0.0;
  for (const auto& c : classes_) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& it : c.items) lo = std::min(lo, it.min_sample());
    sum += lo;
  }
  return sum;
}

double Instance::capacity_upper_bound() const {
  double sum = 0.0;
  for (const auto& c : classes_) {
    double hi = 0.0;
    for (const auto& it : c.items) hi = std::max(hi, it.max_sample());
    sum += hi;
  }
  return sum;
}

bool Instance::is_nontrivial() const {
  return capacity_lower_bound() <= capacity_ &&
         capacity_ <= capacity_upper_bound();
}

Instance Instance::with_capacity(double capacity) const {
  Instance copy = *this;
  copy.capacity_ = capacity;
  copy.validate();
  return copy;
}

Instance Instance::with_confidence_level(double confidence_level) const {
  Instance copy = *this;
  copy.confidence_level_ = confidence_level;
  copy.validate();
  return copy;
}

double total_cost(const Instance& instance, const Solution& solution) {
  require_valid(instance, solution);
  double sum = 0.0;
  for (std::size_t i = 0; i < solution.picks.size(); ++i) {
    sum += instance.picked(solution, i).cost();
  }
  return sum;
}

std::optional<SolutionError> validate_solution(const Instance& instance,
                                               const Solution& solution) {
  const std::size_t m = instance.num_classes();
  if (solution.picks.size() != m) {
    return SolutionError{m, "picks: expected " + std::to_string(m) +
                                " entries, found " +
                                std::to_string(solution.picks.size())};
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (solution.picks[i] >= instance.cls(i).size()) {
      return SolutionError{
          i, "picks[" + std::to_string(i) + "]: item " +
                 std::to_string(solution.picks[i]) + " out of range for class of " +
                 std::to_string(instance.cls(i).size()) + " items"};
    }
  }
  return std::nullopt;
}

void require_valid(const Instance& instance, const Solution& solution) {
  if (auto err = validate_solution(instance, solution)) {
    throw Error(ErrorKind::OutOfRange, err->message);
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> keys,
                         const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) {
      throw Error(ErrorKind::Validation,
                  path + ": unknown key \"" + it.key() + "\"");
    }
  }
}

const json& require_key(const json& obj, const char* key,
                        const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorKind::Validation, path + ": missing key \"" + key + "\"");
  }
  return *it;
}

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) {
    throw Error(ErrorKind::Validation, path + ": expected a number");
  }
  return v.get<double>();
}

std::size_t require_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorKind::Validation,
                path + ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << content;
}

Instance parse_instance(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) {
    throw Error(ErrorKind::Validation, "$: expected an object");
  }
  reject_unknown_keys(doc, {"m", "W", "P0", "L", "classes"}, "$");
  const std::size_t m = require_count(require_key(doc, "m", "$"), "m");
  const double w = require_number(require_key(doc, "W", "$"), "W");
  const double p0 = require_number(require_key(doc, "P0", "$"), "P0");
  const std::size_t l = require_count(require_key(doc, "L", "$"), "L");
  const json& jclasses = require_key(doc, "classes", "$");
  if (!jclasses.is_array()) {
    throw Error(ErrorKind::Validation, "classes: expected an array");
  }
  if (jclasses.size() != m) {
    throw Error(ErrorKind::Validation,
                "classes: m = " + std::to_string(m) + " but " +
                    std::to_string(jclasses.size()) + " classes given");
  }
  if (l == 0) throw Error(ErrorKind::Validation, "L: must be positive");

  std::vector<ItemClass> classes(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::string cpath = "classes[" + std::to_string(i) + "]";
    const json& jc = jclasses[i];
    if (!jc.is_array()) {
      throw Error(ErrorKind::Validation, cpath + ": expected an array");
    }
    if (jc.empty()) {
      throw Error(ErrorKind::Validation, cpath + ": class has no items");
    }
    for (std::size_t j = 0; j < jc.size(); ++j) {
      const std::string ipath = cpath + "[" + std::to_string(j) + "]";
      const json& ji = jc[j];
      if (!ji.is_object()) {
        throw Error(ErrorKind::Validation, ipath + ": expected an object");
      }
      reject_unknown_keys(ji, {"cost", "samples"}, ipath);
      const double cost =
          require_number(require_key(ji, "cost", ipath), ipath + ".cost");
      const json& js = require_key(ji, "samples", ipath);
      if (!js.is_array()) {
        throw Error(ErrorKind::Validation, ipath + ".samples: expected an array");
      }
      if (js.size() != l) {
        throw Error(ErrorKind::Validation,
                    ipath + ".samples: expected L = " + std::to_string(l) +
                        " samples, found " + std::to_string(js.size()));
      }
      std::vector<double> samples;
      samples.reserve(l);
      for (std::size_t k = 0; k < js.size(); ++k) {
        samples.push_back(require_number(
            js[k], ipath + ".samples[" + std::to_string(k) + "]"));
      }
      classes[i].items.emplace_back(cost, std::move(samples));
    }
  }
  return Instance::create(std::move(classes), w, p0);
}

Instance load_instance(std::istream& in) {
  std::ostringstream os;
  os << in.rdbuf();
  return parse_instance(os.str());
}

Instance load_instance_file(const std::string& path) {
  return parse_instance(read_text_file(path));
}

std::string serialize_instance(const Instance& instance) {
  json doc;
  doc["m"] = instance.num_classes();
  doc["W"] = instance.capacity();
  doc["P0"] = instance.confidence_level();
  doc["L"] = instance.sample_count();
  json classes = json::array();
  for (const auto& c : instance.classes()) {
    json jc = json::array();
    for (const auto& it : c.items) {
      json samples(std::vector<double>(it.samples().begin(), it.samples().end()));
      jc.push_back({{"cost", it.cost()}, {"samples", std::move(samples)}});
    }
    classes.push_back(std::move(jc));
  }
  doc["classes"] = std::move(classes);
  return doc.dump() + "\n";
}

void save_instance_file(const Instance& instance, const std::string& path) {
  write_text_file(path, serialize_instance(instance));
}

Solution parse_solution(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) {
    throw Error(ErrorKind::Validation, "$: expected an object");
  }
  reject_unknown_keys(doc, {"picks"}, "$");
  const json& jp = require_key(doc, "picks", "$");
  if (!jp.is_array()) {
    throw Error(ErrorKind::Validation, "picks: expected an array");
  }
  Solution s;
  for (std::size_t i = 0; i < jp.size(); ++i) {
    s.picks.push_back(require_count(jp[i], "picks[" + std::to_string(i) + "]"));
  }
  return s;
}

Solution load_solution_file(const std::string& path) {
  return parse_solution(read_text_file(path));
}

std::string serialize_solution(const Solution& solution) {
  json doc;
  doc["picks"] = solution.picks;
  return doc.dump() + "\n";
}

}  // namespace ddcc
