#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ddcc {

/// One selectable option inside a class: a fixed cost plus the observed
/// weight samples. `samples_desc()` is the same data sorted non-increasing,
/// cached at construction because the heap evaluator and the screening test
/// both walk it in that order.
class Item {
 public:
  Item() = default;
  Item(double cost, std::vector<double> samples);

  double cost() const { return cost_; }
  std::span<const double> samples() const { return samples_; }
  std::span<const double> samples_desc() const { return samples_desc_; }
  std::size_t sample_count() const { return samples_.size(); }

  double min_sample() const;
  double max_sample() const;

 private:
  double cost_ = 0.0;
  std::vector<double> samples_;
  std::vector<double> samples_desc_;
};

struct ItemClass {
  std::vector<Item> items;

  std::size_t size() const { return items.size(); }
};

/// Pick vector: `picks[i]` is the selected item index of class i.
struct Solution {
  std::vector<std::size_t> picks;

  friend bool operator==(const Solution&, const Solution&) = default;
  friend auto operator<=>(const Solution&, const Solution&) = default;
};

struct SolutionHash {
  std::size_t operator()(const Solution& s) const;
};

/// Immutable problem data. Construct through `Instance::create` (or the
/// loaders), which validates every invariant; a constructed Instance is
/// always consistent.
class Instance {
 public:
  static Instance create(std::vector<ItemClass> classes, double capacity,
                         double confidence_level);

  std::size_t num_classes() const { return classes_.size(); }
  std::size_t sample_count() const { return sample_count_; }
  double capacity() const { return capacity_; }
  double confidence_level() const { return confidence_level_; }

  const std::vector<ItemClass>& classes() const { return classes_; }
  const ItemClass& cls(std::size_t i) const { return classes_.at(i); }
  const Item& item(std::size_t i, std::size_t j) const {
    return classes_.at(i).items.at(j);
  }
  // Unchecked access for hot loops; the solution must already be validated.
  const Item& picked(const Solution& s, std::size_t i) const {
    return classes_[i].items[s.picks[i]];
  }

  /// Largest class size (N).
  std::size_t max_class_size() const;
  /// Number of distinct solutions, saturating at SIZE_MAX.
  std::size_t solution_space_size() const;

  /// Lower and upper end of the non-trivial capacity band: the sums of the
  /// per-class smallest and largest samples.
  double capacity_lower_bound() const;
  double capacity_upper_bound() const;
  bool is_nontrivial() const;

  /// Copy with a different capacity; the band check is re-run.
  Instance with_capacity(double capacity) const;
  /// Copy with a different confidence level.
  Instance with_confidence_level(double confidence_level) const;

 private:
  Instance() = default;
  void validate() const;

  std::vector<ItemClass> classes_;
  double capacity_ = 0.0;
  double confidence_level_ = 0.99;
  std::size_t sample_count_ = 0;
};

double total_cost(const Instance& instance, const Solution& solution);

/// Offending class for a bad solution; `class_index == num_classes` when the
/// pick vector has the wrong length.
struct SolutionError {
  std::size_t class_index;
  std::string message;
};

std::optional<SolutionError> validate_solution(const Instance& instance,
                                               const Solution& solution);
/// Throws Error(OutOfRange) carrying the SolutionError message.
void require_valid(const Instance& instance, const Solution& solution);

// Instance document: {"m", "W", "P0", "L", "classes": [[{"cost", "samples"}]]}
Instance load_instance(std::istream& in);
Instance load_instance_file(const std::string& path);
Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& instance);
void save_instance_file(const Instance& instance, const std::string& path);

// Solution document: {"picks": [...]}
Solution parse_solution(const std::string& text);
Solution load_solution_file(const std::string& path);
std::string serialize_solution(const Solution& solution);

}  // namespace ddcc
