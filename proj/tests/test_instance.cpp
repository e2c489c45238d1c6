#include <algorithm>
#include <random>
#include <sstream>

#include "ddcc/error.hpp"
#include "ddcc/instance.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ddcc;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Config;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

Instance two_class() {
  std::vector<ItemClass> cs(2);
  cs[0].items = {Item(3.5, {1, 2}), Item(0.0, {0, 4})};
  cs[1].items = {Item(1.5, {3, 1}), Item(0.0, {2, 2})};
  return Instance::create(cs, 4.0, 0.9);
}

}  // namespace

TEST_CASE("smallest legal instance loads") {
  const Instance inst = parse_instance(
      R"({"m": 1, "W": 2.0, "P0": 0.9, "L": 1, "classes": [[{"cost": 1, "samples": [2.0]}]]})");
  CHECK(inst.num_classes() == 1);
  CHECK(inst.sample_count() == 1);
  CHECK(inst.item(0, 0).cost() == 1.0);
}

TEST_CASE("class without items is rejected with its path") {
  const auto doc =
      R"({"m": 2, "W": 1, "P0": 0.9, "L": 1, "classes": [[{"cost": 1, "samples": [1]}], []]})";
  CHECK(kind_of([&] { parse_instance(doc); }) == ErrorKind::Validation);
  CHECK(message_of([&] { parse_instance(doc); }).find("classes[1]") != std::string::npos);
}

TEST_CASE("capacity below the per-class minima is rejected") {
  const auto doc =
      R"({"m": 1, "W": 0.5, "P0": 0.9, "L": 2, "classes": [[{"cost": 1, "samples": [1, 3]}]]})";
  CHECK(kind_of([&] { parse_instance(doc); }) == ErrorKind::Validation);
  CHECK(message_of([&] { parse_instance(doc); }).find("non-triviality") != std::string::npos);
}

TEST_CASE("malformed documents") {
  CHECK(kind_of([] { parse_instance("{not json"); }) == ErrorKind::Parse);
  CHECK(kind_of([] {
          parse_instance(
              R"({"m": 1, "W": 1, "P0": 0.9, "L": 1, "extra": 1, "classes": [[{"cost": 1, "samples": [1]}]]})");
        }) == ErrorKind::Validation);
  // L disagrees with the sample count of an item.
  CHECK(kind_of([] {
          parse_instance(
              R"({"m": 1, "W": 1, "P0": 0.9, "L": 2, "classes": [[{"cost": 1, "samples": [1]}]]})");
        }) == ErrorKind::Validation);
  CHECK(kind_of([] {
          parse_instance(
              R"({"m": 1, "W": 1, "P0": 0.9, "L": 1, "classes": [[{"cost": 1, "samples": [-1]}]]})");
        }) == ErrorKind::Validation);
  CHECK(kind_of([] {
          parse_instance(
              R"({"m": 1, "W": 1, "P0": 1.0, "L": 1, "classes": [[{"cost": 1, "samples": [1]}]]})");
        }) == ErrorKind::Validation);
  CHECK(kind_of([] { load_instance_file("/nonexistent/instance.json"); }) == ErrorKind::Io);
}

TEST_CASE("heterogeneous sample counts are rejected") {
  std::vector<ItemClass> cs(1);
  cs[0].items = {Item(1, {1, 2}), Item(1, {1})};
  CHECK(kind_of([&] { Instance::create(cs, 2, 0.9); }) == ErrorKind::Validation);
}

TEST_CASE("total cost") {
  const Instance inst = two_class();
  CHECK(total_cost(inst, Solution{{1, 1}}) == 0.0);
  CHECK(total_cost(inst, Solution{{0, 0}}) == 5.0);
  CHECK(kind_of([&] { total_cost(inst, Solution{{0, 2}}); }) == ErrorKind::OutOfRange);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const Instance r = oracle::random_instance(rng, {3, 5, 4});
    const Solution s = oracle::random_solution(rng, r);
    CHECK(total_cost(r, s) == doctest::Approx(oracle::cost(r, s)).epsilon(1e-12));
  }
}

TEST_CASE("validate_solution") {
  const Instance inst = two_class();
  auto e = validate_solution(inst, Solution{{0}});
  REQUIRE(e);
  CHECK(e->class_index == 2);
  e = validate_solution(inst, Solution{{0, 2}});
  REQUIRE(e);
  CHECK(e->class_index == 1);
  CHECK_FALSE(validate_solution(inst, Solution{{1, 0}}));
}

TEST_CASE("samples_desc is a sorted permutation") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const Instance inst = oracle::random_instance(rng);
    for (const auto& c : inst.classes()) {
      for (const auto& it : c.items) {
        std::vector<double> a(it.samples().begin(), it.samples().end());
        std::vector<double> d(it.samples_desc().begin(), it.samples_desc().end());
        CHECK(std::is_sorted(d.rbegin(), d.rend()));
        std::sort(a.begin(), a.end(), std::greater<>());
        CHECK(a == d);
      }
    }
  }
}

TEST_CASE("serialization round-trips bit-identically") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    std::vector<ItemClass> cs(1 + rng() % 3);
    const std::size_t L = 1 + rng() % 6;
    double lo = 0, hi = 0;
    for (auto& c : cs) {
      double cmin = 1e300, cmax = 0;
      for (std::size_t j = 0, n = 1 + rng() % 4; j < n; ++j) {
        std::vector<double> s(L);
        for (auto& x : s) {
          x = u(rng) * 1e3 / 7.0;
          cmin = std::min(cmin, x);
          cmax = std::max(cmax, x);
        }
        c.items.emplace_back(u(rng) / 3.0, s);
      }
      lo += cmin;
      hi += cmax;
    }
    const Instance a = Instance::create(cs, 0.5 * (lo + hi), 0.95);
    const Instance b = parse_instance(serialize_instance(a));
    REQUIRE(a.num_classes() == b.num_classes());
    CHECK(a.capacity() == b.capacity());
    CHECK(a.confidence_level() == b.confidence_level());
    for (std::size_t i = 0; i < a.num_classes(); ++i) {
      for (std::size_t j = 0; j < a.cls(i).size(); ++j) {
        CHECK(a.item(i, j).cost() == b.item(i, j).cost());
        CHECK(std::equal(a.item(i, j).samples().begin(), a.item(i, j).samples().end(),
                         b.item(i, j).samples().begin()));
      }
    }
  }
}

TEST_CASE("solution documents") {
  const Solution s{{3, 0, 2}};
  CHECK(parse_solution(serialize_solution(s)) == s);
  CHECK(kind_of([] { parse_solution(R"({"picks": [1, -2]})"); }) != ErrorKind::Io);
  CHECK(kind_of([] { parse_solution(R"({"pick": [1]})"); }) == ErrorKind::Validation);
}

TEST_CASE("capacity band is re-checkable") {
  const Instance inst = two_class();
  CHECK(inst.capacity_lower_bound() == 1.0);
  CHECK(inst.capacity_upper_bound() == 7.0);
  CHECK(inst.is_nontrivial());
  CHECK(inst.with_capacity(7.0).capacity() == 7.0);
  CHECK(kind_of([&] { inst.with_capacity(7.5); }) == ErrorKind::Validation);
}
