#include "ddcc/rng.hpp"

#include "ddcc/instance.hpp"

namespace ddcc {

std::uint64_t solution_seed(std::uint64_t base, const Solution& solution) {
  std::uint64_t h = mix64(base);
  for (std::size_t p : solution.picks) h = mix64(h ^ static_cast<std::uint64_t>(p));
  return h;
}

}  // namespace ddcc
