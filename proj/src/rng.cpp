#include "ldp/rng.hpp"

#include <algorithm>
#include <numeric>

#include "ldp/errors.hpp"

namespace ldp {

std::vector<std::size_t> sample_indices(std::size_t total, std::size_t n, std::uint64_t seed) {
  if (n > total) throw NotEnoughLines("requested " + std::to_string(n) + " of " + std::to_string(total));
  std::vector<std::size_t> indices(total);
  std::iota(indices.begin(), indices.end(), 0);
  Rng rng(seed);
  rng.shuffle(indices);
  indices.resize(n);
  std::sort(indices.begin(), indices.end());
  return indices;
}

}  // namespace ldp
