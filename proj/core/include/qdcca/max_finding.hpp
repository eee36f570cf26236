#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "qdcca/linalg.hpp"
#include "qdcca/random.hpp"

namespace qdcca {

using ValueOracle = std::function<Real(std::size_t)>;

struct MaxFindResult {
    std::size_t index = 0;
    Real value = 0;
    std::uint64_t queries = 0;        // summed over repetitions
    std::uint64_t max_run_queries = 0;
    bool tie = false;  // another item carries the same value
};

/// Expected-query budget of one threshold-search run over n items.
Real max_find_budget(std::size_t n_items);

/// Iterative-threshold maximum search: Grover searches with randomly chosen iteration counts
/// (growth factor 6/5) look for an item above the current threshold until the per-run budget
/// is spent. Grover sampling is simulated in closed form. The best of `repetitions` runs is
/// returned, ties going to the lowest index. Items valued -infinity are never returned unless
/// every item is.
MaxFindResult max_find(const ValueOracle &values, std::size_t n_items, std::size_t repetitions, Rng &rng);

}  // namespace qdcca
