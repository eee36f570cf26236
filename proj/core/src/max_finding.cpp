#include "qdcca/max_finding.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qdcca {

namespace {

struct RunResult {
    std::size_t index;
    std::uint64_t queries;
};

std::size_t uniform_index(Rng &rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

RunResult threshold_search(const std::vector<Real> &v, Rng &rng) {
    const std::size_t n = v.size();
    const auto budget = static_cast<std::uint64_t>(std::floor(max_find_budget(n)));
    const Real cap = std::sqrt(static_cast<Real>(n));
    std::size_t best = uniform_index(rng, n);
    std::uint64_t queries = 0;

    std::vector<std::size_t> marked;
    std::vector<std::size_t> unmarked;
    while (queries < budget) {
        marked.clear();
        unmarked.clear();
        for (std::size_t i = 0; i < n; ++i) {
            (v[i] > v[best] ? marked : unmarked).push_back(i);
        }
        const Real theta = std::asin(std::sqrt(static_cast<Real>(marked.size()) / static_cast<Real>(n)));
        Real m = 1.0;
        bool improved = false;
        while (queries < budget) {
            const auto upper = static_cast<std::uint64_t>(std::ceil(m));
            auto iterations = std::uniform_int_distribution<std::uint64_t>(0, upper - 1)(rng);
            iterations = std::min(iterations, budget - queries);
            queries += iterations;
            const Real s = std::sin(static_cast<Real>(2 * iterations + 1) * theta);
            if (!marked.empty() && uniform01(rng) < s * s) {
                best = marked[uniform_index(rng, marked.size())];
                improved = true;
                break;
            }
            if (queries < budget) {
                ++queries;  // checking the measured item against the threshold
            }
            m = std::min(m * 6.0 / 5.0, cap);
        }
        if (!improved) {
            break;
        }
    }
    return {best, queries};
}

}  // namespace

Real max_find_budget(std::size_t n_items) {
    const Real n = static_cast<Real>(n_items);
    const Real lg = n_items > 1 ? std::log2(n) : 0.0;
    return 22.5 * std::sqrt(n) + 1.4 * lg * lg;
}

MaxFindResult max_find(const ValueOracle &values, std::size_t n_items, std::size_t repetitions, Rng &rng) {
    if (n_items == 0) {
        throw std::invalid_argument("max_find needs at least one item");
    }
    if (repetitions == 0) {
        throw std::invalid_argument("max_find needs at least one repetition");
    }
    std::vector<Real> v(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
        v[i] = values(i);
    }
    MaxFindResult out;
    out.value = -std::numeric_limits<Real>::infinity();
    bool first = true;
    for (std::size_t r = 0; r < repetitions; ++r) {
        const auto run = threshold_search(v, rng);
        out.queries += run.queries;
        out.max_run_queries = std::max(out.max_run_queries, run.queries);
        const Real value = v[run.index];
        if (first || value > out.value || (value == out.value && run.index < out.index)) {
            out.index = run.index;
            out.value = value;
            first = false;
        }
    }
    // Audit only: lowest index carrying the winning value, and whether it is shared.
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_items; ++i) {
        if (v[i] == out.value) {
            if (count == 0) {
                out.index = i;
            }
            ++count;
        }
    }
    out.tie = count > 1;
    return out;
}

}  // namespace qdcca
