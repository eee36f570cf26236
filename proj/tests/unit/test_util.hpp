#pragma once

#include <random>
#include <vector>

#include "qdcca/dataset.hpp"

namespace testutil {

// Gaussian entries with a class offset, roughly balanced class sizes, every class non-empty.
inline qdcca::PairedDataset random_dataset(std::mt19937_64 &rng, std::size_t p, std::size_t q, std::size_t n,
                                           std::size_t c, double offset = 1.0) {
    std::vector<std::size_t> sizes(c, n / c);
    for (std::size_t i = 0; i < n % c; ++i) {
        ++sizes[i];
    }
    std::normal_distribution<double> g;
    qdcca::Matrix a(p, n), b(q, n);
    std::size_t col = 0;
    for (std::size_t cls = 0; cls < c; ++cls) {
        qdcca::Vector shift_a(p), shift_b(q);
        for (auto &v : shift_a) v = offset * g(rng);
        for (auto &v : shift_b) v = offset * g(rng);
        for (std::size_t j = 0; j < sizes[cls]; ++j, ++col) {
            for (std::size_t r = 0; r < p; ++r) a(r, col) = shift_a(r) + g(rng);
            for (std::size_t r = 0; r < q; ++r) b(r, col) = shift_b(r) + g(rng);
        }
    }
    return qdcca::PairedDataset(a, b, sizes);
}

}  // namespace testutil
