#pragma once

#include <cstdint>

#include "qdcca/linalg.hpp"

namespace qdcca {

/// Two's-complement fixed point: one sign bit, integer_bits, fraction_bits.
struct FixedPointFormat {
    unsigned integer_bits = 4;
    unsigned fraction_bits = 7;

    unsigned width() const { return 1 + integer_bits + fraction_bits; }
    Real resolution() const;
    Real max_value() const;
    Real min_value() const;

    bool representable(Real value) const;
    bool exact(Real value) const;
    /// Rounds to the nearest grid point; throws std::overflow_error outside the range.
    std::uint64_t encode(Real value) const;
    Real decode(std::uint64_t bits) const;
    Real round(Real value) const { return decode(encode(value)); }

    /// Smallest format with the given fraction that holds every |value| <= max_abs.
    static FixedPointFormat fitting(Real max_abs, unsigned fraction_bits);

    bool operator==(const FixedPointFormat &) const = default;
};

}  // namespace qdcca
