#include "qdcca/fixed_point.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qdcca {

Real FixedPointFormat::resolution() const { return std::ldexp(1.0, -static_cast<int>(fraction_bits)); }

Real FixedPointFormat::max_value() const {
    return std::ldexp(1.0, static_cast<int>(integer_bits)) - resolution();
}

Real FixedPointFormat::min_value() const { return -std::ldexp(1.0, static_cast<int>(integer_bits)); }

bool FixedPointFormat::representable(Real value) const {
    const Real scaled = std::nearbyint(std::ldexp(value, static_cast<int>(fraction_bits)));
    const Real lo = -std::ldexp(1.0, static_cast<int>(width() - 1));
    const Real hi = std::ldexp(1.0, static_cast<int>(width() - 1)) - 1;
    return std::isfinite(value) && scaled >= lo && scaled <= hi;
}

bool FixedPointFormat::exact(Real value) const {
    if (!representable(value)) {
        return false;
    }
    const Real scaled = std::ldexp(value, static_cast<int>(fraction_bits));
    return scaled == std::nearbyint(scaled);
}

std::uint64_t FixedPointFormat::encode(Real value) const {
    if (width() > 63) {
        throw std::invalid_argument("fixed-point width above 63 bits is not supported");
    }
    if (!representable(value)) {
        throw std::overflow_error("value " + std::to_string(value) + " does not fit fixed point with " +
                                  std::to_string(integer_bits) + " integer bits");
    }
    const auto scaled = static_cast<std::int64_t>(std::nearbyint(std::ldexp(value, static_cast<int>(fraction_bits))));
    const std::uint64_t mask = (std::uint64_t{1} << width()) - 1;
    return static_cast<std::uint64_t>(scaled) & mask;
}

Real FixedPointFormat::decode(std::uint64_t bits) const {
    const auto w = width();
    const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
    bits &= mask;
    auto raw = static_cast<std::int64_t>(bits);
    if (bits >> (w - 1)) {
        raw -= static_cast<std::int64_t>(std::uint64_t{1} << w);
    }
    return std::ldexp(static_cast<Real>(raw), -static_cast<int>(fraction_bits));
}

FixedPointFormat FixedPointFormat::fitting(Real max_abs, unsigned fraction_bits) {
    FixedPointFormat fmt{0, fraction_bits};
    while (!fmt.representable(max_abs) || !fmt.representable(-max_abs)) {
        ++fmt.integer_bits;
        if (fmt.width() > 63) {
            throw std::overflow_error("no fixed-point format holds " + std::to_string(max_abs));
        }
    }
    return fmt;
}

}  // namespace qdcca
