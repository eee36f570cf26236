#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qdcca/linalg.hpp"
#include "qdcca/random.hpp"

namespace qdcca {

struct MixtureComponent {
    Real weight = 0;
    CVector state;
};

/// rho_0 = I/dim as an equal-weight mixture of basis states.
std::vector<MixtureComponent> maximally_mixed(std::size_t dim);

/// Joint distribution of the t-bit phase register and the target register after phase
/// estimation of U on a mixed input.
struct QpeDistribution {
    unsigned t_bits = 0;
    std::vector<Real> probabilities;  // P(y)
    std::vector<CMatrix> posteriors;  // target state conditioned on y (zero matrix if P(y) = 0)
    std::uint64_t controlled_applications = 0;  // controlled-U uses per run: 2^t - 1

    std::size_t grid() const { return probabilities.size(); }
    Real phase(std::size_t y) const { return static_cast<Real>(y) / static_cast<Real>(grid()); }
    std::size_t sample(Rng &rng) const;
};

/// Exact simulation: the control register holds x, the target U^x|psi>, then an inverse
/// Fourier transform over the control register. t_bits must lie in [3, 10].
QpeDistribution phase_estimate(const CMatrix &unitary, const std::vector<MixtureComponent> &mixture, unsigned t_bits);

}  // namespace qdcca
