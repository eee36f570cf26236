#include "qdcca/phase_estimation.hpp"

#include <fftw3.h>

#include <stdexcept>

namespace qdcca {

std::vector<MixtureComponent> maximally_mixed(std::size_t dim) {
    std::vector<MixtureComponent> mix;
    mix.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        CVector e = CVector::Zero(static_cast<Eigen::Index>(dim));
        e(static_cast<Eigen::Index>(k)) = 1.0;
        mix.push_back({1.0 / static_cast<Real>(dim), std::move(e)});
    }
    return mix;
}

std::size_t QpeDistribution::sample(Rng &rng) const {
    std::discrete_distribution<std::size_t> dist(probabilities.begin(), probabilities.end());
    return dist(rng);
}

QpeDistribution phase_estimate(const CMatrix &unitary, const std::vector<MixtureComponent> &mixture, unsigned t_bits) {
    if (t_bits < 3 || t_bits > 10) {
        throw std::invalid_argument("t_bits must lie in [3, 10], got " + std::to_string(t_bits));
    }
    if (unitary.rows() != unitary.cols()) {
        throw std::invalid_argument("phase estimation needs a square unitary");
    }
    const auto dim = unitary.rows();
    const std::size_t grid = std::size_t{1} << t_bits;

    QpeDistribution out;
    out.t_bits = t_bits;
    out.probabilities.assign(grid, 0.0);
    out.posteriors.assign(grid, CMatrix::Zero(dim, dim));
    out.controlled_applications = grid - 1;

    fftw_complex *in = fftw_alloc_complex(grid);
    fftw_complex *res = fftw_alloc_complex(grid);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(grid), in, res, FFTW_FORWARD, FFTW_ESTIMATE);

    CMatrix powers(dim, static_cast<Eigen::Index>(grid));  // column x = U^x |psi>
    CMatrix branch(dim, static_cast<Eigen::Index>(grid));  // column y = target amplitude given y
    for (const auto &component : mixture) {
        if (component.state.size() != dim) {
            throw std::invalid_argument("mixture component dimension does not match the unitary");
        }
        powers.col(0) = component.state;
        for (std::size_t x = 1; x < grid; ++x) {
            powers.col(static_cast<Eigen::Index>(x)) = unitary * powers.col(static_cast<Eigen::Index>(x - 1));
        }
        for (Eigen::Index r = 0; r < dim; ++r) {
            for (std::size_t x = 0; x < grid; ++x) {
                const Complex v = powers(r, static_cast<Eigen::Index>(x));
                in[x][0] = v.real();
                in[x][1] = v.imag();
            }
            fftw_execute(plan);
            for (std::size_t y = 0; y < grid; ++y) {
                branch(r, static_cast<Eigen::Index>(y)) = Complex{res[y][0], res[y][1]} / static_cast<Real>(grid);
            }
        }
        for (std::size_t y = 0; y < grid; ++y) {
            const CVector v = branch.col(static_cast<Eigen::Index>(y));
            out.probabilities[y] += component.weight * v.squaredNorm();
            out.posteriors[y] += component.weight * (v * v.adjoint());
        }
    }
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(res);

    for (std::size_t y = 0; y < grid; ++y) {
        if (out.probabilities[y] > 1e-300) {
            out.posteriors[y] /= out.probabilities[y];
        }
    }
    return out;
}

}  // namespace qdcca
