#include "qdcca/amplitude.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace qdcca {

namespace {

constexpr Real kPi = std::numbers::pi;

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : in(fftw_alloc_complex(n)), out(fftw_alloc_complex(n)),
          plan(fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE)) {}
    ~FftwBuffer() {
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    FftwBuffer(const FftwBuffer &) = delete;
    FftwBuffer &operator=(const FftwBuffer &) = delete;

    fftw_complex *in;
    fftw_complex *out;
    fftw_plan plan;
};

}  // namespace

void GroverProblem::reflect_initial(QuantumState &psi) const {
    const Complex overlap = initial.inner(psi);
    psi.axpy(-2.0 * overlap, initial);
}

void GroverProblem::apply_grover(QuantumState &psi) const {
    psi.phase_flip(good);
    reflect_initial(psi);
    psi.scale(-1.0);
    psi.prune(1e-15);
}

Real EstimationDistribution::estimate(std::size_t y) const {
    const Real s = std::sin(kPi * static_cast<Real>(y) / static_cast<Real>(grid));
    return s * s;
}

Real EstimationDistribution::sample(Rng &rng) const {
    std::discrete_distribution<std::size_t> dist(outcome_probabilities.begin(), outcome_probabilities.end());
    return estimate(dist(rng));
}

Real EstimationDistribution::success_probability(Real truth, Real tolerance) const {
    Real total = 0;
    for (std::size_t y = 0; y < grid; ++y) {
        if (std::abs(estimate(y) - truth) <= tolerance) {
            total += outcome_probabilities[y];
        }
    }
    return total;
}

EstimationDistribution amplitude_estimation_distribution(const GroverProblem &problem, std::size_t grid) {
    if (grid < 2 || grid > kMaxEstimationGrid) {
        throw std::invalid_argument("estimation grid must lie in [2, " + std::to_string(kMaxEstimationGrid) + "]");
    }
    // Column x of every support component holds <b|Q^x|s>.
    std::map<BasisIndex, std::vector<Complex>> columns;
    QuantumState psi = problem.initial;
    for (std::size_t x = 0; x < grid; ++x) {
        for (const auto &[b, a] : psi.amplitudes()) {
            auto &col = columns[b];
            if (col.empty()) {
                col.assign(grid, Complex{0, 0});
            }
            col[x] = a;
        }
        if (x + 1 < grid) {
            problem.apply_grover(psi);
        }
    }

    EstimationDistribution dist;
    dist.grid = grid;
    dist.outcome_probabilities.assign(grid, 0.0);
    FftwBuffer fft(grid);
    const Real norm = 1.0 / (static_cast<Real>(grid) * static_cast<Real>(grid));
    for (const auto &[b, col] : columns) {
        for (std::size_t x = 0; x < grid; ++x) {
            fft.in[x][0] = col[x].real();
            fft.in[x][1] = col[x].imag();
        }
        fftw_execute(fft.plan);
        for (std::size_t y = 0; y < grid; ++y) {
            dist.outcome_probabilities[y] += (fft.out[y][0] * fft.out[y][0] + fft.out[y][1] * fft.out[y][1]) * norm;
        }
    }
    // Controlled powers Q^1..Q^(M-1) plus the initial A; each Q holds A and A^dagger.
    dist.queries_per_run = (2 * (grid - 1) + 1) * problem.queries_per_prep;
    return dist;
}

Real amplitude_estimate(const GroverProblem &problem, unsigned precision_bits, Rng &rng, const QueryLedger &ledger) {
    if (precision_bits < 2 || precision_bits > 12) {
        throw std::invalid_argument("precision_bits must lie in [2, 12], got " + std::to_string(precision_bits));
    }
    const auto dist = amplitude_estimation_distribution(problem, std::size_t{1} << precision_bits);
    if (ledger.report != nullptr) {
        QueryLedger scaled = ledger;
        scaled.weight = ledger.weight * dist.queries_per_run;
        scaled.charge("grover");
    }
    return dist.sample(rng);
}

std::size_t estimation_grid(Real accuracy) {
    if (!(accuracy > 0)) {
        throw std::invalid_argument("estimation accuracy must be positive");
    }
    for (std::size_t m = 4; m <= kMaxEstimationGrid; m += 2) {
        const Real step = kPi / static_cast<Real>(m);
        if (step + step * step <= accuracy) {
            return m;
        }
    }
    throw std::domain_error("accuracy " + std::to_string(accuracy) + " needs a grid above " +
                            std::to_string(kMaxEstimationGrid));
}

std::size_t median_repetitions(Real delta, Real per_run_failure) {
    if (!(delta > 0 && delta < 0.5)) {
        throw std::invalid_argument("delta must lie in (0, 1/2)");
    }
    if (!(per_run_failure >= 0 && per_run_failure < 0.5)) {
        throw std::invalid_argument("per-run failure must be below 1/2");
    }
    for (std::size_t l = 1;; l += 2) {
        // The median fails only if at least (l+1)/2 runs fail.
        Real tail = 0;
        for (std::size_t k = (l + 1) / 2; k <= l; ++k) {
            const Real log_binom = std::lgamma(static_cast<Real>(l) + 1) - std::lgamma(static_cast<Real>(k) + 1) -
                                   std::lgamma(static_cast<Real>(l - k) + 1);
            tail += std::exp(log_binom + static_cast<Real>(k) * std::log(per_run_failure) +
                             static_cast<Real>(l - k) * std::log1p(-per_run_failure));
        }
        if (tail <= delta || per_run_failure == 0) {
            return l;
        }
    }
}

Real median_boost(std::vector<Real> trials, std::size_t l) {
    if (l == 0 || l % 2 == 0) {
        throw std::invalid_argument("median repetitions must be odd and positive");
    }
    if (l > trials.size()) {
        throw std::invalid_argument("median_boost needs at least l trials");
    }
    trials.resize(l);
    auto mid = trials.begin() + static_cast<std::ptrdiff_t>(l / 2);
    std::nth_element(trials.begin(), mid, trials.end());
    return *mid;
}

Real fixed_point_guarantee(Real lambda_lower, std::size_t rounds) {
    if (!(lambda_lower > 0 && lambda_lower <= 1)) {
        throw std::invalid_argument("fixed-point search needs a positive lower bound on the good probability");
    }
    if (lambda_lower >= 1) {
        return 1.0;
    }
    const Real length = static_cast<Real>(2 * rounds + 1);
    const Real t = std::cosh(length * std::acosh(1.0 / std::sqrt(1.0 - lambda_lower)));
    return 1.0 - 1.0 / (t * t);
}

std::size_t fixed_point_rounds(Real lambda_lower, Real target) {
    if (!(target > 0 && target < 1)) {
        throw std::invalid_argument("target infidelity must lie in (0, 1)");
    }
    if (!(lambda_lower > 0 && lambda_lower <= 1)) {
        throw std::invalid_argument("fixed-point search needs a positive lower bound on the good probability");
    }
    if (lambda_lower >= 1.0 - target) {
        return 0;
    }
    // T_L(x) = cosh(L acosh x) >= 1/sqrt(target)
    const Real needed = std::acosh(1.0 / std::sqrt(target)) / std::acosh(1.0 / std::sqrt(1.0 - lambda_lower));
    const auto length = static_cast<std::size_t>(std::ceil(needed - 1e-12));
    return std::max<std::size_t>(1, length / 2);  // smallest odd 2l+1 >= length
}

namespace {

void apply_sequence(QuantumState &psi, const QuantumState &initial, const BasisPredicate &good, Real w,
                    std::size_t l) {
    const Real length = static_cast<Real>(2 * l + 1);
    const Real root = std::sqrt(w);  // sqrt(1 - gamma^2) with gamma^2 = 1 - w
    std::vector<Real> alpha(l + 1);
    for (std::size_t j = 1; j <= l; ++j) {
        const Real t = std::tan(2.0 * kPi * static_cast<Real>(j) / length) * root;
        alpha[j] = 2.0 * (kPi / 2.0 - std::atan(t));  // 2 arccot(t), arccot in (0, pi)
    }
    const Complex i{0, 1};
    for (std::size_t j = 1; j <= l; ++j) {
        const Real beta = -alpha[l - j + 1];
        psi.phase_flip(good, std::exp(i * beta));  // I - (1 - e^{i beta}) Pi_good
        const Complex overlap = initial.inner(psi);
        psi.axpy(-(1.0 - std::exp(-i * alpha[j])) * overlap, initial);  // I - (1 - e^{-i alpha})|s><s|
        psi.scale(-1.0);
        psi.prune(1e-15);
    }
}

}  // namespace

AmplificationResult fixed_point_amplify(const QuantumState &initial, const BasisPredicate &good,
                                        Real target_infidelity, const AmplifyOptions &options,
                                        const QueryLedger &ledger) {
    AmplificationResult result{initial, 0, 0, 0, {}};
    result.initial_probability = initial.probability(good);
    if (result.initial_probability <= 0) {
        throw std::domain_error("fixed-point search: the good subspace has zero overlap with the state");
    }
    result.final_probability = result.initial_probability;
    const Real w = std::min(options.lambda_lower.value_or(result.initial_probability), result.initial_probability);
    const std::size_t l = fixed_point_rounds(w, target_infidelity);
    if (l == 0 || 1.0 - result.initial_probability <= target_infidelity) {
        return result;
    }
    if (options.record_trace) {
        for (std::size_t k = 1; k < l; ++k) {
            QuantumState partial = initial;
            apply_sequence(partial, initial, good, w, k);
            result.trace.push_back(partial.probability(good));
        }
    }
    apply_sequence(result.state, initial, good, w, l);
    result.rounds = l;
    result.final_probability = result.state.probability(good);
    result.trace.push_back(result.final_probability);
    if (ledger.report != nullptr) {
        QueryLedger scaled = ledger;
        scaled.weight = ledger.weight * 2 * l * options.queries_per_prep;
        scaled.charge("fixed_point_search");
        ledger.report->stage(ledger.stage).amplification_rounds += l;
    }
    return result;
}

}  // namespace qdcca
