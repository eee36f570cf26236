#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qdcca/oracle.hpp"
#include "qdcca/quantum_state.hpp"
#include "qdcca/random.hpp"

namespace qdcca {

/// |s> = A|0> together with the marked subspace. The Grover operator is
/// Q = -(I - 2|s><s|)(I - 2 Pi_good); one application of Q uses A and A^dagger once each.
struct GroverProblem {
    QuantumState initial;
    BasisPredicate good;
    std::uint64_t queries_per_prep = 1;  // oracle queries charged per use of A or A^dagger

    Real good_probability() const { return initial.probability(good); }
    void apply_grover(QuantumState &psi) const;
    /// I - 2|s><s|
    void reflect_initial(QuantumState &psi) const;
};

/// Outcome distribution of one amplitude-estimation run over a phase grid of size M.
struct EstimationDistribution {
    std::size_t grid = 0;
    std::vector<Real> outcome_probabilities;  // P(y), y in [0, M)
    std::uint64_t queries_per_run = 0;

    Real estimate(std::size_t y) const;  // sin^2(pi y / M)
    Real sample(Rng &rng) const;
    /// Probability that a single run lands within `tolerance` of `truth`.
    Real success_probability(Real truth, Real tolerance) const;
};

/// Simulates the estimation circuit exactly: the control register holds x in Z_M, the target
/// Q^x|s>, and an inverse Fourier transform over Z_M is applied before measuring.
EstimationDistribution amplitude_estimation_distribution(const GroverProblem &problem, std::size_t grid);

/// One estimate with M = 2^precision_bits; precision_bits must lie in [2, 12].
Real amplitude_estimate(const GroverProblem &problem, unsigned precision_bits, Rng &rng,
                        const QueryLedger &ledger = {});

inline constexpr std::size_t kMaxEstimationGrid = 16384;

/// Smallest even grid M >= 4 with pi/M + pi^2/M^2 <= accuracy. Throws std::domain_error past the cap.
std::size_t estimation_grid(Real accuracy);

/// Worst-case probability that one run misses the pi/M + pi^2/M^2 window.
inline constexpr Real kEstimationFailure = 1.0 - 8.0 / (3.14159265358979323846 * 3.14159265358979323846);

/// Smallest odd l for which a median of l runs fails with probability <= delta.
std::size_t median_repetitions(Real delta, Real per_run_failure = kEstimationFailure);

/// Median of the first l trials. l must be odd, at least 1 and at most trials.size().
Real median_boost(std::vector<Real> trials, std::size_t l);

/// Good probability guaranteed after l fixed-point rounds (2l+1 queries) for every initial
/// probability >= lambda_lower: 1 - 1/T_{2l+1}(1/sqrt(1 - lambda_lower))^2.
Real fixed_point_guarantee(Real lambda_lower, std::size_t rounds);

/// Fewest rounds whose guarantee reaches 1 - target; zero when lambda_lower >= 1 - target.
std::size_t fixed_point_rounds(Real lambda_lower, Real target);

struct AmplifyOptions {
    std::optional<Real> lambda_lower;  // defaults to the state's own good probability
    bool record_trace = false;
    std::uint64_t queries_per_prep = 1;
};

struct AmplificationResult {
    QuantumState state;
    std::size_t rounds = 0;
    Real initial_probability = 0;
    Real final_probability = 0;
    /// Entry k-1 is the good probability when the search is stopped after k rounds.
    std::vector<Real> trace;
};

/// Fixed-point amplitude amplification with Chebyshev phase-sequence angles. The angles of an
/// l-round search put the guarantee band edge at lambda_lower, so stopping after any number of
/// rounds leaves the good probability at or above its starting value.
AmplificationResult fixed_point_amplify(const QuantumState &initial, const BasisPredicate &good,
                                        Real target_infidelity, const AmplifyOptions &options = {},
                                        const QueryLedger &ledger = {});

}  // namespace qdcca
