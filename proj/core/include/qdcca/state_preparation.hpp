#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "qdcca/amplitude.hpp"
#include "qdcca/dataset.hpp"
#include "qdcca/dcca.hpp"
#include "qdcca/mean_estimation.hpp"
#include "qdcca/resources.hpp"

namespace qdcca {

struct ScalingBounds {
    Real alpha = 0;  // 2 max|M_ij|
    Real beta = 0;   // 2 n' max|M_ij|
    Real m0 = 0;     // ceil(N/2)-th largest |entry| of (X;Y), N = n(p+q)
    Real m_j = 0;    // ceil(N_J/2)-th largest |entry| of the class-sum factor, N_J = c(p+q)
    bool m0_holds = true;  // at least half of the class-sum entries exceed n'' m0

    static ScalingBounds from(const PairedDataset &data, const DccaOperators &ops);
};

/// Largest m such that at least half of the entries of `values` have magnitude >= m.
Real density_threshold(const Matrix &values);

struct StatePrepConfig {
    Real eps1 = 0.002;  // row-mean accuracy for the E preparation
    Real eps2 = 0.002;  // mean accuracy for the J and K preparations
    Real delta1 = 0.05;
    Real delta2 = 0.05;
    Real infidelity_target = 1e-4;
    unsigned fraction_bits = 10;
    unsigned max_qubits = kDefaultMaxQubits;
    std::uint64_t seed = 1;
    bool amplify = true;
    /// Bypass estimation: row means of M (length p+q) and padded class means (c x (p+q)).
    std::optional<Vector> injected_row_means;
    std::optional<Matrix> injected_class_means;
};

/// Seeded mean estimates shared by the three preparations.
struct MeanEstimates {
    Vector row_means_e;   // eps1 accuracy
    Vector row_means_j;   // eps2 accuracy
    Matrix class_means;   // c x (p+q): mean of row k of the padded block i
    Real row_error_e = 0; // max |estimate - truth|
    Real row_error_j = 0;
    Real class_error = 0;
    std::uint64_t queries_row_e = 0;  // data-oracle queries per coherent use
    std::uint64_t queries_row_j = 0;
    std::uint64_t queries_class = 0;
};

MeanEstimates estimate_means(const PairedDataset &data, const StatePrepConfig &config);

/// Rows indexed i (p+q) + k, columns j < n': the padded block entries, read through the index
/// arithmetic oracle |i>|k>|j> -> |i n' + j> into the padded-matrix oracle.
Matrix padded_class_table(const PairedDataset &data, unsigned max_qubits = kDefaultMaxQubits);

struct PrepReport {
    std::string name;
    std::size_t index_count = 0;   // 2n, c or 2c
    std::size_t system_count = 0;  // p + q
    unsigned total_qubits = 0;
    unsigned ancilla_qubits = 0;    // every qubit outside the system register
    unsigned arithmetic_qubits = 0; // log m1 or log m2
    Real initial_good_probability = 0;
    Real final_good_probability = 0;
    std::size_t rounds = 0;
    std::uint64_t queries_per_prep = 0;  // data-oracle queries of one unamplified preparation
    std::uint64_t total_queries = 0;
    Real entry_error = 0;   // per-entry error bound of the loaded factor
    Real error_bound = 0;   // closed-form bound on || |psi~> - |psi> ||
    Real declared_error = 0; // error_bound + sqrt(infidelity_target)
    bool density_assumption = true;
    Real max_uncompute_residue = 0;  // largest amplitude left on work registers
    Real rotation_scale = 0;  // alpha or beta, raised to the largest stored magnitude if rounding exceeds it
};

struct PreparedState {
    QuantumState state;
    std::size_t index_reg;
    std::size_t system_reg;
    std::size_t anc_reg;
    PrepReport report;
    ResourceReport resources;

    /// (p+q) x index_count matrix of amplitudes on the good branch.
    CMatrix factor_amplitudes() const;
    /// Fidelity of the full state with |target> |0>_anc.
    Real fidelity(const Matrix &target_factor) const;
    /// || |psi~> - |psi> || on the post-selected branch, global phase aligned.
    Real postselected_distance(const Matrix &target_factor) const;
};

/// sqrt(1 + 4 a e/m^2 + 2 e^2/m^2) - 1 + sqrt(2) e/m with a the entry scale.
Real factor_error_bound(Real entry_scale, Real entry_error, Real density);

PreparedState prepare_psi_e(const PairedDataset &data, const ScalingBounds &bounds, const MeanEstimates &means,
                            const StatePrepConfig &config);
PreparedState prepare_psi_j(const PairedDataset &data, const ScalingBounds &bounds, const MeanEstimates &means,
                            const StatePrepConfig &config);
PreparedState prepare_psi_k(const PairedDataset &data, const ScalingBounds &bounds, const MeanEstimates &means,
                            const StatePrepConfig &config);

/// dim x (number of configurations of the other registers) amplitude matrix, so that
/// the reduced density of `reg` is A A^dagger.
CMatrix system_amplitude_matrix(const QuantumState &state, std::size_t reg, std::size_t dim);

/// rho = Tr_others |psi><psi| restricted to `reg`, dimension `dim`.
CMatrix reduced_density(const QuantumState &state, std::size_t reg, std::size_t dim);
/// Two-register layout: traces out register 0.
CMatrix trace_out_first(const QuantumState &state);

struct TraceRatioEstimate {
    Real ratio = 0;
    Real standard_error = 0;
    Real p_e = 0;  // measured success frequency of the E preparation before amplification
    Real p_j = 0;
    Real bound_simple = 0;  // 2n max^2/m0^2
    Real bound_full = 0;    // 8 c n'^2 max^2 /(n m0^2)
};

/// Measures the rotation ancilla of the unamplified E and J preparations `samples` times each.
TraceRatioEstimate estimate_trace_ratio(const PreparedState &psi_e, const PreparedState &psi_j,
                                        const PairedDataset &data, const ScalingBounds &bounds,
                                        std::size_t samples, Rng &rng);

}  // namespace qdcca
