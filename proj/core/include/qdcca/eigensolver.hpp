#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdcca/block_encoding.hpp"
#include "qdcca/dcca.hpp"
#include "qdcca/phase_estimation.hpp"
#include "qdcca/resources.hpp"
#include "qdcca/state_preparation.hpp"

namespace qdcca {

struct HamiltonianSimSpec {
    Real t = 0;
    Real shift = 0;      // spectrum of H~ + shift lies in [0, 2 shift]
    Real sim_error = 1e-10;
    unsigned t_bits = 7;
    std::size_t d = 1;
    Real eps4 = 0.05;

    void validate() const;
};

/// e^{i (H~ + shift) t} from the extracted block; powers give the controlled family.
struct SimulatedEvolution {
    CMatrix hamiltonian;  // Hermitian part of the extracted H~ block
    CMatrix unitary;
    Real t = 0;
    Real shift = 0;
    Real sim_error = 0;              // measured distance to the exact exponential
    Real cost_per_application = 0;   // (8 kappa t + log(1/(2 t eps_H~))) (T~_E + T_J + T_K)

    CMatrix power(unsigned k) const;  // e^{i (H~ + shift) 2^k t}
    /// H~ eigenvalue for a phase in [0, 1).
    Real eigenvalue_of_phase(Real phase) const;
};

/// Throws std::domain_error if ||H~|| t >= pi, with a suggested t in the message.
SimulatedEvolution simulate_htilde(const BlockEncoding &htilde, const HamiltonianSimSpec &spec,
                                   Real cost_per_unit = 0, Real kappa = 1, Real eps_htilde = 0);

struct PipelineConfig {
    StatePrepConfig prep;
    Real eps4 = 0.05;
    std::optional<unsigned> t_bits;  // derived from eps4 when unset
    std::optional<std::size_t> d;
    bool exact_trace_ratio = false;
    std::optional<Real> eps3;       // solved from the E preparation error when unset
    Real eps_relation_constant = 1;  // eps_E = constant * eps3 / (kappa^{3/2} L^3)
    Real kappa_cutoff = 1e4;
    Real qpe_delta = 1e-3;          // failure of one median-refined phase estimate
    std::size_t min_trace_samples = 10000;
    std::size_t max_trace_samples = std::size_t{1} << 30;
    std::uint64_t seed = 1;

    void validate() const;
};

struct EncodingChain {
    BlockEncoding rho_e;
    BlockEncoding rho_j;
    BlockEncoding rho_k;
    BlockEncoding inv_sqrt;
    BlockEncoding f;
    BlockEncoding g;
    BlockEncoding htilde;
    EncodingParams params;
};

/// Density encodings of the three prepared states and the products and combination built on them.
EncodingChain build_encoding_chain(const PreparedState &psi_e, const PreparedState &psi_j, const PreparedState &psi_k,
                                   const PipelineConfig &config);

struct EigenpairComparison {
    Real classical_eigenvalue = 0;
    Real quantum_eigenvalue = 0;
    Real gap = 0;
    Real tolerance = 0;          // eps4 + grid resolution
    Real fidelity = 0;           // |<v|v_classical>|^2
    Real projection_fidelity = 0;  // |<w|w_classical>|^2, w ~ E^{-1/2} v
};

struct QdccaResult {
    std::vector<Real> eigenvalues_h;
    std::vector<Real> eigenvalues_htilde;
    std::vector<CVector> eigenstates;
    std::vector<CVector> projections;
    std::vector<EigenpairComparison> comparison;
    SpectralResult classical;
    bool ambiguous = false;  // lambda_d and lambda_{d+1} not separated by the phase grid
    bool total_tie = false;  // every sampled phase equal
    Real trace_ratio = 0;            // tr(J)/tr(E) used for rescaling
    Real trace_ratio_exact = 0;
    Real trace_ratio_standard_error = 0;
    std::size_t trace_samples = 0;
    Real grid_resolution = 0;  // one phase step in H eigenvalue units
    unsigned t_bits = 0;
    Real t = 0;
    Real shift = 0;
    EncodingParams encoding;
    Real htilde_block_error = 0;  // || extracted H~ - (tr E / tr J) H ||_2
    std::vector<PrepReport> preparations;  // E, J, K
    std::uint64_t step3_controlled_unitaries = 0;
    std::uint64_t step3_searches = 0;
    std::uint64_t step4_rounds = 0;
    ResourceReport resources;
};

/// Steps 1 to 4 end to end with the classical oracle alongside.
QdccaResult run_qpe_pipeline(const PairedDataset &data, const PipelineConfig &config);

struct ProjectionResult {
    CVector state;
    Real success_probability = 0;
    std::size_t rounds = 0;
};

/// rho_E^{-1/2}|v> normalized through the inverse-square-root encoding. Throws if |v> lies in its null space.
ProjectionResult postprocess_projection(const BlockEncoding &inv_sqrt, const CVector &eigenstate,
                                        ResourceReport *report = nullptr);

struct ResourceRow {
    std::string step;
    std::string operation;
    Real measured = 0;
    Real symbolic = 0;  // closed-form cost term, unit constants
};

/// Cost rows: measured counters beside the closed-form terms at the run's parameters.
std::vector<ResourceRow> resource_summary(const QdccaResult &result, const PairedDataset &data,
                                          const PipelineConfig &config);

}  // namespace qdcca
