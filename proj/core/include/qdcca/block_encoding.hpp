#pragma once

#include <cstddef>
#include <string>

#include "qdcca/linalg.hpp"
#include "qdcca/state_preparation.hpp"

namespace qdcca {

/// (alpha, a, eps)-encoding: alpha * (top-left block of unitary) approximates the target within eps.
/// ancilla_qubits is the logical count of the construction; the simulated unitary may use fewer.
struct BlockEncoding {
    std::string name;
    CMatrix unitary;
    Real norm_factor = 1;
    unsigned ancilla_qubits = 0;
    Real error_bound = 0;
    std::size_t encoded_dim = 0;

    CMatrix block() const;
    unsigned simulated_ancilla_qubits() const;
    /// Same block under the one-qubit dilation [[A, sqrt(I - A A^+)], [sqrt(I - A^+ A), -A^+]].
    BlockEncoding compressed() const;
};

/// norm_factor * block.
CMatrix block_extract(const BlockEncoding &be);

/// max |U^+ U - I|.
Real unitarity_error(const CMatrix &u);

/// Encodes a (contraction) matrix through the one-qubit dilation.
BlockEncoding dilation_encoding(std::string name, const CMatrix &block, Real norm_factor, unsigned ancilla_qubits,
                                Real error_bound);
BlockEncoding identity_encoding(std::size_t dim);

struct EncodingParams {
    Real kappa = 1;  // 1 / smallest retained eigenvalue of rho_E, so the spectrum lies in [1/kappa, 1]
    Real kappa_cutoff = 1e4;  // eigenvalues below lambda_max / (kappa_cutoff * 1.01) are truncated
    Real eps3 = 0;
    Real eps_e = 0;
    Real eps_j = 0;
    Real eps_k = 0;
    unsigned s = 0;    // system qubits, log(p+q)
    unsigned a_e = 0;
    unsigned a_j = 0;
    unsigned a_k = 0;

    unsigned a_prime() const;         // a_E + s + ceil(log2(kappa^{3/2} log2(1/eps3))), at least one extra
    unsigned a_double_prime() const;  // a_J + s + 2a'
    unsigned a_triple_prime() const;  // a_K + s + 2a'
    Real eps_f() const;               // 4 kappa^{1/2} (eps3 + 2 kappa^{1/2} eps_J)
    Real eps_g() const;               // same with eps_K
    Real eps_htilde() const;          // 32 kappa^{3/2} (eps3 + 2 kappa^{1/2} eps_J)
};

unsigned ceil_log2(std::size_t value);
unsigned ancilla_budget_e(std::size_t n, unsigned log_m1);
unsigned ancilla_budget_j(std::size_t c, unsigned log_m2);
unsigned ancilla_budget_k(std::size_t c, unsigned log_m2);

/// constant * eps3 / (kappa^{3/2} L^3) with L = max(1, log2(kappa^{3/2}/eps3)).
Real required_state_error(Real eps3, Real kappa, Real constant = 1);
/// Inverts required_state_error in eps3.
Real solve_eps3(Real eps_state, Real kappa, Real constant = 1);

/// (U^+ (x) I)(I (x) SWAP)(U (x) I) with U preparing a Schmidt-compressed purification of the
/// prepared state's system register. Error 2 * state_error.
BlockEncoding density_encoding(const PreparedState &prepared, Real state_error);
/// Same construction from an explicit purification matrix (dim x r, unit Frobenius norm).
BlockEncoding density_encoding(const CMatrix &purification, unsigned logical_ancilla, Real state_error,
                               std::string name = "rho");

/// 1 / smallest eigenvalue of the extracted block kept by the cutoff.
Real measure_kappa(const BlockEncoding &rho, Real kappa_cutoff);

/// (2 kappa^{1/2}, a', eps3) encoding of the pseudo-inverse square root of the encoded density.
/// Throws std::domain_error if the retained spectrum needs a larger kappa than params.kappa.
BlockEncoding inverse_sqrt_encoding(const BlockEncoding &rho, const EncodingParams &params);

/// Encoding of A B: norm factors multiply, ancillas add, error alpha_A eps_B + alpha_B eps_A.
BlockEncoding product_encoding(const BlockEncoding &a, const BlockEncoding &b, std::string name = "product");

/// (P_L, P_R) = (HX, H) combination encoding F - G with norm 2 alpha and one extra ancilla.
/// Declared error is 2 alpha max(eps_F, eps_G). Throws if the norm factors differ.
BlockEncoding linear_combination_encoding(const BlockEncoding &f, const BlockEncoding &g,
                                          std::string name = "combination");

}  // namespace qdcca
