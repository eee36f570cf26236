#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qdcca/dataset.hpp"
#include "qdcca/linalg.hpp"

namespace qdcca {

/// Every matrix of the DCCA generalized eigenproblem D w = lambda E w,
/// together with the factorizations E = E' E'^T, J = J' J'^T, K = K' K'^T.
struct DccaOperators {
    Matrix class_block;   // C, n x n
    Matrix d_matrix;      // D = J - K
    Matrix e_matrix;      // diag(X X^T, Y Y^T)
    Matrix j_matrix;
    Matrix k_matrix;
    Matrix class_sums_x;  // p x c
    Matrix class_sums_y;  // q x c
    Matrix e_factor;      // diag(X, Y), (p+q) x 2n
    Matrix j_factor;      // (Xs; Ys), (p+q) x c
    Matrix k_factor;      // diag(Xs, Ys), (p+q) x 2c
    std::size_t p = 0;
    std::size_t q = 0;
};

DccaOperators build_operators(const CenteredDataset &centered, const PairedDataset &data);

struct ConditionReport {
    Real e_max_eigenvalue = 0;
    Real e_min_retained_eigenvalue = 0;
    std::size_t e_rank = 0;
    bool e_singular = false;
};

struct SpectralResult {
    std::vector<Real> eigenvalues;        // descending, length d
    std::vector<Vector> eigenvectors;     // unit length p+q
    std::vector<std::pair<Vector, Vector>> projections;  // (w_x, w_y) = split of E^{+1/2} v
    std::vector<Real> full_spectrum;      // all eigenvalues of H, descending
    std::size_t d = 0;
    bool degenerate = false;  // top-d eigenvalues are not separated from each other or from lambda_{d+1}
    ConditionReport condition;
};

/// E^{-1/2} restricted to range(E): eigenvalues below cutoff * lambda_max(E) are dropped.
Matrix inverse_sqrt_psd(const Matrix &e, Real relative_cutoff = 1e-10);

/// H = E^{-1/2} D E^{-1/2} with the pseudo-inverse square root.
Matrix reduced_hamiltonian(const DccaOperators &ops);

std::size_t default_pair_count(const PairedDataset &data);

/// Top-d eigenpairs of H; d defaults to min(c, p, q).
SpectralResult solve_dcca(const DccaOperators &ops, std::size_t classes,
                          std::optional<std::size_t> d = std::nullopt);

/// w_x^T X C Y^T w_y for a pair satisfying the unit-variance constraints.
Real brute_force_objective(const CenteredDataset &centered, const DccaOperators &ops,
                           const Vector &w_x, const Vector &w_y);

/// Rescales each half so w_x^T X X^T w_x = 1 and w_y^T Y Y^T w_y = 1.
std::pair<Vector, Vector> normalize_to_constraints(const CenteredDataset &centered,
                                                    const Vector &w_x, const Vector &w_y);

/// Flips v so its largest-magnitude entry is positive.
void canonicalize_sign(Vector &v);

}  // namespace qdcca
