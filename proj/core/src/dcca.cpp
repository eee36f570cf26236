#include "qdcca/dcca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qdcca {

namespace {

constexpr Real kConstraintTolerance = 1e-8;
constexpr Real kDegeneracyTolerance = 1e-9;

}  // namespace

DccaOperators build_operators(const CenteredDataset &centered, const PairedDataset &data) {
    const auto p = data.p();
    const auto q = data.q();
    const auto n = data.n();
    const auto c = data.classes();
    if (static_cast<std::size_t>(centered.x_matrix.rows()) != p ||
        static_cast<std::size_t>(centered.y_matrix.rows()) != q ||
        static_cast<std::size_t>(centered.x_matrix.cols()) != n ||
        static_cast<std::size_t>(centered.y_matrix.cols()) != n) {
        throw std::invalid_argument("centered data is " + std::to_string(centered.x_matrix.rows()) + "+" +
                                    std::to_string(centered.y_matrix.rows()) + " x " +
                                    std::to_string(centered.x_matrix.cols()) + " but dataset is " +
                                    std::to_string(p) + "+" + std::to_string(q) + " x " + std::to_string(n));
    }

    DccaOperators ops;
    ops.p = p;
    ops.q = q;
    const auto &x = centered.x_matrix;
    const auto &y = centered.y_matrix;

    ops.class_block = Matrix::Zero(n, n);
    ops.class_sums_x = Matrix::Zero(p, c);
    ops.class_sums_y = Matrix::Zero(q, c);
    for (std::size_t cls = 0; cls < c; ++cls) {
        const auto start = data.class_offset(cls);
        const auto size = data.class_sizes()[cls];
        ops.class_block.block(start, start, size, size).setOnes();
        ops.class_sums_x.col(cls) = x.middleCols(start, size).rowwise().sum();
        ops.class_sums_y.col(cls) = y.middleCols(start, size).rowwise().sum();
    }

    const auto dim = p + q;
    ops.e_factor = Matrix::Zero(dim, 2 * n);
    ops.e_factor.topLeftCorner(p, n) = x;
    ops.e_factor.bottomRightCorner(q, n) = y;
    ops.j_factor.resize(dim, c);
    ops.j_factor << ops.class_sums_x, ops.class_sums_y;
    ops.k_factor = Matrix::Zero(dim, 2 * c);
    ops.k_factor.topLeftCorner(p, c) = ops.class_sums_x;
    ops.k_factor.bottomRightCorner(q, c) = ops.class_sums_y;

    ops.e_matrix = Matrix::Zero(dim, dim);
    ops.e_matrix.topLeftCorner(p, p) = x * x.transpose();
    ops.e_matrix.bottomRightCorner(q, q) = y * y.transpose();
    ops.j_matrix = ops.j_factor * ops.j_factor.transpose();
    ops.k_matrix = Matrix::Zero(dim, dim);
    ops.k_matrix.topLeftCorner(p, p) = ops.j_matrix.topLeftCorner(p, p);
    ops.k_matrix.bottomRightCorner(q, q) = ops.j_matrix.bottomRightCorner(q, q);
    // D = J - K: the diagonal blocks cancel exactly, the off-diagonal ones are copied.
    ops.d_matrix = Matrix::Zero(dim, dim);
    ops.d_matrix.topRightCorner(p, q) = ops.j_matrix.topRightCorner(p, q);
    ops.d_matrix.bottomLeftCorner(q, p) = ops.j_matrix.bottomLeftCorner(q, p);
    return ops;
}

Matrix inverse_sqrt_psd(const Matrix &e, Real relative_cutoff) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(e);
    const Vector &values = eig.eigenvalues();
    const Real top = values.cwiseAbs().maxCoeff();
    Vector inv(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        inv(i) = (top > 0 && values(i) > relative_cutoff * top) ? 1.0 / std::sqrt(values(i)) : 0.0;
    }
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix reduced_hamiltonian(const DccaOperators &ops) {
    const Matrix root = inverse_sqrt_psd(ops.e_matrix);
    Matrix h = root * ops.d_matrix * root;
    return 0.5 * (h + h.transpose());
}

std::size_t default_pair_count(const PairedDataset &data) {
    return std::min({data.classes(), data.p(), data.q()});
}

void canonicalize_sign(Vector &v) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) {
        v = -v;
    }
}

SpectralResult solve_dcca(const DccaOperators &ops, std::size_t classes, std::optional<std::size_t> d) {
    const auto limit = std::min({classes, ops.p, ops.q});
    const auto pairs = d.value_or(limit);
    if (pairs == 0 || pairs > limit) {
        throw std::invalid_argument("d = " + std::to_string(pairs) + " must satisfy 1 <= d <= min(c, p, q) = " +
                                    std::to_string(limit));
    }

    SpectralResult out;
    out.d = pairs;

    Eigen::SelfAdjointEigenSolver<Matrix> e_eig(ops.e_matrix);
    const Vector &e_values = e_eig.eigenvalues();
    const Real e_top = e_values.maxCoeff();
    const Real cutoff = 1e-10 * e_top;
    out.condition.e_max_eigenvalue = e_top;
    out.condition.e_min_retained_eigenvalue = e_top;
    for (Eigen::Index i = 0; i < e_values.size(); ++i) {
        if (e_values(i) > cutoff) {
            ++out.condition.e_rank;
            out.condition.e_min_retained_eigenvalue = std::min(out.condition.e_min_retained_eigenvalue, e_values(i));
        }
    }
    out.condition.e_singular = out.condition.e_rank < static_cast<std::size_t>(e_values.size());

    const Matrix root = inverse_sqrt_psd(ops.e_matrix);
    Matrix h = root * ops.d_matrix * root;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> h_eig(h);
    const auto dim = static_cast<std::size_t>(h.rows());

    // Eigen sorts ascending; walk from the top.
    for (std::size_t k = 0; k < dim; ++k) {
        out.full_spectrum.push_back(h_eig.eigenvalues()(static_cast<Eigen::Index>(dim - 1 - k)));
    }
    const Real scale = std::max<Real>(1.0, std::abs(out.full_spectrum.front()));
    for (std::size_t k = 0; k + 1 < std::min(dim, pairs + 1); ++k) {
        if (out.full_spectrum[k] - out.full_spectrum[k + 1] <= kDegeneracyTolerance * scale) {
            out.degenerate = true;
        }
    }

    for (std::size_t k = 0; k < pairs; ++k) {
        const auto col = static_cast<Eigen::Index>(dim - 1 - k);
        Vector v = h_eig.eigenvectors().col(col);
        canonicalize_sign(v);
        out.eigenvalues.push_back(h_eig.eigenvalues()(col));
        const Vector w = root * v;
        out.projections.emplace_back(w.head(ops.p), w.tail(ops.q));
        out.eigenvectors.push_back(std::move(v));
    }
    return out;
}

std::pair<Vector, Vector> normalize_to_constraints(const CenteredDataset &centered, const Vector &w_x,
                                                   const Vector &w_y) {
    const Real sx = w_x.dot(centered.x_matrix * (centered.x_matrix.transpose() * w_x));
    const Real sy = w_y.dot(centered.y_matrix * (centered.y_matrix.transpose() * w_y));
    if (sx <= 0 || sy <= 0) {
        throw std::invalid_argument("projection has zero variance and cannot be normalized");
    }
    return {w_x / std::sqrt(sx), w_y / std::sqrt(sy)};
}

Real brute_force_objective(const CenteredDataset &centered, const DccaOperators &ops, const Vector &w_x,
                           const Vector &w_y) {
    const auto &x = centered.x_matrix;
    const auto &y = centered.y_matrix;
    if (w_x.size() != x.rows() || w_y.size() != y.rows()) {
        throw std::invalid_argument("projection dimensions do not match the dataset");
    }
    const Real sx = w_x.dot(x * (x.transpose() * w_x));
    const Real sy = w_y.dot(y * (y.transpose() * w_y));
    if (std::abs(sx - 1) > kConstraintTolerance || std::abs(sy - 1) > kConstraintTolerance) {
        throw std::invalid_argument("projection violates the unit-variance constraints (" + std::to_string(sx) +
                                    ", " + std::to_string(sy) + ")");
    }
    return w_x.dot(x * (ops.class_block * (y.transpose() * w_y)));
}

}  // namespace qdcca
