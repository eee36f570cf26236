#include "qdcca/block_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdcca {

namespace {

using Idx = Eigen::Index;

CMatrix psd_sqrt(const CMatrix &m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
    const Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Idx i = 0; i < a.rows(); ++i) {
        for (Idx j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Unitary on (anc, sys) embedded into (anc0, anc1, sys), acting on anc_k.
CMatrix embed(const CMatrix &u, Idx anc0, Idx anc1, Idx sys, int k) {
    const Idx d = anc0 * anc1 * sys;
    CMatrix out = CMatrix::Zero(d, d);
    const Idx own = k == 0 ? anc0 : anc1;
    const Idx other = k == 0 ? anc1 : anc0;
    auto index = [&](Idx mine, Idx theirs, Idx s) {
        const Idx a0 = k == 0 ? mine : theirs;
        const Idx a1 = k == 0 ? theirs : mine;
        return (a0 * anc1 + a1) * sys + s;
    };
    for (Idx t = 0; t < other; ++t) {
        for (Idx r = 0; r < own * sys; ++r) {
            for (Idx c = 0; c < own * sys; ++c) {
                out(index(r / sys, t, r % sys), index(c / sys, t, c % sys)) = u(r, c);
            }
        }
    }
    return out;
}

// Unitary with first column `v`.
CMatrix preparation_unitary(const CVector &v) {
    const Idx d = v.size();
    const Real phase = std::abs(v(0)) > 0 ? std::arg(v(0)) : 0.0;
    const Complex ph = std::polar(1.0, phase);
    CVector w = v;
    w(0) -= ph;
    const Real nw = w.squaredNorm();
    if (nw < 1e-30) {
        return ph * CMatrix::Identity(d, d);
    }
    CMatrix h = CMatrix::Identity(d, d) - (2.0 / nw) * w * w.adjoint();
    return ph * h;
}

}  // namespace

CMatrix BlockEncoding::block() const {
    const auto d = static_cast<Idx>(encoded_dim);
    return unitary.topLeftCorner(d, d);
}

unsigned BlockEncoding::simulated_ancilla_qubits() const {
    std::size_t ratio = static_cast<std::size_t>(unitary.rows()) / std::max<std::size_t>(1, encoded_dim);
    unsigned bits = 0;
    while ((std::size_t{1} << bits) < ratio) {
        ++bits;
    }
    return bits;
}

BlockEncoding BlockEncoding::compressed() const {
    return dilation_encoding(name, block(), norm_factor, ancilla_qubits, error_bound);
}

CMatrix block_extract(const BlockEncoding &be) { return be.norm_factor * be.block(); }

Real unitarity_error(const CMatrix &u) {
    return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

BlockEncoding dilation_encoding(std::string name, const CMatrix &block, Real norm_factor, unsigned ancilla_qubits,
                                Real error_bound) {
    const Idx d = block.rows();
    if (block.cols() != d) {
        throw std::invalid_argument("dilation needs a square block");
    }
    Eigen::JacobiSVD<CMatrix> svd(block);
    if (d > 0 && svd.singularValues()(0) > 1 + 1e-9) {
        throw std::domain_error("block is not a contraction");
    }
    const CMatrix id = CMatrix::Identity(d, d);
    CMatrix u(2 * d, 2 * d);
    u.topLeftCorner(d, d) = block;
    u.topRightCorner(d, d) = psd_sqrt(id - block * block.adjoint());
    u.bottomLeftCorner(d, d) = psd_sqrt(id - block.adjoint() * block);
    u.bottomRightCorner(d, d) = -block.adjoint();
    return BlockEncoding{std::move(name), std::move(u), norm_factor, ancilla_qubits, error_bound,
                         static_cast<std::size_t>(d)};
}

BlockEncoding identity_encoding(std::size_t dim) {
    const auto d = static_cast<Idx>(dim);
    return BlockEncoding{"identity", CMatrix::Identity(d, d), 1.0, 0, 0.0, dim};
}

unsigned ceil_log2(std::size_t value) {
    unsigned bits = 0;
    while ((std::size_t{1} << bits) < value) {
        ++bits;
    }
    return bits;
}

unsigned ancilla_budget_e(std::size_t n, unsigned log_m1) { return ceil_log2(n) + log_m1 + 4; }
unsigned ancilla_budget_j(std::size_t c, unsigned log_m2) { return ceil_log2(c) + log_m2 + 1; }
unsigned ancilla_budget_k(std::size_t c, unsigned log_m2) { return ancilla_budget_j(c, log_m2) + 3; }

unsigned EncodingParams::a_prime() const {
    const Real e3 = std::clamp(eps3, 1e-300, 0.5);
    const Real term = std::pow(kappa, 1.5) * std::log2(1.0 / e3);
    const auto extra = static_cast<unsigned>(std::max(1.0, std::ceil(std::log2(std::max(term, 2.0)))));
    return a_e + s + extra;
}
unsigned EncodingParams::a_double_prime() const { return a_j + s + 2 * a_prime(); }
unsigned EncodingParams::a_triple_prime() const { return a_k + s + 2 * a_prime(); }
Real EncodingParams::eps_f() const { return 4 * std::sqrt(kappa) * (eps3 + 2 * std::sqrt(kappa) * eps_j); }
Real EncodingParams::eps_g() const { return 4 * std::sqrt(kappa) * (eps3 + 2 * std::sqrt(kappa) * eps_k); }
Real EncodingParams::eps_htilde() const {
    return 32 * std::pow(kappa, 1.5) * (eps3 + 2 * std::sqrt(kappa) * eps_j);
}

Real required_state_error(Real eps3, Real kappa, Real constant) {
    const Real k32 = std::pow(kappa, 1.5);
    const Real l = std::max(1.0, std::log2(k32 / eps3));
    return constant * eps3 / (k32 * l * l * l);
}

Real solve_eps3(Real eps_state, Real kappa, Real constant) {
    if (eps_state <= 0) {
        return 0;
    }
    // required_state_error is increasing in eps3
    Real lo = 0;
    Real hi = 1;
    while (required_state_error(hi, kappa, constant) < eps_state) {
        hi *= 2;
    }
    for (int it = 0; it < 200; ++it) {
        const Real mid = 0.5 * (lo + hi);
        (required_state_error(mid, kappa, constant) < eps_state ? lo : hi) = mid;
    }
    return hi;
}

BlockEncoding density_encoding(const CMatrix &purification, unsigned logical_ancilla, Real state_error,
                               std::string name) {
    const Idx d = purification.rows();
    Eigen::JacobiSVD<CMatrix> svd(purification, Eigen::ComputeThinU);
    const Idx r = std::min<Idx>(d, svd.singularValues().size());
    // compressed purification over anc (d) x sys (d), index a*d + s
    CVector psi = CVector::Zero(d * d);
    for (Idx a = 0; a < r; ++a) {
        for (Idx s = 0; s < d; ++s) {
            psi(a * d + s) = svd.singularValues()(a) * svd.matrixU()(s, a);
        }
    }
    const Real norm = psi.norm();
    if (norm < 1e-12) {
        throw std::invalid_argument("empty purification");
    }
    psi /= norm;
    const CMatrix prep = preparation_unitary(psi);
    const Idx big = d * d * d;
    // registers (a, s, s'), the first two prepared, the encoded system is s'
    CMatrix swap = CMatrix::Zero(big, big);
    for (Idx a = 0; a < d; ++a) {
        for (Idx s = 0; s < d; ++s) {
            for (Idx t = 0; t < d; ++t) {
                swap((a * d + t) * d + s, (a * d + s) * d + t) = 1;
            }
        }
    }
    const CMatrix id = CMatrix::Identity(d, d);
    const CMatrix up = kron(prep, id);
    CMatrix u = up.adjoint() * swap * up;
    return BlockEncoding{std::move(name), std::move(u), 1.0, logical_ancilla, 2 * state_error,
                         static_cast<std::size_t>(d)};
}

BlockEncoding density_encoding(const PreparedState &prepared, Real state_error) {
    const CMatrix amp = system_amplitude_matrix(prepared.state, prepared.system_reg, prepared.report.system_count);
    const auto s = ceil_log2(prepared.report.system_count);
    return density_encoding(amp, prepared.report.ancilla_qubits + s, state_error, "rho_" + prepared.report.name);
}

namespace {

struct Retained {
    CMatrix vectors;
    Vector values;
};

Retained retained_spectrum(const BlockEncoding &rho, Real kappa_cutoff) {
    const CMatrix m = block_extract(rho);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
    const Vector ev = es.eigenvalues();
    const Real top = ev.maxCoeff();
    if (top <= 0) {
        throw std::domain_error("encoded density has no positive spectrum");
    }
    const Real floor = top / (kappa_cutoff * 1.01);
    std::vector<Idx> keep;
    for (Idx i = 0; i < ev.size(); ++i) {
        if (ev(i) >= floor) {
            keep.push_back(i);
        }
    }
    Retained out{CMatrix(m.rows(), static_cast<Idx>(keep.size())), Vector(static_cast<Idx>(keep.size()))};
    for (Idx k = 0; k < static_cast<Idx>(keep.size()); ++k) {
        out.vectors.col(k) = es.eigenvectors().col(keep[static_cast<std::size_t>(k)]);
        out.values(k) = ev(keep[static_cast<std::size_t>(k)]);
    }
    return out;
}

}  // namespace

Real measure_kappa(const BlockEncoding &rho, Real kappa_cutoff) {
    return 1.0 / retained_spectrum(rho, kappa_cutoff).values.minCoeff();
}

BlockEncoding inverse_sqrt_encoding(const BlockEncoding &rho, const EncodingParams &params) {
    const Retained ret = retained_spectrum(rho, params.kappa_cutoff);
    const Real kappa = 1.0 / ret.values.minCoeff();
    if (kappa > params.kappa * (1 + 1e-9)) {
        throw std::domain_error("retained spectrum needs kappa " + std::to_string(kappa) + " above the declared " +
                                std::to_string(params.kappa));
    }
    const Real alpha = 2 * std::sqrt(params.kappa);
    const Vector inv = ret.values.cwiseSqrt().cwiseInverse() / alpha;
    const CMatrix block = ret.vectors * inv.cast<Complex>().asDiagonal() * ret.vectors.adjoint();
    return dilation_encoding("inv_sqrt_" + rho.name, block, alpha, params.a_prime(), params.eps3);
}

BlockEncoding product_encoding(const BlockEncoding &a, const BlockEncoding &b, std::string name) {
    if (a.encoded_dim != b.encoded_dim) {
        throw std::invalid_argument("product of encodings with different dimensions");
    }
    const BlockEncoding ca = a.compressed();
    const BlockEncoding cb = b.compressed();
    const auto d = static_cast<Idx>(a.encoded_dim);
    // registers (anc_a, anc_b, sys): B acts first
    const CMatrix u = embed(ca.unitary, 2, 2, d, 0) * embed(cb.unitary, 2, 2, d, 1);
    return BlockEncoding{std::move(name), u, a.norm_factor * b.norm_factor, a.ancilla_qubits + b.ancilla_qubits,
                         a.norm_factor * b.error_bound + b.norm_factor * a.error_bound, a.encoded_dim};
}

BlockEncoding linear_combination_encoding(const BlockEncoding &f, const BlockEncoding &g, std::string name) {
    if (f.encoded_dim != g.encoded_dim) {
        throw std::invalid_argument("combination of encodings with different dimensions");
    }
    if (std::abs(f.norm_factor - g.norm_factor) > 1e-12 * std::max(1.0, f.norm_factor)) {
        throw std::invalid_argument("combination needs equal norm factors");
    }
    const BlockEncoding cf = f.compressed();
    const BlockEncoding cg = g.compressed();
    const Idx inner = cf.unitary.rows();
    const Real h = 1 / std::sqrt(2.0);
    CMatrix had(2, 2);
    had << h, h, h, -h;
    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    const CMatrix pl = had * x;
    const CMatrix pr = had;
    CMatrix select = CMatrix::Zero(2 * inner, 2 * inner);
    select.topLeftCorner(inner, inner) = cf.unitary;
    select.bottomRightCorner(inner, inner) = cg.unitary;
    const CMatrix id = CMatrix::Identity(inner, inner);
    const CMatrix u = kron(pl.adjoint(), id) * select * kron(pr, id);
    const unsigned anc = std::max(f.ancilla_qubits, g.ancilla_qubits) + 1;
    return BlockEncoding{std::move(name), u, 2 * f.norm_factor, anc,
                         2 * f.norm_factor * std::max(f.error_bound, g.error_bound), f.encoded_dim};
}

}  // namespace qdcca
