#include <gtest/gtest.h>

#include <cmath>

#include "qdcca/block_encoding.hpp"
#include "qdcca/dcca.hpp"
#include "qdcca/random.hpp"

using namespace qdcca;

namespace {

struct Tiny {
    DccaOperators ops;
    CMatrix psi_e, psi_j, psi_k;
    Tiny() {
        Matrix a(1, 4), b(1, 4);
        a << 1, 2, 3, 4;
        b << 1, 1, 2, 2;
        const PairedDataset data(a, b, {2, 2});
        ops = build_operators(mean_center(data), data);
        psi_e = (ops.e_factor / ops.e_factor.norm()).cast<Complex>();
        psi_j = (ops.j_factor / ops.j_factor.norm()).cast<Complex>();
        psi_k = (ops.k_factor / ops.k_factor.norm()).cast<Complex>();
    }
};

EncodingParams params_for(const BlockEncoding &rho, Real eps3) {
    EncodingParams p;
    p.kappa = measure_kappa(rho, p.kappa_cutoff);
    p.eps3 = eps3;
    p.s = 1;
    p.a_e = 2;
    p.a_j = 1;
    p.a_k = 4;
    return p;
}

CMatrix random_contraction(Rng &rng, Eigen::Index dim) {
    CMatrix m(dim, dim);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m(i) = Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
    }
    return m / (1.01 * m.operatorNorm());
}

}  // namespace

TEST(DensityEncoding, TinyPsiE) {
    Tiny t;
    const auto be = density_encoding(t.psi_e, 3, 0.0, "rho_E");
    EXPECT_LE(unitarity_error(be.unitary), 1e-10);
    Matrix expected(2, 2);
    expected << 5.0 / 6, 0, 0, 1.0 / 6;
    EXPECT_LE((block_extract(be) - expected.cast<Complex>()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(DensityEncoding, MaximallyMixed) {
    const CMatrix purification = CMatrix::Identity(2, 2) / std::sqrt(2.0);
    const auto be = density_encoding(purification, 1, 0.0);
    EXPECT_LE((block_extract(be) - 0.5 * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DensityEncoding, PerturbationWithinTwiceError) {
    Tiny t;
    Rng rng(4);
    const CMatrix rho = t.psi_e * t.psi_e.adjoint();
    for (double eps : {1e-3, 1e-2}) {
        CMatrix noise(t.psi_e.rows(), t.psi_e.cols());
        for (Eigen::Index i = 0; i < noise.size(); ++i) {
            noise(i) = Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
        }
        CMatrix perturbed = t.psi_e + eps * noise / noise.norm();
        perturbed /= perturbed.norm();
        const double dist = (perturbed - t.psi_e).norm();
        const auto be = density_encoding(perturbed, 3, dist);
        EXPECT_NEAR(be.error_bound, 2 * dist, 1e-15);
        EXPECT_LE((block_extract(be) - rho).operatorNorm(), 2 * dist);
    }
}

TEST(InverseSqrt, TinySpectrum) {
    Tiny t;
    const auto rho = density_encoding(t.psi_e, 3, 0.0);
    const auto params = params_for(rho, 1e-3);
    EXPECT_NEAR(params.kappa, 6.0, 1e-8);
    const auto inv = inverse_sqrt_encoding(rho, params);
    EXPECT_NEAR(inv.norm_factor, 2 * std::sqrt(params.kappa), 1e-12);
    EXPECT_EQ(inv.ancilla_qubits, params.a_prime());
    EXPECT_LE(unitarity_error(inv.unitary), 1e-10);
    Matrix expected(2, 2);
    expected << std::pow(5.0 / 6, -0.5), 0, 0, std::sqrt(6.0);
    EXPECT_LE((block_extract(inv) - expected.cast<Complex>()).cwiseAbs().maxCoeff(), params.eps3);
}

TEST(InverseSqrt, ScalarSpectrum) {
    const CMatrix purification = CMatrix::Identity(4, 4) / 2.0;
    const auto rho = density_encoding(purification, 2, 0.0);
    const auto params = params_for(rho, 1e-3);
    EXPECT_NEAR(params.kappa, 4.0, 1e-10);
    const auto inv = inverse_sqrt_encoding(rho, params);
    // rho^{-1/2} = 2 I; squaring through a product gives rho^{-1} = 4 I
    EXPECT_LE((block_extract(inv) - 2.0 * CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
    const auto sq = product_encoding(inv, inv);
    EXPECT_LE((block_extract(sq) - 4.0 * CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(InverseSqrt, NullDirectionMapsToZero) {
    CMatrix purification = CMatrix::Zero(2, 2);
    purification(0, 0) = 1;
    const auto rho = density_encoding(purification, 1, 0.0);
    const auto inv = inverse_sqrt_encoding(rho, params_for(rho, 1e-3));
    const CMatrix block = block_extract(inv);
    EXPECT_NEAR(std::abs(block(0, 0)), 1, 1e-10);
    EXPECT_LE(std::abs(block(1, 1)) + std::abs(block(0, 1)) + std::abs(block(1, 0)), 1e-10);
}

TEST(InverseSqrt, RejectsUnderstatedKappa) {
    Tiny t;
    const auto rho = density_encoding(t.psi_e, 3, 0.0);
    auto params = params_for(rho, 1e-3);
    params.kappa = 2;
    EXPECT_THROW(inverse_sqrt_encoding(rho, params), std::domain_error);
}

TEST(ProductEncoding, IdentityLeavesBlock) {
    Rng rng(1);
    const auto a = dilation_encoding("A", random_contraction(rng, 2), 3.0, 1, 0.01);
    const auto ab = product_encoding(a, identity_encoding(2));
    EXPECT_LE((block_extract(ab) - block_extract(a)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_DOUBLE_EQ(ab.norm_factor, 3.0);
    EXPECT_EQ(ab.ancilla_qubits, a.ancilla_qubits);
    EXPECT_NEAR(ab.error_bound, 0.01, 1e-15);
}

TEST(ProductEncoding, Associative) {
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = dilation_encoding("A", random_contraction(rng, 2), 1.5, 1, 1e-3);
        const auto b = dilation_encoding("B", random_contraction(rng, 2), 2.0, 1, 2e-3);
        const auto c = dilation_encoding("C", random_contraction(rng, 2), 0.5, 1, 1e-3);
        const auto left = product_encoding(product_encoding(a, b), c);
        const auto right = product_encoding(a, product_encoding(b, c));
        EXPECT_LE((block_extract(left) - block_extract(right)).operatorNorm(), left.error_bound + right.error_bound);
        EXPECT_LE(unitarity_error(left.unitary), 1e-10);
        EXPECT_EQ(left.ancilla_qubits, 3u);
    }
}

TEST(ProductEncoding, TinyF) {
    Tiny t;
    const auto rho_e = density_encoding(t.psi_e, 3, 0.0);
    const auto rho_j = density_encoding(t.psi_j, 1, 0.0);
    const auto params = params_for(rho_e, 1e-3);
    const auto inv = inverse_sqrt_encoding(rho_e, params);
    const auto f = product_encoding(inv, product_encoding(rho_j, inv));
    EXPECT_NEAR(f.norm_factor, 4 * params.kappa, 1e-10);
    const Matrix root = inverse_sqrt_psd(t.ops.e_matrix);
    const Matrix expected =
        root * t.ops.j_matrix * root * (t.ops.e_matrix.trace() / t.ops.j_matrix.trace());
    EXPECT_LE((block_extract(f) - expected.cast<Complex>()).operatorNorm(), params.eps_f());
}

TEST(LinearCombination, TinyHtilde) {
    Tiny t;
    const auto rho_e = density_encoding(t.psi_e, 3, 0.0);
    const auto rho_j = density_encoding(t.psi_j, 1, 0.0);
    const auto rho_k = density_encoding(t.psi_k, 2, 0.0);
    const auto params = params_for(rho_e, 1e-3);
    const auto inv = inverse_sqrt_encoding(rho_e, params);
    const auto f = product_encoding(inv, product_encoding(rho_j, inv), "F");
    const auto g = product_encoding(inv, product_encoding(rho_k, inv), "G");
    const auto h = linear_combination_encoding(f, g, "H~");
    EXPECT_NEAR(h.norm_factor, 8 * params.kappa, 1e-10);
    EXPECT_LE(unitarity_error(h.unitary), 1e-10);
    const Matrix expected = (t.ops.e_matrix.trace() / t.ops.j_matrix.trace()) * reduced_hamiltonian(t.ops);
    EXPECT_LE((block_extract(h) - expected.cast<Complex>()).operatorNorm(), params.eps_htilde());
    // the tiny H has off-diagonal 4/sqrt5
    EXPECT_NEAR(std::abs(block_extract(h)(0, 1)) * t.ops.j_matrix.trace() / t.ops.e_matrix.trace(),
                4 / std::sqrt(5.0), 1e-6);
}

TEST(LinearCombination, SelfCancelsAndAntisymmetric) {
    Rng rng(3);
    const auto f = dilation_encoding("F", random_contraction(rng, 2), 2.0, 1, 1e-3);
    const auto g = dilation_encoding("G", random_contraction(rng, 2), 2.0, 1, 1e-3);
    EXPECT_LE(block_extract(linear_combination_encoding(f, f)).cwiseAbs().maxCoeff(), 1e-12);
    const CMatrix fg = block_extract(linear_combination_encoding(f, g));
    const CMatrix gf = block_extract(linear_combination_encoding(g, f));
    EXPECT_LE((fg + gf).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((fg - (block_extract(f) - block_extract(g))).cwiseAbs().maxCoeff(), 1e-12);
    const auto lc = linear_combination_encoding(f, g);
    EXPECT_DOUBLE_EQ(lc.norm_factor, 4.0);
    EXPECT_EQ(lc.ancilla_qubits, 2u);
}

TEST(LinearCombination, MismatchedNormsRejected) {
    Rng rng(5);
    const auto f = dilation_encoding("F", random_contraction(rng, 2), 2.0, 1, 0);
    const auto g = dilation_encoding("G", random_contraction(rng, 2), 3.0, 1, 0);
    EXPECT_THROW(linear_combination_encoding(f, g), std::invalid_argument);
}

TEST(BlockExtract, Identity) {
    EXPECT_LE((block_extract(identity_encoding(4)) - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AncillaBudget, ClosedForms) {
    EXPECT_EQ(ceil_log2(1), 0u);
    EXPECT_EQ(ceil_log2(5), 3u);
    EXPECT_EQ(ancilla_budget_e(8, 5), 3u + 5u + 4u);
    EXPECT_EQ(ancilla_budget_j(3, 4), 2u + 4u + 1u);
    EXPECT_EQ(ancilla_budget_k(3, 4), ancilla_budget_j(3, 4) + 3u);
    EncodingParams p;
    p.kappa = 4;
    p.eps3 = 1e-3;
    p.s = 2;
    p.a_e = 7;
    p.a_j = 3;
    p.a_k = 6;
    EXPECT_EQ(p.a_double_prime(), p.a_j + p.s + 2 * p.a_prime());
    EXPECT_EQ(p.a_triple_prime(), p.a_k + p.s + 2 * p.a_prime());
    EXPECT_GT(p.a_prime(), p.a_e + p.s);
}

TEST(RequiredStateError, InvertsByBisection) {
    for (double kappa : {2.0, 10.0, 100.0}) {
        const double eps3 = 1e-3;
        const double need = required_state_error(eps3, kappa);
        EXPECT_NEAR(solve_eps3(need, kappa) / eps3, 1, 1e-6);
        EXPECT_LT(required_state_error(eps3 / 2, kappa), need);
    }
}
