#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qdcca/dcca.hpp"
#include "qdcca/state_preparation.hpp"
#include "test_util.hpp"

using namespace qdcca;

namespace {

PairedDataset tiny() {
    Matrix a(1, 4), b(1, 4);
    a << 1, 2, 3, 4;
    b << 1, 1, 2, 2;
    return PairedDataset(a, b, {2, 2});
}

struct Prepared {
    PairedDataset data;
    DccaOperators ops;
    ScalingBounds bounds;
    StatePrepConfig config;
    MeanEstimates means;

    explicit Prepared(PairedDataset d, bool amplify = true)
        : data(std::move(d)), ops(build_operators(mean_center(data), data)), bounds(ScalingBounds::from(data, ops)) {
        config.amplify = amplify;
        config.seed = 3;
        config.injected_row_means = mean_center(data).row_means;
        const auto padded = PaddedDataset::from(data);
        Matrix cm(data.classes(), data.dim());
        for (std::size_t i = 0; i < data.classes(); ++i) {
            cm.row(static_cast<Eigen::Index>(i)) =
                padded.padded_matrix.middleCols(static_cast<Eigen::Index>(i * padded.block_width),
                                                static_cast<Eigen::Index>(padded.block_width))
                    .rowwise()
                    .mean()
                    .transpose();
        }
        config.injected_class_means = cm;
        means = estimate_means(data, config);
    }
};

// |<a, b>|^2 / (|a|^2 |b|^2) for matrices read as vectors
double matrix_fidelity(const CMatrix &a, const Matrix &b) {
    const Complex dot = (a.conjugate().cwiseProduct(b.cast<Complex>())).sum();
    return std::norm(dot) / (a.squaredNorm() * b.squaredNorm());
}

}  // namespace

TEST(ScalingBounds, CoverEntries) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const auto data = testutil::random_dataset(rng, 3, 3, 12, 3);
        const auto ops = build_operators(mean_center(data), data);
        const auto b = ScalingBounds::from(data, ops);
        EXPECT_LE(ops.e_factor.cwiseAbs().maxCoeff(), b.alpha);
        EXPECT_LE(ops.j_factor.cwiseAbs().maxCoeff(), b.beta);
        EXPECT_NEAR(ops.k_factor.norm(), ops.j_factor.norm(), 1e-12 * std::max(1.0, ops.j_factor.norm()));
    }
}

TEST(PreparePsiE, ExactMeansHighFidelity) {
    Prepared s(tiny());
    const auto psi = prepare_psi_e(s.data, s.bounds, s.means, s.config);
    EXPECT_GE(psi.fidelity(s.ops.e_factor), 1 - 1e-3);
    EXPECT_GE(matrix_fidelity(psi.factor_amplitudes(), s.ops.e_factor), 1 - 1e-8);
    EXPECT_NEAR(psi.state.norm(), 1, 1e-10);
}

TEST(PreparePsiE, TinyAmplitudeLayout) {
    Prepared s(tiny());
    const auto psi = prepare_psi_e(s.data, s.bounds, s.means, s.config);
    const CMatrix amps = psi.factor_amplitudes();
    ASSERT_EQ(amps.rows(), 2);
    ASSERT_EQ(amps.cols(), 8);
    Matrix expected(2, 8);
    expected << -1.5, -0.5, 0.5, 1.5, 0, 0, 0, 0,  //
        0, 0, 0, 0, -0.5, -0.5, 0.5, 0.5;
    EXPECT_GE(matrix_fidelity(amps, expected), 1 - 1e-10);
    EXPECT_LE(amps.block(0, 4, 1, 4).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PreparePsiE, ConstantDataRejected) {
    const PairedDataset data(Matrix::Constant(1, 4, 2.0), Matrix::Constant(1, 4, -1.0), {2, 2});
    const auto ops = build_operators(mean_center(data), data);
    StatePrepConfig config;
    config.injected_row_means = mean_center(data).row_means;
    config.injected_class_means = Matrix::Zero(2, 2);
    EXPECT_ANY_THROW({
        const auto bounds = ScalingBounds::from(data, ops);
        const auto means = estimate_means(data, config);
        prepare_psi_e(data, bounds, means, config);
    });
}

TEST(PreparePsiJ, TinyAmplitudes) {
    Prepared s(tiny());
    const auto psi = prepare_psi_j(s.data, s.bounds, s.means, s.config);
    Matrix expected(2, 2);
    expected << -2, 2, -1, 1;
    EXPECT_GE(matrix_fidelity(psi.factor_amplitudes(), expected), 1 - 1e-10);
    EXPECT_GE(psi.fidelity(s.ops.j_factor), 1 - 1e-3);
}

TEST(PreparePsiJ, SingleClassRejected) {
    Matrix a(1, 4), b(1, 4);
    a << 1, 2, 3, 4;
    b << 3, 1, 4, 1;
    EXPECT_ANY_THROW({
        Prepared s(PairedDataset(a, b, {4}));
        prepare_psi_j(s.data, s.bounds, s.means, s.config);
    });
}

TEST(PreparePsiJ, DuplicatedClassesSymmetric) {
    Matrix a(1, 6), b(1, 6);
    a << 1, 3, 1, 3, 7, 8;
    b << 0, 2, 0, 2, -3, -1;
    Prepared s(PairedDataset(a, b, {2, 2, 2}));
    const CMatrix amps = prepare_psi_j(s.data, s.bounds, s.means, s.config).factor_amplitudes();
    EXPECT_LE((amps.col(0) - amps.col(1)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PreparePsiK, TinyBlockLayout) {
    Prepared s(tiny());
    const auto psi = prepare_psi_k(s.data, s.bounds, s.means, s.config);
    const CMatrix amps = psi.factor_amplitudes();
    Matrix expected(2, 4);
    expected << -2, 2, 0, 0, 0, 0, -1, 1;
    EXPECT_GE(matrix_fidelity(amps, expected), 1 - 1e-10);
    EXPECT_LE(std::abs(amps(0, 2)) + std::abs(amps(0, 3)) + std::abs(amps(1, 0)) + std::abs(amps(1, 1)), 1e-10);
}

TEST(PreparePsiK, ForcedZerosOnRandomData) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        Prepared s(testutil::random_dataset(rng, 2, 1, 6, 2));
        const CMatrix amps = prepare_psi_k(s.data, s.bounds, s.means, s.config).factor_amplitudes();
        const auto p = static_cast<Eigen::Index>(s.data.p());
        const auto c = static_cast<Eigen::Index>(s.data.classes());
        EXPECT_LE(amps.topRightCorner(p, c).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE(amps.bottomLeftCorner(amps.rows() - p, c).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(TraceOutFirst, ProductAndEntangled) {
    RegisterLayout layout;
    layout.add("a", 1);
    layout.add("b", 1);
    const double h = 1 / std::sqrt(2.0);
    const QuantumState product(layout, {{BasisIndex{0}, Complex{0.6, 0}}, {BasisIndex{1}, Complex{0, 0.8}}});
    const CMatrix rho = trace_out_first(product);
    EXPECT_NEAR(std::abs(rho(0, 0) - 0.36), 0, 1e-15);
    EXPECT_NEAR(std::abs(rho(0, 1) - Complex(0.6, 0) * std::conj(Complex(0, 0.8))), 0, 1e-15);
    const QuantumState bell(layout, {{BasisIndex{0}, h}, {BasisIndex{3}, h}});
    EXPECT_LE((trace_out_first(bell) - 0.5 * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(TraceOutFirst, PsiEGivesNormalizedE) {
    Prepared s(tiny());
    const auto psi = prepare_psi_e(s.data, s.bounds, s.means, s.config);
    const CMatrix rho = reduced_density(psi.state, psi.system_reg, 2);
    EXPECT_NEAR(rho.trace().real(), 1, 1e-10);
    EXPECT_LE((rho - rho.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    Matrix expected(2, 2);
    expected << 5.0 / 6, 0, 0, 1.0 / 6;
    EXPECT_LE((rho.real() - expected).cwiseAbs().maxCoeff(), 2e-4);
}

TEST(TraceRatio, TinyWithinThreeStandardErrors) {
    Prepared s(tiny(), false);
    const auto psi_e = prepare_psi_e(s.data, s.bounds, s.means, s.config);
    const auto psi_j = prepare_psi_j(s.data, s.bounds, s.means, s.config);
    Rng rng(77);
    const auto est = estimate_trace_ratio(psi_e, psi_j, s.data, s.bounds, 10000, rng);
    EXPECT_LE(std::abs(est.ratio - 10.0 / 6), 3 * est.standard_error);
    EXPECT_LE(est.ratio, est.bound_simple);
}

TEST(TraceRatio, BoundAudit) {
    std::mt19937_64 gen(19);
    for (int trial = 0; trial < 5; ++trial) {
        Prepared s(testutil::random_dataset(gen, 1, 1, 6, 2), false);
        const auto psi_e = prepare_psi_e(s.data, s.bounds, s.means, s.config);
        const auto psi_j = prepare_psi_j(s.data, s.bounds, s.means, s.config);
        Rng rng(static_cast<std::uint64_t>(trial));
        const auto est = estimate_trace_ratio(psi_e, psi_j, s.data, s.bounds, 200000, rng);
        EXPECT_LE(est.ratio, est.bound_simple);
    }
}

TEST(FactorErrorBound, ZeroErrorIsZero) {
    EXPECT_EQ(factor_error_bound(2.0, 0.0, 0.5), 0.0);
    EXPECT_GT(factor_error_bound(2.0, 0.01, 0.5), factor_error_bound(2.0, 0.005, 0.5));
}
