#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "qdcca/dcca.hpp"
#include "test_util.hpp"

using namespace qdcca;

namespace {

PairedDataset tiny() {
    Matrix a(1, 4), b(1, 4);
    a << 1, 2, 3, 4;
    b << 1, 1, 2, 2;
    return PairedDataset(a, b, {2, 2});
}

}  // namespace

TEST(MeanCenter, SubtractsRowMean) {
    Matrix a(1, 4), b(1, 4);
    a << 1, 2, 3, 4;
    b << 0, 0, 0, 0;
    const auto c = mean_center(PairedDataset(a, b, {4}));
    EXPECT_NEAR(c.row_means(0), 2.5, 1e-15);
    EXPECT_DOUBLE_EQ(c.x_matrix(0, 0), -1.5);
    EXPECT_DOUBLE_EQ(c.x_matrix(0, 3), 1.5);
    EXPECT_NEAR(c.x_matrix.sum(), 0, 1e-14);
    EXPECT_EQ(c.y_matrix.cwiseAbs().maxCoeff(), 0);
    EXPECT_EQ(c.row_means(1), 0);
}

TEST(MeanCenter, SingleSampleIsZero) {
    Matrix a(1, 1), b(1, 1);
    a << 5;
    b << -2;
    const auto c = mean_center(PairedDataset(a, b, {1}));
    EXPECT_EQ(c.x_matrix(0, 0), 0);
    EXPECT_EQ(c.y_matrix(0, 0), 0);
}

TEST(MeanCenter, RowsSumToZero) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto data = testutil::random_dataset(rng, 3, 2, 10, 3);
        const auto c = mean_center(data);
        const double tol = 1e-12 * static_cast<double>(data.n()) * data.max_abs_entry();
        EXPECT_LE(c.x_matrix.rowwise().sum().cwiseAbs().maxCoeff(), tol);
        EXPECT_LE(c.y_matrix.rowwise().sum().cwiseAbs().maxCoeff(), tol);
    }
}

TEST(Dataset, RejectsBadShapes) {
    Matrix a = Matrix::Ones(1, 4), b = Matrix::Ones(1, 3);
    EXPECT_THROW(PairedDataset(a, b, {2, 2}), std::invalid_argument);
    EXPECT_THROW(PairedDataset(a, Matrix::Ones(1, 4), {2, 1}), std::invalid_argument);
    EXPECT_THROW(PairedDataset(a, Matrix::Ones(1, 4), {}), std::invalid_argument);
}

TEST(Dataset, PaddedBlocks) {
    Matrix a(1, 5), b(1, 5);
    a << 1, 2, 3, 4, 5;
    b << 6, 7, 8, 9, 10;
    const PairedDataset data(a, b, {3, 2});
    const auto padded = PaddedDataset::from(data);
    ASSERT_EQ(padded.block_width, 3u);
    ASSERT_EQ(padded.padded_matrix.cols(), 6);
    EXPECT_EQ(padded.padded_matrix(0, 2), 3);
    EXPECT_EQ(padded.padded_matrix(0, 3), 4);
    EXPECT_EQ(padded.padded_matrix(1, 4), 10);
    EXPECT_EQ(padded.padded_matrix(0, 5), 0);
    EXPECT_EQ(padded.padded_matrix(1, 5), 0);
}

TEST(BuildOperators, TinyInstance) {
    const auto data = tiny();
    const auto ops = build_operators(mean_center(data), data);
    EXPECT_NEAR(ops.class_sums_x(0, 0), -2, 1e-14);
    EXPECT_NEAR(ops.class_sums_x(0, 1), 2, 1e-14);
    EXPECT_NEAR(ops.class_sums_y(0, 0), -1, 1e-14);
    EXPECT_NEAR(ops.class_sums_y(0, 1), 1, 1e-14);
    Matrix e(2, 2), j(2, 2), k(2, 2), d(2, 2);
    e << 5, 0, 0, 1;
    j << 8, 4, 4, 2;
    k << 8, 0, 0, 2;
    d << 0, 4, 4, 0;
    EXPECT_LE((ops.e_matrix - e).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE((ops.j_matrix - j).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE((ops.k_matrix - k).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE((ops.d_matrix - d).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(BuildOperators, SingleClassVanishes) {
    Matrix a(1, 4), b(1, 4);
    a << 1, 2, 3, 4;
    b << 4, 3, 1, 0;
    const PairedDataset data(a, b, {4});
    const auto ops = build_operators(mean_center(data), data);
    EXPECT_LE(ops.class_sums_x.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(ops.j_matrix.cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE(ops.d_matrix.cwiseAbs().maxCoeff(), 1e-13);
}

TEST(BuildOperators, SingletonClassesGiveGram) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    Matrix a(2, 5);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a(i) = g(rng);
    }
    const PairedDataset data(a, a, {1, 1, 1, 1, 1});
    const auto centered = mean_center(data);
    const auto ops = build_operators(centered, data);
    const Matrix xx = centered.x_matrix * centered.x_matrix.transpose();
    EXPECT_LE((ops.d_matrix.topRightCorner(2, 2) - xx).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildOperators, RejectsMismatch) {
    const auto data = tiny();
    auto centered = mean_center(data);
    centered.x_matrix = Matrix::Zero(1, 3);
    EXPECT_THROW(build_operators(centered, data), std::invalid_argument);
}

TEST(BuildOperators, PropertiesOnRandomData) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto data = testutil::random_dataset(rng, 6, 6, 24, 4);
        const auto ops = build_operators(mean_center(data), data);
        EXPECT_EQ((ops.d_matrix - (ops.j_matrix - ops.k_matrix)).cwiseAbs().maxCoeff(), 0);
        for (const Matrix *m : {&ops.e_matrix, &ops.j_matrix, &ops.k_matrix}) {
            Eigen::SelfAdjointEigenSolver<Matrix> eig(*m);
            const double norm = std::max(1.0, m->norm());
            EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10 * norm);
        }
        EXPECT_LE((ops.e_matrix - ops.e_factor * ops.e_factor.transpose()).norm(), 1e-12 * ops.e_matrix.norm());
        EXPECT_LE((ops.k_matrix - ops.k_factor * ops.k_factor.transpose()).norm(),
                  1e-12 * std::max(1.0, ops.k_matrix.norm()));
        const Matrix h = reduced_hamiltonian(ops);
        EXPECT_LE((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(SolveDcca, TinyInstance) {
    const auto data = tiny();
    const auto ops = build_operators(mean_center(data), data);
    const auto res = solve_dcca(ops, data.classes(), 1);
    ASSERT_EQ(res.eigenvalues.size(), 1u);
    EXPECT_NEAR(res.eigenvalues[0], 4 / std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(res.eigenvectors[0](0), 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(res.eigenvectors[0](1), 1 / std::sqrt(2.0), 1e-12);
    EXPECT_FALSE(res.condition.e_singular);
}

TEST(SolveDcca, RejectsBadPairCount) {
    const auto data = tiny();
    const auto ops = build_operators(mean_center(data), data);
    EXPECT_THROW(solve_dcca(ops, data.classes(), 0), std::invalid_argument);
    EXPECT_THROW(solve_dcca(ops, data.classes(), 2), std::invalid_argument);
}

TEST(SolveDcca, DefaultPairCount) {
    std::mt19937_64 rng(2);
    const auto data = testutil::random_dataset(rng, 3, 4, 12, 2);
    EXPECT_EQ(default_pair_count(data), 2u);
    const auto ops = build_operators(mean_center(data), data);
    EXPECT_EQ(solve_dcca(ops, data.classes()).eigenvalues.size(), 2u);
}

TEST(SolveDcca, ZeroOperator) {
    Matrix a(2, 4), b(1, 4);
    a << 1, -1, 1, -1, 2, 0, 2, 0;
    b << 1, -1, 1, -1;
    // class sums vanish: both classes have the same mean
    const PairedDataset data(a, b, {2, 2});
    const auto ops = build_operators(mean_center(data), data);
    const auto res = solve_dcca(ops, 2, 1);
    for (double v : res.full_spectrum) {
        EXPECT_NEAR(v, 0, 1e-12);
    }
    EXPECT_TRUE(res.degenerate);
}

TEST(SolveDcca, IdentityConstraintIsOrdinaryProblem) {
    DccaOperators ops;
    ops.p = 2;
    ops.q = 2;
    ops.e_matrix = Matrix::Identity(4, 4);
    Matrix d = Matrix::Zero(4, 4);
    d.topRightCorner(2, 2) << 3, 1, 1, 2;
    d.bottomLeftCorner(2, 2) = d.topRightCorner(2, 2).transpose();
    ops.d_matrix = d;
    const auto res = solve_dcca(ops, 2, 2);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(d);
    EXPECT_NEAR(res.eigenvalues[0], eig.eigenvalues()(3), 1e-12);
    EXPECT_NEAR(res.eigenvalues[1], eig.eigenvalues()(2), 1e-12);
}

TEST(SolveDcca, MatchesGeneralizedEigensolver) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto data = testutil::random_dataset(rng, 4, 4, 20, 4);
        const auto ops = build_operators(mean_center(data), data);
        const auto res = solve_dcca(ops, data.classes());
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> gen(ops.d_matrix, ops.e_matrix);
        const auto m = gen.eigenvalues().size();
        for (std::size_t i = 0; i < res.eigenvalues.size(); ++i) {
            EXPECT_NEAR(res.eigenvalues[i], gen.eigenvalues()(m - 1 - static_cast<Eigen::Index>(i)), 1e-8);
            Vector w(ops.p + ops.q);
            w << res.projections[i].first, res.projections[i].second;
            const Vector resid = (ops.d_matrix - res.eigenvalues[i] * ops.e_matrix) * w;
            EXPECT_LE(resid.norm(), 1e-8 * ops.d_matrix.norm());
            EXPECT_NEAR(res.eigenvectors[i].norm(), 1, 1e-12);
            Eigen::Index arg = 0;
            res.eigenvectors[i].cwiseAbs().maxCoeff(&arg);
            EXPECT_GT(res.eigenvectors[i](arg), 0);
        }
        for (std::size_t i = 1; i < res.full_spectrum.size(); ++i) {
            EXPECT_LE(res.full_spectrum[i], res.full_spectrum[i - 1]);
        }
    }
}

TEST(SolveDcca, ScaleInvariant) {
    std::mt19937_64 rng(5);
    const auto data = testutil::random_dataset(rng, 3, 3, 12, 3);
    const PairedDataset scaled(3.7 * data.a(), 3.7 * data.b(), data.class_sizes());
    // only c - 1 = 2 nonzero eigenvalues; the rest is a degenerate null space
    const auto r1 = solve_dcca(build_operators(mean_center(data), data), 3, 2);
    const auto r2 = solve_dcca(build_operators(mean_center(scaled), scaled), 3, 2);
    for (std::size_t i = 0; i < r1.eigenvalues.size(); ++i) {
        EXPECT_NEAR(r1.eigenvalues[i], r2.eigenvalues[i], 1e-10);
        EXPECT_NEAR(std::abs(r1.eigenvectors[i].dot(r2.eigenvectors[i])), 1, 1e-9);
    }
}

TEST(SolveDcca, ClassPermutationInvariant) {
    Matrix a(2, 7), b(2, 7);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    for (Eigen::Index i = 0; i < 14; ++i) {
        a(i) = g(rng);
        b(i) = g(rng);
    }
    const PairedDataset data(a, b, {3, 4});
    Matrix a2(2, 7), b2(2, 7);
    a2 << a.rightCols(4), a.leftCols(3);
    b2 << b.rightCols(4), b.leftCols(3);
    const PairedDataset swapped(a2, b2, {4, 3});
    const auto r1 = solve_dcca(build_operators(mean_center(data), data), 2);
    const auto r2 = solve_dcca(build_operators(mean_center(swapped), swapped), 2);
    for (std::size_t i = 0; i < r1.full_spectrum.size(); ++i) {
        EXPECT_NEAR(r1.full_spectrum[i], r2.full_spectrum[i], 1e-10);
    }
}

TEST(SolveDcca, SingularEFlagged) {
    Matrix a(2, 4), b(1, 4);
    a << 1, 2, 3, 4, 2, 4, 6, 8;  // rank one
    b << 1, 1, 2, 2;
    const PairedDataset data(a, b, {2, 2});
    const auto res = solve_dcca(build_operators(mean_center(data), data), 2, 1);
    EXPECT_TRUE(res.condition.e_singular);
    EXPECT_EQ(res.condition.e_rank, 2u);
    EXPECT_TRUE(std::isfinite(res.eigenvalues[0]));
}

TEST(BruteForceObjective, OptimumAndBounds) {
    const auto data = tiny();
    const auto centered = mean_center(data);
    const auto ops = build_operators(centered, data);
    const auto res = solve_dcca(ops, 2, 1);
    const auto [wx, wy] = normalize_to_constraints(centered, res.projections[0].first, res.projections[0].second);
    EXPECT_NEAR(brute_force_objective(centered, ops, wx, wy), res.eigenvalues[0], 1e-8);
    EXPECT_NEAR(brute_force_objective(centered, ops, wx, -wy), -res.eigenvalues[0], 1e-8);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int i = 0; i < 1000; ++i) {
        Vector rx(1), ry(1);
        rx << g(rng);
        ry << g(rng);
        const auto [nx, ny] = normalize_to_constraints(centered, rx, ry);
        EXPECT_LE(brute_force_objective(centered, ops, nx, ny), res.eigenvalues[0] + 1e-8);
    }
}

TEST(BruteForceObjective, RejectsInfeasible) {
    const auto data = tiny();
    const auto centered = mean_center(data);
    const auto ops = build_operators(centered, data);
    Vector w(1);
    w << 1;
    EXPECT_THROW(brute_force_objective(centered, ops, w, w), std::invalid_argument);
}
