#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdcca/dataset_io.hpp"
#include "qdcca/eigensolver.hpp"

using namespace qdcca;

namespace {

PairedDataset tiny() {
    Matrix a(1, 4), b(1, 4);
    a << 1, 2, 3, 4;
    b << 1, 1, 2, 2;
    return PairedDataset(a, b, {2, 2});
}

HamiltonianSimSpec sim_spec(double t, double shift) {
    HamiltonianSimSpec s;
    s.t = t;
    s.shift = shift;
    return s;
}

PipelineConfig pipeline_config(std::uint64_t seed) {
    PipelineConfig c;
    c.t_bits = 7;
    c.seed = seed;
    c.prep.seed = seed;
    return c;
}

const QdccaResult &tiny_run() {
    static const QdccaResult result = run_qpe_pipeline(tiny(), pipeline_config(1));
    return result;
}

}  // namespace

TEST(SimulateHtilde, ZeroTimeIsIdentity) {
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 0) = 0.3;
    h(1, 1) = -0.5;
    const auto be = dilation_encoding("H", h, 1.0, 1, 0);
    const auto evo = simulate_htilde(be, sim_spec(0.0, 0.0));
    EXPECT_LE((evo.unitary - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SimulateHtilde, DiagonalClosedForm) {
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 0) = 0.3;
    h(1, 1) = -0.5;
    const auto be = dilation_encoding("H", h, 1.0, 1, 0);
    const auto evo = simulate_htilde(be, sim_spec(1.0, 0.5));
    EXPECT_LE(std::abs(evo.unitary(0, 0) - std::polar(1.0, 0.8)), 1e-10);
    EXPECT_LE(std::abs(evo.unitary(1, 1) - Complex(1, 0)), 1e-10);
    EXPECT_LE(std::abs(evo.unitary(0, 1)), 1e-10);
    EXPECT_LE((evo.power(2) - evo.unitary * evo.unitary * evo.unitary * evo.unitary).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(evo.eigenvalue_of_phase(0.8 / (2 * std::numbers::pi)), 0.3, 1e-12);
}

TEST(SimulateHtilde, RejectsAliasing) {
    const auto be = dilation_encoding("H", CMatrix::Identity(2, 2) * 0.5, 2.0, 1, 0);
    try {
        simulate_htilde(be, sim_spec(4.0, 1.0));
        FAIL() << "expected aliasing rejection";
    } catch (const std::domain_error &ex) {
        EXPECT_NE(std::string(ex.what()).find("use t <="), std::string::npos);
    }
}

TEST(SimulateHtilde, MatchesDenseExponential) {
    const auto data = tiny();
    const auto ops = build_operators(mean_center(data), data);
    const Matrix h = (ops.e_matrix.trace() / ops.j_matrix.trace()) * reduced_hamiltonian(ops);
    const double norm = h.operatorNorm();
    const auto be = dilation_encoding("H~", h.cast<Complex>() / (2 * norm), 2 * norm, 1, 0);
    const double t = 0.98 * std::numbers::pi / norm;
    const auto evo = simulate_htilde(be, sim_spec(t, norm));
    const CMatrix arg = Complex(0, t) * (h + norm * Matrix::Identity(2, 2)).cast<Complex>();
    const CMatrix expected = arg.exp();
    EXPECT_LE((evo.unitary - expected).cwiseAbs().maxCoeff(), std::max(evo.sim_error, 1e-10));
}

TEST(Pipeline, TinyInstance) {
    const auto &r = tiny_run();
    ASSERT_EQ(r.eigenvalues_h.size(), 1u);
    EXPECT_NEAR(r.eigenvalues_h[0], 4 / std::sqrt(5.0), 0.05 + r.grid_resolution);
    EXPECT_GE(r.comparison[0].fidelity, 0.99);
    EXPECT_GE(r.comparison[0].projection_fidelity, 0.99);
    EXPECT_NEAR(r.eigenstates[0].norm(), 1, 1e-8);
    EXPECT_FALSE(r.ambiguous);
    EXPECT_NEAR(r.trace_ratio_exact, 10.0 / 6, 1e-12);
    EXPECT_EQ(r.t_bits, 7u);
}

TEST(Pipeline, HtildeIsScaledH) {
    const auto &r = tiny_run();
    EXPECT_LE(r.htilde_block_error, r.encoding.eps_htilde());
}

TEST(Pipeline, ZeroCrossCovarianceTies) {
    Matrix a(1, 4), b(1, 4);
    a << 1, 2, 3, 4;
    b << 1, -1, 1, -1;  // class means of B coincide, so D = 0 while J != 0
    auto config = pipeline_config(2);
    config.d = 1;
    config.exact_trace_ratio = true;
    const auto r = run_qpe_pipeline(PairedDataset(a, b, {2, 2}), config);
    EXPECT_TRUE(r.total_tie);
    for (double v : r.eigenvalues_h) {
        EXPECT_LE(std::abs(v), 0.05 + r.grid_resolution);
    }
}

TEST(Pipeline, NullPairComparedAgainstEigenspace) {
    GeneratorSpec spec;
    spec.p = 2;
    spec.q = 2;
    spec.class_sizes = {3, 3};
    spec.seed = 3;
    const auto r = run_qpe_pipeline(generate_dataset(spec), pipeline_config(3));
    ASSERT_EQ(r.comparison.size(), 2u);
    EXPECT_NEAR(r.classical.eigenvalues[1], 0, 1e-10);
    EXPECT_TRUE(r.ambiguous);
    for (const auto &c : r.comparison) {
        EXPECT_LE(c.gap, c.tolerance);
        EXPECT_GE(c.fidelity, 0.99);
        EXPECT_GE(c.projection_fidelity, 0.99);
    }
}

TEST(Pipeline, DuplicatedModality) {
    Matrix a(1, 4);
    a << 0.5, -1.25, 2.0, 0.25;
    const PairedDataset data(a, a, {1, 1, 1, 1});
    const auto r = run_qpe_pipeline(data, pipeline_config(3));
    ASSERT_FALSE(r.eigenvalues_h.empty());
    EXPECT_LE(std::abs(r.eigenvalues_h[0] - r.classical.eigenvalues[0]), 0.05 + r.grid_resolution);
}

TEST(Pipeline, RejectsBadConfig) {
    auto config = pipeline_config(1);
    config.t_bits = 2;
    EXPECT_THROW(run_qpe_pipeline(tiny(), config), std::invalid_argument);
    config.t_bits = 7;
    config.eps4 = 0;
    EXPECT_THROW(run_qpe_pipeline(tiny(), config), std::invalid_argument);
}

TEST(Pipeline, Deterministic) {
    const auto r2 = run_qpe_pipeline(tiny(), pipeline_config(1));
    EXPECT_EQ(r2.eigenvalues_h, tiny_run().eigenvalues_h);
    EXPECT_EQ(r2.trace_ratio, tiny_run().trace_ratio);
}

TEST(Postprocess, IsotropicKeepsInput) {
    const auto rho = density_encoding(CMatrix::Identity(2, 2) / std::sqrt(2.0), 1, 0.0);
    EncodingParams p;
    p.kappa = measure_kappa(rho, p.kappa_cutoff);
    p.eps3 = 1e-3;
    const auto inv = inverse_sqrt_encoding(rho, p);
    CVector v(2);
    v << Complex(0.6, 0), Complex(0, 0.8);
    const auto out = postprocess_projection(inv, v);
    EXPECT_NEAR(std::abs(out.state.dot(v)), 1, 1e-10);
}

TEST(Postprocess, TinyDirection) {
    const auto data = tiny();
    const auto ops = build_operators(mean_center(data), data);
    const CMatrix psi = (ops.e_factor / ops.e_factor.norm()).cast<Complex>();
    const auto rho = density_encoding(psi, 3, 0.0);
    EncodingParams p;
    p.kappa = measure_kappa(rho, p.kappa_cutoff);
    p.eps3 = 1e-3;
    const auto inv = inverse_sqrt_encoding(rho, p);
    Vector v(2);
    v << 1, 1;
    v /= std::sqrt(2.0);
    const auto out = postprocess_projection(inv, v.cast<Complex>());
    const Vector w = inverse_sqrt_psd(ops.e_matrix) * v;
    EXPECT_GE(std::norm(out.state.dot(w.cast<Complex>())) / w.squaredNorm(), 0.999);
    EXPECT_NEAR(w.dot(ops.e_matrix * w), v.squaredNorm(), 1e-12);
}

TEST(Postprocess, NullSpaceRejected) {
    CMatrix purification = CMatrix::Zero(2, 2);
    purification(0, 0) = 1;
    const auto rho = density_encoding(purification, 1, 0.0);
    EncodingParams p;
    p.kappa = measure_kappa(rho, p.kappa_cutoff);
    p.eps3 = 1e-3;
    const auto inv = inverse_sqrt_encoding(rho, p);
    CVector v = CVector::Zero(2);
    v(1) = 1;
    EXPECT_ANY_THROW(postprocess_projection(inv, v));
}

TEST(ResourceSummary, KEqualsJPerPreparation) {
    const auto data = tiny();
    const auto rows = resource_summary(tiny_run(), data, pipeline_config(1));
    double uj = -1, uk = -2;
    bool has_total = false;
    for (const auto &row : rows) {
        if (row.operation == "U_J circuit") uj = row.measured;
        if (row.operation == "U_K circuit") uk = row.measured;
        if (row.step == "all") has_total = true;
        EXPECT_GE(row.measured, 0);
    }
    EXPECT_EQ(uj, uk);
    EXPECT_TRUE(has_total);
}

TEST(ResourceSummary, StepThreeCountsQpe) {
    const auto &r = tiny_run();
    EXPECT_GT(r.step3_controlled_unitaries, 0u);
    EXPECT_EQ(r.step3_controlled_unitaries % ((std::uint64_t{1} << r.t_bits) - 1), 0u);
    EXPECT_GE(r.step3_searches, 1u);
}
