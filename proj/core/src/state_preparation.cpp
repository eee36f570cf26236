#include "qdcca/state_preparation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qdcca {

Real density_threshold(const Matrix &values) {
    std::vector<Real> mags;
    mags.reserve(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        mags.push_back(std::abs(values.data()[i]));
    }
    if (mags.empty()) {
        return 0;
    }
    std::sort(mags.begin(), mags.end(), std::greater<>());
    return mags[(mags.size() + 1) / 2 - 1];
}

ScalingBounds ScalingBounds::from(const PairedDataset &data, const DccaOperators &ops) {
    ScalingBounds b;
    const Real max_abs = data.max_abs_entry();
    b.alpha = 2.0 * max_abs;
    b.beta = 2.0 * static_cast<Real>(data.max_class_size()) * max_abs;
    Matrix xy(static_cast<Eigen::Index>(data.dim()), static_cast<Eigen::Index>(data.n()));
    const auto p = static_cast<Eigen::Index>(data.p());
    const auto n = static_cast<Eigen::Index>(data.n());
    xy.topRows(p) = ops.e_factor.topLeftCorner(p, n);
    xy.bottomRows(static_cast<Eigen::Index>(data.q())) =
        ops.e_factor.bottomRightCorner(static_cast<Eigen::Index>(data.q()), n);
    b.m0 = density_threshold(xy);
    b.m_j = density_threshold(ops.j_factor);
    const Real floor = static_cast<Real>(data.min_class_size()) * b.m0;
    std::size_t above = 0;
    for (Eigen::Index i = 0; i < ops.j_factor.size(); ++i) {
        above += std::abs(ops.j_factor.data()[i]) >= floor ? 1 : 0;
    }
    b.m0_holds = 2 * above >= static_cast<std::size_t>(ops.j_factor.size());
    return b;
}

Matrix padded_class_table(const PairedDataset &data, unsigned max_qubits) {
    const auto padded = PaddedDataset::from(data);
    const std::size_t c = data.classes();
    const std::size_t s = data.dim();
    const std::size_t w = padded.block_width;
    const auto fmt = FixedPointFormat::fitting(data.max_abs_entry(), 40);
    const OracleTable o_padded("O_padded", padded.padded_matrix, fmt);

    RegisterLayout layout(max_qubits);
    const auto i_reg = layout.add("i", qubits_for(c));
    const auto k_reg = layout.add("k", qubits_for(s));
    const auto j_reg = layout.add("j", qubits_for(w));
    const auto col_reg = layout.add("col", qubits_for(c * w));
    const auto val_reg = layout.add_fixed("value", fmt);

    QuantumState psi(layout);
    psi.prepare_uniform(i_reg, c);
    psi.prepare_uniform(k_reg, s);
    psi.prepare_uniform(j_reg, w);
    index_oracle(psi, {i_reg, j_reg}, col_reg, [w](std::span<const std::uint64_t> v) { return v[0] * w + v[1]; });
    apply_oracle(psi, o_padded, k_reg, col_reg, val_reg);
    index_oracle(psi, {i_reg, j_reg}, col_reg, [w](std::span<const std::uint64_t> v) { return v[0] * w + v[1]; });

    Matrix table = Matrix::Zero(static_cast<Eigen::Index>(c * s), static_cast<Eigen::Index>(w));
    for (const auto &[b, a] : psi.amplitudes()) {
        if (std::abs(a) < 1e-12) {
            continue;
        }
        const auto row = layout.get(b, i_reg) * s + layout.get(b, k_reg);
        table(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(layout.get(b, j_reg))) =
            layout.get_value(b, val_reg);
    }
    return table;
}

namespace {

/// Clamps each estimate into the range its row of data spans; the true mean lies there.
void clamp_to_rows(Vector &means, const Matrix &rows) {
    for (Eigen::Index r = 0; r < means.size(); ++r) {
        means(r) = std::clamp(means(r), rows.row(r).minCoeff(), rows.row(r).maxCoeff());
    }
}

Matrix class_means_exact(const Matrix &table, std::size_t c, std::size_t s) {
    Matrix out(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(s));
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t k = 0; k < s; ++k) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                table.row(static_cast<Eigen::Index>(i * s + k)).mean();
        }
    }
    return out;
}

}  // namespace

MeanEstimates estimate_means(const PairedDataset &data, const StatePrepConfig &config) {
    const Matrix m = data.stacked();
    const Vector true_rows = m.rowwise().mean();
    const std::size_t c = data.classes();
    const std::size_t s = data.dim();
    const Matrix class_table = padded_class_table(data, config.max_qubits);
    const Matrix true_class = class_means_exact(class_table, c, s);

    MeanEstimates out;
    const bool injected = config.injected_row_means.has_value() || config.injected_class_means.has_value();
    if (injected) {
        out.row_means_e = config.injected_row_means.value_or(true_rows);
        out.row_means_j = out.row_means_e;
        out.class_means = config.injected_class_means.value_or(true_class);
        if (out.row_means_e.size() != static_cast<Eigen::Index>(s) || out.class_means.rows() != static_cast<Eigen::Index>(c) ||
            out.class_means.cols() != static_cast<Eigen::Index>(s)) {
            throw std::invalid_argument("injected means have the wrong shape");
        }
        out.queries_row_e = out.queries_row_j = out.queries_class = 1;
    } else {
        const auto fine = FixedPointFormat::fitting(data.max_abs_entry(), 40);
        const OracleTable o_m("O_M", m, fine);
        RowMeanEstimator est_e(o_m, {config.eps1, config.delta1, std::nullopt});
        out.row_means_e = est_e.estimate_all(derive_seed(config.seed, 101));
        out.queries_row_e = est_e.queries_per_estimate();

        RowMeanEstimator est_j(o_m, {config.eps2, config.delta1, std::nullopt});
        out.row_means_j = est_j.estimate_all(derive_seed(config.seed, 202));
        out.queries_row_j = est_j.queries_per_estimate();

        const OracleTable o_padded("O_padded", class_table, fine);
        RowMeanEstimator est_c(o_padded, {config.eps2, config.delta2, std::nullopt});
        const Vector flat = est_c.estimate_all(derive_seed(config.seed, 303));
        out.class_means.resize(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(s));
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t k = 0; k < s; ++k) {
                out.class_means(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                    flat(static_cast<Eigen::Index>(i * s + k));
            }
        }
        out.queries_class = est_c.queries_per_estimate();
    }
    clamp_to_rows(out.row_means_e, m);
    clamp_to_rows(out.row_means_j, m);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t k = 0; k < s; ++k) {
            auto &v = out.class_means(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            const auto row = class_table.row(static_cast<Eigen::Index>(i * s + k));
            v = std::clamp(v, row.minCoeff(), row.maxCoeff());
        }
    }
    out.row_error_e = (out.row_means_e - true_rows).cwiseAbs().maxCoeff();
    out.row_error_j = (out.row_means_j - true_rows).cwiseAbs().maxCoeff();
    out.class_error = (out.class_means - true_class).cwiseAbs().maxCoeff();
    return out;
}

Real factor_error_bound(Real entry_scale, Real entry_error, Real density) {
    if (!(density > 0)) {
        throw std::domain_error("error bound needs a positive density threshold");
    }
    const Real e = entry_error / density;
    return std::sqrt(1.0 + 4.0 * entry_scale * entry_error / (density * density) + 2.0 * e * e) - 1.0 +
           std::sqrt(2.0) * e;
}

CMatrix system_amplitude_matrix(const QuantumState &state, std::size_t reg, std::size_t dim) {
    const auto &layout = state.layout();
    std::map<BasisIndex, std::size_t> columns;
    for (const auto &[b, a] : state.amplitudes()) {
        columns.emplace(layout.set(b, reg, 0), columns.size());
    }
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(std::max<std::size_t>(1, columns.size())));
    for (const auto &[b, a] : state.amplitudes()) {
        const auto k = layout.get(b, reg);
        if (k >= dim) {
            if (std::abs(a) > 1e-12) {
                throw std::logic_error("amplitude outside the system range");
            }
            continue;
        }
        out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(columns.at(layout.set(b, reg, 0)))) += a;
    }
    return out;
}

CMatrix reduced_density(const QuantumState &state, std::size_t reg, std::size_t dim) {
    const CMatrix a = system_amplitude_matrix(state, reg, dim);
    return a * a.adjoint();
}

CMatrix trace_out_first(const QuantumState &state) {
    const auto &layout = state.layout();
    if (layout.size() != 2) {
        throw std::invalid_argument("trace_out_first needs a two-register layout");
    }
    return reduced_density(state, 1, std::size_t{1} << layout.reg(1).width);
}

CMatrix PreparedState::factor_amplitudes() const {
    const auto &layout = state.layout();
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(report.system_count),
                                static_cast<Eigen::Index>(report.index_count));
    for (const auto &[b, a] : state.amplitudes()) {
        const auto j = layout.get(b, index_reg);
        const auto i = layout.get(b, system_reg);
        BasisIndex rest = layout.set(layout.set(b, index_reg, 0), system_reg, 0);
        if (rest != 0 || j >= report.index_count || i >= report.system_count) {
            continue;
        }
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a;
    }
    return out;
}

Real PreparedState::fidelity(const Matrix &target_factor) const {
    const CMatrix a = factor_amplitudes();
    const Real norm = target_factor.norm();
    const Complex overlap = (target_factor.cast<Complex>().cwiseProduct(a)).sum() / norm;
    return std::norm(overlap);
}

Real PreparedState::postselected_distance(const Matrix &target_factor) const {
    CMatrix a = factor_amplitudes();
    const Real an = a.norm();
    if (an == 0) {
        return std::sqrt(2.0);
    }
    a /= an;
    const CMatrix t = target_factor.cast<Complex>() / target_factor.norm();
    const Complex overlap = (t.conjugate().cwiseProduct(a)).sum();
    const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex{1, 0};
    return (a / phase - t).norm();
}

}  // namespace qdcca
