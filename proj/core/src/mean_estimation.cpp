#include "qdcca/mean_estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace qdcca {

void MeanEstimationConfig::validate() const {
    if (!(epsilon > 0)) {
        throw std::invalid_argument("mean estimation epsilon must be positive");
    }
    if (!(delta > 0 && delta < 0.5)) {
        throw std::invalid_argument("mean estimation delta must lie in (0, 1/2)");
    }
    if (c_scale && !(*c_scale > 0)) {
        throw std::invalid_argument("mean estimation scale C must be positive");
    }
}

UyCircuit build_uy(const OracleTable &table, std::size_t row, Real scale) {
    if (row >= table.rows()) {
        throw std::out_of_range("row " + std::to_string(row) + " outside the table");
    }
    if (table.max_abs() > scale * (1 + 1e-12)) {
        throw std::domain_error("table entry magnitude " + std::to_string(table.max_abs()) + " exceeds C = " +
                                std::to_string(scale));
    }
    RegisterLayout layout;
    const auto row_reg = layout.add("row", qubits_for(table.rows()));
    const auto flag = layout.add("flag", 1);
    const auto col_reg = layout.add("col", qubits_for(table.cols()));
    const auto value_reg = layout.add_fixed("value", table.format());
    const auto anc_reg = layout.add("anc", 1);

    QuantumState psi(layout, {{layout.set(0, row_reg, row), Complex{1, 0}}});
    const BasisPredicate flag_zero = [&layout, flag](BasisIndex b) { return layout.get(b, flag) == 0; };

    psi.apply_qubit_gate(flag, 0, hadamard());
    psi.prepare_uniform(col_reg, table.cols());
    apply_oracle(psi, table, row_reg, col_reg, value_reg, flag_zero);
    controlled_rotation(psi, value_reg, anc_reg, scale, flag_zero);
    apply_oracle(psi, table, row_reg, col_reg, value_reg, flag_zero);
    psi.apply_qubit_gate(flag, 0, hadamard());
    psi.prune(1e-15);

    GroverProblem problem{std::move(psi), [layout, flag](BasisIndex b) { return layout.get(b, flag) == 1; }, 2};
    return UyCircuit{std::move(problem), row_reg, flag, col_reg, value_reg, anc_reg, scale};
}

RowMeanEstimator::RowMeanEstimator(const OracleTable &table, MeanEstimationConfig config)
    : table_(table), config_(config) {
    config_.validate();
    const Real max_abs = table.max_abs();
    scale_ = config_.c_scale.value_or(max_abs > 0 ? max_abs : 1.0);
    if (max_abs > scale_ * (1 + 1e-12)) {
        throw std::domain_error("C = " + std::to_string(scale_) + " is below max |L_ij| = " + std::to_string(max_abs));
    }
    grid_ = estimation_grid(config_.epsilon / (2.0 * scale_));
    repetitions_ = median_repetitions(config_.delta);
}

std::uint64_t RowMeanEstimator::queries_per_estimate() const {
    // (2(M-1) + 1) uses of U_y per run, two O_L queries per U_y.
    return repetitions_ * (2 * (grid_ - 1) + 1) * 2;
}

const EstimationDistribution &RowMeanEstimator::distribution(std::size_t row) {
    auto it = cache_.find(row);
    if (it == cache_.end()) {
        const auto uy = build_uy(table_, row, scale_);
        it = cache_.emplace(row, amplitude_estimation_distribution(uy.problem, grid_)).first;
    }
    return it->second;
}

Real RowMeanEstimator::estimate(std::size_t row, Rng &rng, const QueryLedger &ledger) {
    const auto &dist = distribution(row);
    std::vector<Real> runs(repetitions_);
    for (auto &r : runs) {
        r = dist.sample(rng);
    }
    if (ledger.report != nullptr) {
        QueryLedger scaled = ledger;
        scaled.weight = ledger.weight * queries_per_estimate();
        scaled.charge(table_.name());
    }
    return scale_ * (1.0 - 2.0 * median_boost(std::move(runs), repetitions_));
}

Vector RowMeanEstimator::estimate_all(std::uint64_t seed, const QueryLedger &ledger) {
    Vector means(static_cast<Eigen::Index>(table_.rows()));
    for (std::size_t r = 0; r < table_.rows(); ++r) {
        auto rng = make_rng(seed, r);
        means(static_cast<Eigen::Index>(r)) = estimate(r, rng, ledger);
    }
    return means;
}

Real estimate_row_mean(const OracleTable &table, std::size_t row, const MeanEstimationConfig &config, Rng &rng,
                       const QueryLedger &ledger) {
    RowMeanEstimator estimator(table, config);
    return estimator.estimate(row, rng, ledger);
}

OracleTable mean_table(std::string name, const Vector &means, unsigned fraction_bits) {
    const Real max_abs = means.size() > 0 ? means.cwiseAbs().maxCoeff() : 0.0;
    Matrix column = means;
    return OracleTable(std::move(name), column, FixedPointFormat::fitting(max_abs, fraction_bits));
}

void coherent_mean(QuantumState &state, const OracleTable &means, std::size_t index_reg, std::size_t out_reg,
                   const BasisPredicate &control, const QueryLedger &ledger, std::uint64_t queries_per_use) {
    QueryLedger scaled = ledger;
    scaled.weight = ledger.weight * queries_per_use;
    apply_oracle(state, means, index_reg, std::nullopt, out_reg, control, scaled);
}

OracleTable qms_oracle(const OracleTable &data, const OracleTable &means, unsigned fraction_bits,
                       unsigned max_qubits) {
    if (means.rows() != data.rows()) {
        throw std::invalid_argument("qms_oracle: one mean per data row required");
    }
    const auto out_format = FixedPointFormat::fitting(data.max_abs() + means.max_abs(), fraction_bits);
    RegisterLayout layout(max_qubits);
    const auto i_reg = layout.add("i", qubits_for(data.rows()));
    const auto j_reg = layout.add("j", qubits_for(data.cols()));
    const auto mean_reg = layout.add_fixed("mean", means.format());
    const auto data_reg = layout.add_fixed("m", data.format());
    const auto out_reg = layout.add_fixed("centered", out_format);

    QuantumState psi(layout);
    psi.prepare_uniform(i_reg, data.rows());
    psi.prepare_uniform(j_reg, data.cols());
    coherent_mean(psi, means, i_reg, mean_reg);
    apply_oracle(psi, data, i_reg, j_reg, data_reg);
    arithmetic_oracle(psi, [](std::span<const Real> v) { return v[0] - v[1]; }, {data_reg, mean_reg}, out_reg);
    apply_oracle(psi, data, i_reg, j_reg, data_reg);
    coherent_mean(psi, means, i_reg, mean_reg);

    Matrix centered = Matrix::Zero(static_cast<Eigen::Index>(data.rows()), static_cast<Eigen::Index>(data.cols()));
    for (const auto &[b, a] : psi.amplitudes()) {
        if (std::abs(a) < 1e-12) {
            continue;
        }
        if (layout.get(b, mean_reg) != 0 || layout.get(b, data_reg) != 0) {
            throw std::logic_error("qms_oracle: work registers were not uncomputed");
        }
        centered(static_cast<Eigen::Index>(layout.get(b, i_reg)), static_cast<Eigen::Index>(layout.get(b, j_reg))) =
            layout.get_value(b, out_reg);
    }
    return OracleTable(data.name() + "_centered", centered, out_format);
}

}  // namespace qdcca
