#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qdcca/state_preparation.hpp"

namespace qdcca {

namespace {

BasisPredicate reg_is(const RegisterLayout &layout, std::size_t reg, std::uint64_t value) {
    return [layout, reg, value](BasisIndex b) { return layout.get(b, reg) == value; };
}

BasisPredicate reg_in(const RegisterLayout &layout, std::size_t reg, std::uint64_t a, std::uint64_t b) {
    return [layout, reg, a, b](BasisIndex x) {
        const auto v = layout.get(x, reg);
        return v == a || v == b;
    };
}

Real work_residue(const QuantumState &state, const std::vector<std::size_t> &work) {
    Real worst = 0;
    for (const auto &[b, a] : state.amplitudes()) {
        for (auto r : work) {
            if (state.layout().get(b, r) != 0) {
                worst = std::max(worst, std::abs(a));
                break;
            }
        }
    }
    return worst;
}

void charge(ResourceReport &res, const std::string &stage, const std::string &oracle, std::uint64_t count) {
    res.charge_query(stage, oracle, count);
}

/// Shared tail: amplification, report bookkeeping.
PreparedState finish(QuantumState psi, std::size_t index_reg, std::size_t system_reg, std::size_t anc_reg,
                     PrepReport report, ResourceReport res, const std::vector<std::size_t> &work,
                     const StatePrepConfig &config) {
    const auto &layout = psi.layout();
    report.total_qubits = layout.total_qubits();
    report.ancilla_qubits = layout.total_qubits() - layout.reg(system_reg).width;
    report.max_uncompute_residue = work_residue(psi, work);
    report.queries_per_prep = res.stage(report.name).total_queries();
    const BasisPredicate good = reg_is(layout, anc_reg, 0);
    report.initial_good_probability = psi.probability(good);
    if (report.initial_good_probability <= 0) {
        throw std::domain_error(report.name + ": rotation left no amplitude on the good branch");
    }
    QuantumState out = psi;
    report.final_good_probability = report.initial_good_probability;
    if (config.amplify) {
        AmplifyOptions options;
        options.queries_per_prep = report.queries_per_prep;
        auto amp = fixed_point_amplify(psi, good, config.infidelity_target, options, {&res, report.name, 1});
        out = std::move(amp.state);
        report.rounds = amp.rounds;
        report.final_good_probability = amp.final_probability;
    }
    report.total_queries = res.stage(report.name).total_queries();
    auto &stage = res.stage(report.name);
    stage.ancilla_high_water = std::max(stage.ancilla_high_water, report.ancilla_qubits);
    stage.quantities["initial_good_probability"] = report.initial_good_probability;
    stage.quantities["queries_per_prep"] = static_cast<double>(report.queries_per_prep);
    report.declared_error = report.error_bound + std::sqrt(config.infidelity_target);
    return PreparedState{std::move(out), index_reg, system_reg, anc_reg, std::move(report), std::move(res)};
}

Real max_stored(const Matrix &m, const FixedPointFormat &fmt) {
    Real worst = 0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        worst = std::max(worst, std::abs(fmt.round(m.data()[i])));
    }
    return worst;
}

}  // namespace

PreparedState prepare_psi_e(const PairedDataset &data, const ScalingBounds &bounds, const MeanEstimates &means,
                            const StatePrepConfig &config) {
    const std::size_t n = data.n();
    const std::size_t s = data.dim();
    const std::size_t p = data.p();
    const unsigned fb = config.fraction_bits;
    const Matrix m = data.stacked();
    const auto centered = mean_center(data);
    const auto ops = build_operators(centered, data);
    if (ops.e_factor.norm() == 0) {
        throw std::domain_error("degenerate centered data: the E factor is zero");
    }

    const Real res_step = std::ldexp(1.0, -static_cast<int>(fb));
    const auto value_fmt = FixedPointFormat::fitting(2.0 * (data.max_abs_entry() + res_step), fb);
    const OracleTable o_m("O_M", m, value_fmt);
    const OracleTable u_mean = mean_table("U_mean", means.row_means_e, fb);

    PrepReport report;
    report.name = "psi_E";
    report.index_count = 2 * n;
    report.system_count = s;
    report.rotation_scale = std::max(bounds.alpha, 2.0 * max_stored(m, value_fmt));

    // Per-entry error of the loaded factor against the exact one.
    Real entry_error = 0;
    for (std::size_t i = 0; i < s; ++i) {
        const Real mean_loaded = u_mean.format().round(u_mean.lookup(i));
        for (std::size_t j = 0; j < n; ++j) {
            const Real loaded = value_fmt.round(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) -
                                mean_loaded;
            const Real exact = ops.e_factor(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i < p ? j : j + n));
            entry_error = std::max(entry_error, std::abs(loaded - exact));
        }
    }
    report.entry_error = entry_error;
    report.error_bound = factor_error_bound(bounds.alpha, entry_error, bounds.m0);

    RegisterLayout layout(config.max_qubits);
    const auto j_reg = layout.add("j", qubits_for(2 * n));
    const auto i_reg = layout.add("i", qubits_for(s));
    const auto mean_reg = layout.add_fixed("mean", u_mean.format());
    const auto value_reg = layout.add_fixed("value", value_fmt);
    const auto flag_reg = layout.add("flags", 2);
    const auto anc_reg = layout.add("anc", 1);
    report.arithmetic_qubits = layout.reg(mean_reg).width + layout.reg(value_reg).width;

    ResourceReport res;
    const std::string st = report.name;
    const auto f00 = reg_is(layout, flag_reg, 0);
    const auto f11 = reg_is(layout, flag_reg, 3);
    const auto f_diag = reg_in(layout, flag_reg, 0, 3);
    const auto nn = static_cast<std::int64_t>(n);

    auto flags = [&](QuantumState &psi) {
        psi.apply_permutation([&](BasisIndex b) {
            const std::uint64_t f = (layout.get(b, j_reg) >= n ? 2u : 0u) | (layout.get(b, i_reg) >= p ? 1u : 0u);
            return layout.set(b, flag_reg, layout.get(b, flag_reg) ^ f);
        });
    };
    auto load = [&](QuantumState &psi) {
        // O_M on block 00, U_M (j -> j - n, O_M, j -> j + n) on block 11: one multiplexed query.
        apply_oracle(psi, o_m, i_reg, j_reg, value_reg, f00);
        shift_register(psi, j_reg, -nn, f11);
        apply_oracle(psi, o_m, i_reg, j_reg, value_reg, f11);
        shift_register(psi, j_reg, nn, f11);
        charge(res, st, "O_M", 1);
    };
    auto qma = [&](QuantumState &psi, int sign) {
        accumulate_oracle(psi, [](std::span<const Real> v) { return v[0]; }, {mean_reg}, value_reg, sign, f_diag);
    };

    QuantumState psi(layout);
    psi.prepare_uniform(j_reg, 2 * n);                                              // (1.1)
    psi.prepare_uniform(i_reg, s);
    coherent_mean(psi, u_mean, i_reg, mean_reg, {}, {&res, st, 1}, means.queries_row_e);  // (1.2)
    flags(psi);                                                                     // (1.3)
    load(psi);                                                                      // (1.4)
    qma(psi, -1);                                                                   // (1.5)
    controlled_rotation(psi, value_reg, anc_reg, report.rotation_scale);            // (1.6)
    qma(psi, +1);
    load(psi);
    flags(psi);
    coherent_mean(psi, u_mean, i_reg, mean_reg, {}, {&res, st, 1}, means.queries_row_e);
    psi.prune(1e-14);

    return finish(std::move(psi), j_reg, i_reg, anc_reg, std::move(report), std::move(res),
                  {mean_reg, value_reg, flag_reg}, config);
}

namespace {

struct ClassTables {
    OracleTable class_means;
    OracleTable row_means;
    OracleTable class_sizes;
    FixedPointFormat value_fmt;
    Real rotation_scale;
    Real entry_error;
};

/// Tables and loaded-factor error shared by the J and K preparations.
ClassTables class_tables(const PairedDataset &data, const ScalingBounds &bounds, const MeanEstimates &means,
                         const StatePrepConfig &config, const Matrix &j_factor) {
    const unsigned fb = config.fraction_bits;
    const std::size_t c = data.classes();
    const std::size_t s = data.dim();
    const auto np = static_cast<Real>(data.max_class_size());
    const Real res_step = std::ldexp(1.0, -static_cast<int>(fb));
    const Real max_cm = means.class_means.cwiseAbs().maxCoeff();
    const OracleTable cm("U_mean_padded", means.class_means, FixedPointFormat::fitting(max_cm, fb));
    const OracleTable rm = mean_table("U_mean", means.row_means_j, fb);
    Matrix sizes(static_cast<Eigen::Index>(c), 1);
    for (std::size_t i = 0; i < c; ++i) {
        sizes(static_cast<Eigen::Index>(i), 0) = static_cast<Real>(data.class_sizes()[i]);
    }
    const OracleTable oc("O_c", sizes, FixedPointFormat::fitting(np, 0));
    const auto value_fmt = FixedPointFormat::fitting(2.0 * np * (data.max_abs_entry() + res_step), fb);

    Real worst = 0;
    Real entry_error = 0;
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t k = 0; k < s; ++k) {
            const Real x = cm.format().round(cm.lookup(i, k));
            const Real mbar = rm.format().round(rm.lookup(k));
            const Real loaded = np * x - static_cast<Real>(data.class_sizes()[i]) * mbar;
            worst = std::max(worst, std::abs(loaded));
            entry_error = std::max(entry_error, std::abs(loaded - j_factor(static_cast<Eigen::Index>(k),
                                                                           static_cast<Eigen::Index>(i))));
        }
    }
    return ClassTables{cm, rm, oc, value_fmt, std::max(bounds.beta, worst), entry_error};
}

}  // namespace

PreparedState prepare_psi_j(const PairedDataset &data, const ScalingBounds &bounds, const MeanEstimates &means,
                            const StatePrepConfig &config) {
    const std::size_t c = data.classes();
    const std::size_t s = data.dim();
    const auto ops = build_operators(mean_center(data), data);
    if (ops.j_factor.norm() == 0) {
        throw std::domain_error("degenerate class sums: the J factor is zero");
    }
    const auto t = class_tables(data, bounds, means, config, ops.j_factor);
    const auto np = static_cast<Real>(data.max_class_size());

    PrepReport report;
    report.name = "psi_J";
    report.index_count = c;
    report.system_count = s;
    report.rotation_scale = t.rotation_scale;
    report.entry_error = t.entry_error;
    report.error_bound = factor_error_bound(bounds.beta, t.entry_error, bounds.m_j);
    report.density_assumption = bounds.m0_holds;

    RegisterLayout layout(config.max_qubits);
    const auto i_reg = layout.add("i", qubits_for(c));
    const auto k_reg = layout.add("k", qubits_for(s));
    const auto x_reg = layout.add_fixed("x", t.class_means.format());
    const auto value_reg = layout.add_fixed("value", t.value_fmt);
    const auto mbar_reg = layout.add_fixed("mbar", t.row_means.format());
    const auto ni_reg = layout.add_fixed("n_i", t.class_sizes.format());
    const auto anc_reg = layout.add("anc", 1);
    report.arithmetic_qubits = layout.reg(x_reg).width + layout.reg(value_reg).width + layout.reg(mbar_reg).width +
                               layout.reg(ni_reg).width;

    ResourceReport res;
    const std::string st = report.name;
    const QueryLedger class_ledger{&res, st, means.queries_class};
    const QueryLedger row_ledger{&res, st, 1};
    auto u_f = [&](QuantumState &psi) {
        arithmetic_oracle(psi, [np](std::span<const Real> v) { return np * v[0]; }, {x_reg}, value_reg);
    };
    auto qma = [&](QuantumState &psi, int sign) {
        accumulate_oracle(psi, [](std::span<const Real> v) { return v[0] * v[1]; }, {ni_reg, mbar_reg}, value_reg,
                          sign);
    };

    QuantumState psi(layout);
    psi.prepare_uniform(i_reg, c);                                            // (2.1)
    psi.prepare_uniform(k_reg, s);
    apply_oracle(psi, t.class_means, i_reg, k_reg, x_reg, {}, class_ledger);  // (2.2)
    u_f(psi);                                                                 // (2.3)
    coherent_mean(psi, t.row_means, k_reg, mbar_reg, {}, row_ledger, means.queries_row_j);  // (2.4)
    apply_oracle(psi, t.class_sizes, i_reg, std::nullopt, ni_reg, {}, row_ledger);          // (2.5)
    qma(psi, -1);
    controlled_rotation(psi, value_reg, anc_reg, report.rotation_scale);      // (2.6)
    // (2.7) uncompute in reverse stage order so that |x> is released last
    qma(psi, +1);
    apply_oracle(psi, t.class_sizes, i_reg, std::nullopt, ni_reg, {}, row_ledger);
    coherent_mean(psi, t.row_means, k_reg, mbar_reg, {}, row_ledger, means.queries_row_j);
    u_f(psi);
    apply_oracle(psi, t.class_means, i_reg, k_reg, x_reg, {}, class_ledger);
    psi.prune(1e-14);

    return finish(std::move(psi), i_reg, k_reg, anc_reg, std::move(report), std::move(res),
                  {x_reg, value_reg, mbar_reg, ni_reg}, config);
}

PreparedState prepare_psi_k(const PairedDataset &data, const ScalingBounds &bounds, const MeanEstimates &means,
                            const StatePrepConfig &config) {
    const std::size_t c = data.classes();
    const std::size_t s = data.dim();
    const std::size_t p = data.p();
    const auto ops = build_operators(mean_center(data), data);
    if (ops.k_factor.norm() == 0) {
        throw std::domain_error("degenerate class sums: the K factor is zero");
    }
    const auto t = class_tables(data, bounds, means, config, ops.j_factor);
    const auto np = static_cast<Real>(data.max_class_size());

    PrepReport report;
    report.name = "psi_K";
    report.index_count = 2 * c;
    report.system_count = s;
    report.rotation_scale = t.rotation_scale;
    report.entry_error = t.entry_error;
    report.error_bound = factor_error_bound(bounds.beta, t.entry_error, bounds.m_j);
    report.density_assumption = bounds.m0_holds;

    RegisterLayout layout(config.max_qubits);
    const auto i_reg = layout.add("i", qubits_for(2 * c));
    const auto k_reg = layout.add("k", qubits_for(s));
    const auto x_reg = layout.add_fixed("x", t.class_means.format());
    const auto value_reg = layout.add_fixed("value", t.value_fmt);
    const auto mbar_reg = layout.add_fixed("mbar", t.row_means.format());
    const auto ni_reg = layout.add_fixed("n_i", t.class_sizes.format());
    const auto flag_reg = layout.add("flags", 2);
    const auto anc_reg = layout.add("anc", 1);
    report.arithmetic_qubits = layout.reg(x_reg).width + layout.reg(value_reg).width + layout.reg(mbar_reg).width +
                               layout.reg(ni_reg).width;

    ResourceReport res;
    const std::string st = report.name;
    const auto f00 = reg_is(layout, flag_reg, 0);
    const auto f11 = reg_is(layout, flag_reg, 3);
    const auto f_diag = reg_in(layout, flag_reg, 0, 3);
    const auto cc = static_cast<std::int64_t>(c);
    const QueryLedger row_ledger{&res, st, 1};

    auto flags = [&](QuantumState &psi) {
        psi.apply_permutation([&](BasisIndex b) {
            const std::uint64_t f = (layout.get(b, i_reg) >= c ? 2u : 0u) | (layout.get(b, k_reg) >= p ? 1u : 0u);
            return layout.set(b, flag_reg, layout.get(b, flag_reg) ^ f);
        });
    };
    // Block 00 uses the table directly, block 11 reads class i - c; charged as one multiplexed use.
    auto multiplexed = [&](QuantumState &psi, const OracleTable &table, std::optional<std::size_t> col,
                           std::size_t out, std::uint64_t weight) {
        apply_oracle(psi, table, i_reg, col, out, f00);
        shift_register(psi, i_reg, -cc, f11);
        apply_oracle(psi, table, i_reg, col, out, f11);
        shift_register(psi, i_reg, cc, f11);
        charge(res, st, table.name(), weight);
    };
    auto u_f = [&](QuantumState &psi) {
        arithmetic_oracle(psi, [np](std::span<const Real> v) { return np * v[0]; }, {x_reg}, value_reg, f_diag);
    };
    auto qma = [&](QuantumState &psi, int sign) {
        accumulate_oracle(psi, [](std::span<const Real> v) { return v[0] * v[1]; }, {ni_reg, mbar_reg}, value_reg,
                          sign, f_diag);
    };

    QuantumState psi(layout);
    psi.prepare_uniform(i_reg, 2 * c);                                        // (3.1)
    psi.prepare_uniform(k_reg, s);
    flags(psi);                                                               // (3.2)
    multiplexed(psi, t.class_means, k_reg, x_reg, means.queries_class);       // (3.3)
    u_f(psi);                                                                 // (3.4)
    coherent_mean(psi, t.row_means, k_reg, mbar_reg, {}, row_ledger, means.queries_row_j);  // (3.5)
    multiplexed(psi, t.class_sizes, std::nullopt, ni_reg, 1);                 // (3.6)
    qma(psi, -1);                                                             // (3.7)
    controlled_rotation(psi, value_reg, anc_reg, report.rotation_scale);      // (3.8)
    qma(psi, +1);
    multiplexed(psi, t.class_sizes, std::nullopt, ni_reg, 1);
    coherent_mean(psi, t.row_means, k_reg, mbar_reg, {}, row_ledger, means.queries_row_j);
    u_f(psi);
    multiplexed(psi, t.class_means, k_reg, x_reg, means.queries_class);
    flags(psi);
    psi.prune(1e-14);

    return finish(std::move(psi), i_reg, k_reg, anc_reg, std::move(report), std::move(res),
                  {x_reg, value_reg, mbar_reg, ni_reg, flag_reg}, config);
}

TraceRatioEstimate estimate_trace_ratio(const PreparedState &psi_e, const PreparedState &psi_j,
                                        const PairedDataset &data, const ScalingBounds &bounds,
                                        std::size_t samples, Rng &rng) {
    if (samples < 100) {
        throw std::invalid_argument("trace-ratio estimation needs at least 100 samples");
    }
    const Real pe = psi_e.report.initial_good_probability;
    const Real pj = psi_j.report.initial_good_probability;
    const auto hits_e = std::binomial_distribution<std::size_t>(samples, pe)(rng);
    const auto hits_j = std::binomial_distribution<std::size_t>(samples, pj)(rng);
    if (hits_e == 0 || hits_j == 0) {
        throw std::domain_error("no ancilla successes in " + std::to_string(samples) +
                                " samples; increase the sample count");
    }
    TraceRatioEstimate out;
    const auto ns = static_cast<Real>(samples);
    out.p_e = static_cast<Real>(hits_e) / ns;
    out.p_j = static_cast<Real>(hits_j) / ns;
    const auto n = static_cast<Real>(data.n());
    const auto c = static_cast<Real>(data.classes());
    const auto s = static_cast<Real>(data.dim());
    const Real se = psi_e.report.rotation_scale;
    const Real sj = psi_j.report.rotation_scale;
    out.ratio = (out.p_j * c * s * sj * sj) / (out.p_e * 2.0 * n * s * se * se);
    out.standard_error =
        out.ratio * std::sqrt((1.0 - out.p_j) / (ns * out.p_j) + (1.0 - out.p_e) / (ns * out.p_e));
    const Real mx = data.max_abs_entry();
    const auto np = static_cast<Real>(data.max_class_size());
    out.bound_simple = 2.0 * n * mx * mx / (bounds.m0 * bounds.m0);
    out.bound_full = 8.0 * c * np * np * mx * mx / (n * bounds.m0 * bounds.m0);
    return out;
}

}  // namespace qdcca
