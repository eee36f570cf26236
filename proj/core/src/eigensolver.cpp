#include "qdcca/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qdcca/amplitude.hpp"
#include "qdcca/max_finding.hpp"

namespace qdcca {

namespace {

using Idx = Eigen::Index;

Real spectral_norm(const CMatrix &m) {
    if (m.size() == 0) {
        return 0;
    }
    return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
}

CMatrix hermitian_part(const CMatrix &m) { return 0.5 * (m + m.adjoint()); }

// phases above this are wraps of phases just below zero
constexpr Real kWrap = 0.99;

Real unwrap(Real phase) { return phase >= kWrap ? phase - 1.0 : phase; }

Real median_of(std::vector<Real> v) {
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

std::vector<MixtureComponent> mixture_of(const CMatrix &rho) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(rho));
    std::vector<MixtureComponent> out;
    const Real total = es.eigenvalues().cwiseMax(0.0).sum();
    for (Idx i = 0; i < es.eigenvalues().size(); ++i) {
        const Real w = es.eigenvalues()(i);
        if (w > 1e-14 * total) {
            out.push_back({w / total, es.eigenvectors().col(i)});
        }
    }
    return out;
}

CVector top_eigenvector(const CMatrix &rho) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(rho));
    CVector v = es.eigenvectors().col(es.eigenvalues().size() - 1);
    // fix the global phase on the largest entry
    Idx k = 0;
    v.cwiseAbs().maxCoeff(&k);
    return v * std::polar(1.0, -std::arg(v(k)));
}

Real overlap2(const CVector &a, const CVector &b) {
    const Real na = a.norm();
    const Real nb = b.norm();
    if (na == 0 || nb == 0) {
        return 0;
    }
    return std::norm(a.dot(b)) / (na * na * nb * nb);
}

// |P a|^2 / |a|^2 with P the projector onto span(basis columns); cos^2 of the principal angle
Real subspace_overlap2(const CVector &a, const Matrix &basis) {
    const Real na = a.norm();
    if (na == 0 || basis.cols() == 0) {
        return 0;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(basis);
    qr.setThreshold(1e-10);
    const Eigen::Index rank = qr.rank();
    if (rank == 0) {
        return 0;
    }
    const Matrix q = Matrix(qr.householderQ()).leftCols(rank);
    const CVector proj = q.cast<Complex>().adjoint() * a;
    return proj.squaredNorm() / (na * na);
}

Real log2_at_least_one(Real x) { return std::max(1.0, std::log2(x)); }

}  // namespace

void HamiltonianSimSpec::validate() const {
    if (!(t >= 0) || !std::isfinite(t)) {
        throw std::invalid_argument("simulation time must be finite and non-negative");
    }
    if (t_bits < 3 || t_bits > 10) {
        throw std::invalid_argument("t_bits must lie in [3, 10]");
    }
    if (d == 0) {
        throw std::invalid_argument("d must be positive");
    }
    if (!(eps4 > 0) || !(sim_error >= 0) || !(shift >= 0)) {
        throw std::invalid_argument("eps4 must be positive, sim_error and shift non-negative");
    }
}

CMatrix SimulatedEvolution::power(unsigned k) const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hamiltonian);
    const Real scale = t * std::ldexp(1.0, static_cast<int>(k));
    CVector phases(es.eigenvalues().size());
    for (Idx i = 0; i < phases.size(); ++i) {
        phases(i) = std::polar(1.0, (es.eigenvalues()(i) + shift) * scale);
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Real SimulatedEvolution::eigenvalue_of_phase(Real phase) const {
    if (t <= 0) {
        throw std::domain_error("phase cannot be inverted at t = 0");
    }
    return 2 * std::numbers::pi * unwrap(phase) / t - shift;
}

SimulatedEvolution simulate_htilde(const BlockEncoding &htilde, const HamiltonianSimSpec &spec, Real cost_per_unit,
                                   Real kappa, Real eps_htilde) {
    spec.validate();
    const CMatrix extracted = block_extract(htilde);
    const CMatrix h = hermitian_part(extracted);
    const Real norm = spectral_norm(h);
    if (norm * spec.t >= std::numbers::pi) {
        throw std::domain_error("aliasing: ||H~|| t = " + std::to_string(norm * spec.t) + " >= pi, use t <= " +
                                std::to_string(0.98 * std::numbers::pi / norm));
    }
    if (spec.t > 0 && (spec.shift < norm * (1 - 1e-12) || (spec.shift + norm) * spec.t >= 2 * std::numbers::pi * kWrap)) {
        throw std::domain_error("shift does not map the spectrum into [0, 2 pi / t)");
    }
    SimulatedEvolution out;
    out.hamiltonian = h;
    out.t = spec.t;
    out.shift = spec.shift;
    out.unitary = out.power(0);
    // the anti-Hermitian part of the extracted block is dropped
    out.sim_error = spectral_norm(extracted - h) * spec.t;
    if (out.sim_error > spec.sim_error + 1e-12) {
        throw std::domain_error("extracted block is too far from Hermitian for the simulation budget");
    }
    Real log_term = 0;
    if (spec.t > 0 && eps_htilde > 0) {
        log_term = std::max(0.0, std::log2(1.0 / (2 * spec.t * eps_htilde)));
    }
    out.cost_per_application = (8 * kappa * spec.t + log_term) * cost_per_unit;
    return out;
}

void PipelineConfig::validate() const {
    if (!(eps4 > 0)) {
        throw std::invalid_argument("eps4 must be positive");
    }
    if (t_bits && (*t_bits < 3 || *t_bits > 10)) {
        throw std::invalid_argument("t_bits must lie in [3, 10]");
    }
    if (d && *d == 0) {
        throw std::invalid_argument("d must be positive");
    }
    if (eps3 && !(*eps3 > 0)) {
        throw std::invalid_argument("eps3 must be positive");
    }
    if (!(kappa_cutoff >= 1) || !(eps_relation_constant > 0) || !(qpe_delta > 0 && qpe_delta < 0.5)) {
        throw std::invalid_argument("invalid kappa cutoff, eps relation constant or qpe delta");
    }
    if (min_trace_samples < 100 || max_trace_samples < min_trace_samples) {
        throw std::invalid_argument("trace sample range is invalid");
    }
}

ProjectionResult postprocess_projection(const BlockEncoding &inv_sqrt, const CVector &eigenstate,
                                        ResourceReport *report) {
    const Real n = eigenstate.norm();
    if (std::abs(n - 1) > 1e-6) {
        throw std::invalid_argument("eigenstate must have unit norm");
    }
    const CVector u = inv_sqrt.block() * eigenstate;
    const Real p = u.squaredNorm();
    if (p < 1e-20) {
        throw std::domain_error("eigenstate lies in the null space of the inverse square root");
    }
    ProjectionResult out;
    out.state = u / std::sqrt(p);
    out.success_probability = p;
    out.rounds = p >= 1 - 1e-4 ? 0 : fixed_point_rounds(std::min(p, 1.0), 1e-4);
    if (report != nullptr) {
        auto &stage = report->stage("step4");
        stage.amplification_rounds += out.rounds;
        stage.quantities["inverse_sqrt_uses"] += static_cast<double>(2 * out.rounds + 1);
    }
    return out;
}

EncodingChain build_encoding_chain(const PreparedState &psi_e, const PreparedState &psi_j, const PreparedState &psi_k,
                                   const PipelineConfig &config) {
    BlockEncoding rho_e = density_encoding(psi_e, psi_e.report.declared_error);
    BlockEncoding rho_j = density_encoding(psi_j, psi_j.report.declared_error);
    BlockEncoding rho_k = density_encoding(psi_k, psi_k.report.declared_error);
    EncodingParams params;
    params.kappa_cutoff = config.kappa_cutoff;
    params.s = ceil_log2(psi_e.report.system_count);
    params.a_e = psi_e.report.ancilla_qubits;
    params.a_j = psi_j.report.ancilla_qubits;
    params.a_k = psi_k.report.ancilla_qubits;
    params.eps_e = psi_e.report.declared_error;
    params.eps_j = psi_j.report.declared_error;
    params.eps_k = psi_k.report.declared_error;
    params.kappa = measure_kappa(rho_e, config.kappa_cutoff);
    params.eps3 = config.eps3.value_or(solve_eps3(params.eps_e, params.kappa, config.eps_relation_constant));
    BlockEncoding inv = inverse_sqrt_encoding(rho_e, params);
    BlockEncoding f = product_encoding(product_encoding(inv, rho_j), inv, "F");
    BlockEncoding g = product_encoding(product_encoding(inv, rho_k), inv, "G");
    BlockEncoding htilde = linear_combination_encoding(f, g, "H~");
    return EncodingChain{std::move(rho_e), std::move(rho_j), std::move(rho_k), std::move(inv),
                         std::move(f),     std::move(g),     std::move(htilde), params};
}

QdccaResult run_qpe_pipeline(const PairedDataset &data, const PipelineConfig &config) {
    config.validate();
    QdccaResult res;
    const CenteredDataset centered = mean_center(data);
    const DccaOperators ops = build_operators(centered, data);
    const std::size_t d = config.d.value_or(default_pair_count(data));
    if (d > std::min({data.p(), data.q(), data.classes()})) {
        throw std::invalid_argument("d exceeds min(p, q, c)");
    }
    res.classical = solve_dcca(ops, data.classes(), d);
    const std::size_t dim = data.dim();

    // Step 1
    const ScalingBounds bounds = ScalingBounds::from(data, ops);
    StatePrepConfig prep = config.prep;
    prep.seed = derive_seed(config.seed, 1);
    const MeanEstimates means = estimate_means(data, prep);
    const PreparedState psi_e = prepare_psi_e(data, bounds, means, prep);
    const PreparedState psi_j = prepare_psi_j(data, bounds, means, prep);
    const PreparedState psi_k = prepare_psi_k(data, bounds, means, prep);
    res.preparations = {psi_e.report, psi_j.report, psi_k.report};
    for (const auto *ps : {&psi_e, &psi_j, &psi_k}) {
        res.resources.merge(ps->resources);
    }

    // Step 2
    const EncodingChain chain = build_encoding_chain(psi_e, psi_j, psi_k, config);
    const EncodingParams &params = chain.params;
    res.encoding = params;
    const BlockEncoding &inv = chain.inv_sqrt;
    const BlockEncoding &htilde = chain.htilde;

    const Real tr_e = ops.e_matrix.trace();
    const Real tr_j = ops.j_matrix.trace();
    res.trace_ratio_exact = tr_j / tr_e;
    const Matrix h_classical = reduced_hamiltonian(ops);
    res.htilde_block_error = spectral_norm(block_extract(htilde) - ((tr_e / tr_j) * h_classical).cast<Complex>());

    const CMatrix h_block = hermitian_part(block_extract(htilde));
    Real bound = h_block.norm();  // Frobenius, an upper bound on the spectral radius
    if (bound < 1e-12) {
        bound = 1;
    }

    // trace ratio
    if (config.exact_trace_ratio) {
        res.trace_ratio = res.trace_ratio_exact;
    } else {
        StatePrepConfig raw = prep;
        raw.amplify = false;
        const PreparedState e0 = prepare_psi_e(data, bounds, means, raw);
        const PreparedState j0 = prepare_psi_j(data, bounds, means, raw);
        Rng rng = make_rng(config.seed, 2);
        std::size_t samples = config.min_trace_samples;
        while (true) {
            const TraceRatioEstimate est = estimate_trace_ratio(e0, j0, data, bounds, samples, rng);
            res.trace_ratio = est.ratio;
            res.trace_ratio_standard_error = est.standard_error;
            res.trace_samples = samples;
            if (est.standard_error * bound <= config.eps4 / 4 || samples >= config.max_trace_samples) {
                break;
            }
            samples = std::min(samples * 4, config.max_trace_samples);
        }
        auto &stage = res.resources.stage("trace_ratio");
        stage.oracle_queries["U_E"] += res.trace_samples * psi_e.report.queries_per_prep;
        stage.oracle_queries["U_J"] += res.trace_samples * psi_j.report.queries_per_prep;
    }

    // Step 3
    HamiltonianSimSpec spec;
    // no finer phase grid than eps4 / 2 needs; otherwise t chases noise in a near-zero H~
    const Real floor_bits = std::ldexp(1.0, static_cast<int>(config.t_bits.value_or(3)));
    const Real sim_bound = std::max(bound, 0.98 * floor_bits * config.eps4 / (4 * res.trace_ratio));
    spec.shift = sim_bound;
    spec.t = 0.98 * std::numbers::pi / sim_bound;
    spec.eps4 = config.eps4;
    spec.d = d;
    if (config.t_bits) {
        spec.t_bits = *config.t_bits;
    } else {
        const Real need = 2 * std::numbers::pi * res.trace_ratio / (spec.t * config.eps4);
        spec.t_bits = static_cast<unsigned>(std::clamp(std::ceil(std::log2(need)), 3.0, 10.0));
    }
    spec.sim_error = 1e-8;
    const Real t_e = static_cast<Real>(psi_e.report.total_queries);
    const Real t_tilde_e = params.kappa * (params.a_e + params.s + t_e) *
                           std::pow(log2_at_least_one(std::pow(params.kappa, 1.5) / params.eps3), 2);
    const Real unit = t_tilde_e + static_cast<Real>(psi_j.report.total_queries + psi_k.report.total_queries);
    const SimulatedEvolution evo = simulate_htilde(htilde, spec, unit, params.kappa, params.eps_htilde());
    res.t_bits = spec.t_bits;
    res.t = spec.t;
    res.shift = spec.shift;
    const Real steps = std::ldexp(1.0, static_cast<int>(spec.t_bits));
    res.grid_resolution = 2 * std::numbers::pi * res.trace_ratio / (spec.t * steps);

    const QpeDistribution initial = phase_estimate(evo.unitary, maximally_mixed(dim), spec.t_bits);
    const std::size_t refine = median_repetitions(config.qpe_delta);
    const auto items = static_cast<std::size_t>(
        std::ceil(static_cast<Real>(dim) * std::log(1000.0 * static_cast<Real>(d))));
    Rng rng = make_rng(config.seed, 3);
    std::vector<Real> values(items);
    std::vector<CVector> vectors(items);
    for (std::size_t s = 0; s < items; ++s) {
        const std::size_t y = initial.sample(rng);
        CMatrix posterior = initial.posteriors[y];
        std::vector<Real> phases;
        for (std::size_t r = 0; r < refine; ++r) {
            const QpeDistribution again = phase_estimate(evo.unitary, mixture_of(posterior), spec.t_bits);
            const std::size_t y2 = again.sample(rng);
            phases.push_back(unwrap(again.phase(y2)));
            posterior = again.posteriors[y2];
        }
        values[s] = median_of(phases);
        vectors[s] = top_eigenvector(posterior);
    }
    res.total_tie = std::all_of(values.begin(), values.end(), [&](Real v) { return v == values.front(); });

    const std::uint64_t per_query = static_cast<std::uint64_t>(refine + 1) * initial.controlled_applications;
    // same bin always goes; neighbouring bins only when the state overlaps the found one (swap test)
    const Real same_bin = 0.5 / steps;
    const Real neighbour = 2.0 / steps;
    std::vector<bool> excluded(items, false);
    const std::size_t search_reps = std::max<std::size_t>(
        3, static_cast<std::size_t>(std::ceil(std::log2(static_cast<Real>(d) / config.qpe_delta))));
    const ValueOracle oracle = [&](std::size_t i) {
        return excluded[i] ? -std::numeric_limits<Real>::infinity() : values[i];
    };
    for (std::size_t k = 0; k < d; ++k) {
        const MaxFindResult found = max_find(oracle, items, search_reps, rng);
        res.step3_controlled_unitaries += found.queries * per_query;
        ++res.step3_searches;
        if (excluded[found.index]) {
            break;  // fewer distinct eigenvalues than d
        }
        const Real phase = values[found.index];
        res.eigenvalues_htilde.push_back(evo.eigenvalue_of_phase(phase < 0 ? phase + 1 : phase));
        res.eigenvalues_h.push_back(res.eigenvalues_htilde.back() * res.trace_ratio);
        CVector v = vectors[found.index];
        res.eigenstates.push_back(v / v.norm());
        for (std::size_t i = 0; i < items; ++i) {
            const Real dist = std::abs(values[i] - phase);
            if (dist <= same_bin || (dist <= neighbour && overlap2(vectors[i], res.eigenstates.back()) > 0.5)) {
                excluded[i] = true;
            }
        }
    }
    {
        auto &stage = res.resources.stage("step3");
        stage.qpe_bits = spec.t_bits;
        stage.quantities["controlled_unitaries"] += static_cast<double>(res.step3_controlled_unitaries);
        stage.quantities["cost_per_controlled_unitary"] = evo.cost_per_application;
        stage.quantities["weighted_cost"] +=
            static_cast<double>(res.step3_controlled_unitaries) * evo.cost_per_application;
    }
    const auto &full = res.classical.full_spectrum;
    if (d < full.size() && full[d - 1] - full[d] < 2 * res.grid_resolution) {
        res.ambiguous = true;
    }

    // Step 4
    const Matrix e_inv_sqrt = inverse_sqrt_psd(ops.e_matrix);
    const Eigen::SelfAdjointEigenSolver<Matrix> h_eig(reduced_hamiltonian(ops));
    const Real degen_tol = 1e-8 * std::max(1.0, h_eig.eigenvalues().cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < res.eigenstates.size(); ++i) {
        const ProjectionResult proj = postprocess_projection(inv, res.eigenstates[i], &res.resources);
        res.step4_rounds += proj.rounds;
        res.projections.push_back(proj.state);
        EigenpairComparison cmp;
        cmp.quantum_eigenvalue = res.eigenvalues_h[i];
        cmp.tolerance = config.eps4 + res.grid_resolution;
        if (i < res.classical.eigenvalues.size()) {
            cmp.classical_eigenvalue = res.classical.eigenvalues[i];
            cmp.gap = std::abs(cmp.quantum_eigenvalue - cmp.classical_eigenvalue);
            // eigenspace of lambda_i; one column unless degenerate
            std::vector<Eigen::Index> cols;
            for (Eigen::Index k = 0; k < h_eig.eigenvalues().size(); ++k) {
                if (std::abs(h_eig.eigenvalues()(k) - cmp.classical_eigenvalue) <= degen_tol) {
                    cols.push_back(k);
                }
            }
            Matrix space(h_eig.eigenvectors().rows(), static_cast<Eigen::Index>(cols.size()));
            for (std::size_t k = 0; k < cols.size(); ++k) {
                space.col(static_cast<Eigen::Index>(k)) = h_eig.eigenvectors().col(cols[k]);
            }
            if (cols.size() <= 1) {
                space = res.classical.eigenvectors[i];
            }
            cmp.fidelity = subspace_overlap2(res.eigenstates[i], space);
            cmp.projection_fidelity = subspace_overlap2(proj.state, e_inv_sqrt * space);
        } else {
            cmp.gap = std::numeric_limits<Real>::infinity();
        }
        res.comparison.push_back(cmp);
    }
    return res;
}

std::vector<ResourceRow> resource_summary(const QdccaResult &result, const PairedDataset &data,
                                          const PipelineConfig &config) {
    const DccaOperators ops = build_operators(mean_center(data), data);
    const ScalingBounds bounds = ScalingBounds::from(data, ops);
    const Real mx = data.max_abs_entry();
    const Real n = static_cast<Real>(data.n());
    const Real pq = static_cast<Real>(data.dim());
    const Real c = static_cast<Real>(data.classes());
    const Real np = static_cast<Real>(data.max_class_size());
    const Real m0 = bounds.m0 > 0 ? bounds.m0 : 1;
    const auto &sp = config.prep;
    const auto &enc = result.encoding;
    const Real d = static_cast<Real>(std::max<std::size_t>(1, result.eigenvalues_h.size()));
    const Real kappa = enc.kappa;

    const Real sym_te = mx * mx * log2_at_least_one(n * pq) * log2_at_least_one(1 / sp.delta1) / (m0 * sp.eps1);
    const Real sym_tj = mx * mx * mx * log2_at_least_one(n * pq) * log2_at_least_one(c * np * pq) *
                        log2_at_least_one(1 / sp.delta1) * log2_at_least_one(1 / sp.delta2) /
                        (m0 * sp.eps1 * sp.eps2);
    const auto &pe = result.preparations.at(0);
    const auto &pj = result.preparations.at(1);
    const auto &pk = result.preparations.at(2);
    const Real te = static_cast<Real>(pe.total_queries);
    const Real tj = static_cast<Real>(pj.total_queries);
    const Real tk = static_cast<Real>(pk.total_queries);
    const Real log_sq = std::pow(log2_at_least_one(std::pow(kappa, 1.5) / enc.eps3), 2);
    const Real tt_meas = kappa * (enc.a_e + enc.s + te) * log_sq;
    const Real tt_sym = kappa * (enc.a_e + enc.s + sym_te) * log_sq;

    const Real ratio_bound = n * mx * mx / (m0 * m0);
    const Real eps_h = enc.eps_htilde();
    const Real log_h = eps_h > 0 ? std::max(0.0, std::log2(1.0 / (ratio_bound / config.eps4 * eps_h))) : 0;
    const Real sym_step3 = d * std::sqrt(pq) * (ratio_bound * kappa / config.eps4 + log_h) * (tt_sym + 2 * sym_tj);
    Real meas_step3 = 0;
    if (auto it = result.resources.stages().find("step3"); it != result.resources.stages().end()) {
        meas_step3 = it->second.quantities.count("weighted_cost") ? it->second.quantities.at("weighted_cost") : 0;
    }
    const Real meas_123 = te + tj + tk + tt_meas + meas_step3;
    const Real sym_123 = sym_te + 2 * sym_tj + tt_sym + sym_step3;
    Real inv_uses = 0;
    if (auto it = result.resources.stages().find("step4"); it != result.resources.stages().end()) {
        inv_uses = it->second.quantities.count("inverse_sqrt_uses") ? it->second.quantities.at("inverse_sqrt_uses") : 0;
    }
    const Real meas_step4 = inv_uses * meas_123;
    const Real sym_step4 = kappa * sym_123 * log2_at_least_one(kappa);

    return {
        {"step1", "U_E", te, sym_te},
        {"step1", "U_J", tj, sym_tj},
        {"step1", "U_K", tk, sym_tj},
        {"step1", "U_J circuit", static_cast<Real>(pj.queries_per_prep), sym_tj},
        {"step1", "U_K circuit", static_cast<Real>(pk.queries_per_prep), sym_tj},
        {"step2", "U~_rho_E", tt_meas, tt_sym},
        {"step2", "U_F", tt_meas + tj, tt_sym + sym_tj},
        {"step2", "U_G", tt_meas + tk, tt_sym + sym_tj},
        {"step2", "U_H~", tt_meas + tj + tk, tt_sym + 2 * sym_tj},
        {"step3", "controlled e^{iH~t}", static_cast<Real>(result.step3_controlled_unitaries),
         d * std::sqrt(pq) * ratio_bound * kappa / config.eps4},
        {"step3", "phase estimation and search", meas_step3, sym_step3},
        {"step4", "matrix inversion", meas_step4, sym_step4},
        {"all", "total", meas_123 + meas_step4, sym_123 + sym_step4},
    };
}

}  // namespace qdcca
