#include "qdcca/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qdcca/block_encoding.hpp"
#include "qdcca/dataset_io.hpp"
#include "qdcca/dcca.hpp"
#include "qdcca/eigensolver.hpp"
#include "qdcca/mean_estimation.hpp"
#include "qdcca/random.hpp"
#include "qdcca/state_preparation.hpp"

namespace qdcca {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::size_t uniform_int(Rng &rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<std::size_t> random_composition(Rng &rng, std::size_t n, std::size_t parts) {
    std::vector<std::size_t> sizes(parts, 1);
    for (std::size_t k = parts; k < n; ++k) {
        ++sizes[uniform_int(rng, 0, parts - 1)];
    }
    return sizes;
}

// Uniform entries in [-1, 1]; n leaves E full rank almost surely.
PairedDataset random_dataset(Rng &rng, std::size_t pmax, std::size_t qmax, std::size_t nmax, std::size_t cmin,
                             std::size_t cmax) {
    const std::size_t p = uniform_int(rng, 1, pmax);
    const std::size_t q = uniform_int(rng, 1, qmax);
    const std::size_t c = uniform_int(rng, cmin, cmax);
    const std::size_t nmin = std::max(c, std::max(p, q) + 2);
    const std::size_t n = uniform_int(rng, nmin, std::max(nmin, nmax));
    GeneratorSpec spec;
    spec.p = p;
    spec.q = q;
    spec.class_sizes = random_composition(rng, n, c);
    spec.separation = 1.0;
    spec.seed = rng();
    return generate_dataset(spec);
}

PairedDataset reference_dataset() {
    Matrix a(1, 4);
    a << 1, 2, 3, 4;
    Matrix b(1, 4);
    b << 1, 1, 2, 2;
    return PairedDataset(a, b, {2, 2});
}

Real spectral_norm(const CMatrix &m) { return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0); }

Json dataset_shape(const PairedDataset &d) {
    Json j;
    j["p"] = d.p();
    j["q"] = d.q();
    j["n"] = d.n();
    j["class_sizes"] = d.class_sizes();
    return j;
}

SuiteResult finish(int criterion, const std::string &name, bool pass, std::string summary, Clock::time_point start,
                   double limit, const Json &cases) {
    SuiteResult r;
    r.criterion = criterion;
    r.name = name;
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    r.time_limit = limit;
    const bool in_time = r.seconds < limit;
    r.pass = pass && in_time;
    r.summary = std::move(summary) + "; " + fmt(r.seconds) + " s (limit " + fmt(limit) + " s)";
    Json out;
    out["schema_version"] = 1;
    out["suite"] = name;
    out["criterion"] = criterion;
    out["pass"] = r.pass;
    out["cases"] = cases;
    r.report_json = out.dump(2) + "\n";
    return r;
}

// ---------------------------------------------------------------- 1

SuiteResult classical_suite(const SuiteOptions &opt) {
    const auto start = Clock::now();
    Json cases = Json::array();
    const std::size_t instances = 20;
    const std::size_t pairs = 1000;
    std::vector<Json> results(instances);
    std::vector<int> ok(instances, 0);
    parallel_for(instances, opt.threads, [&](std::size_t i) {
        Rng rng = make_rng(opt.seed, 100 + i);
        const PairedDataset data = random_dataset(rng, 4, 4, 12, 2, 3);
        const CenteredDataset centered = mean_center(data);
        const DccaOperators ops = build_operators(centered, data);
        const SpectralResult s = solve_dcca(ops, data.classes());
        const auto [wx, wy] = normalize_to_constraints(centered, s.projections[0].first, s.projections[0].second);
        const Real top = brute_force_objective(centered, ops, wx, wy);
        std::normal_distribution<Real> gauss;
        Real best_random = -std::numeric_limits<Real>::infinity();
        std::size_t violations = 0;
        for (std::size_t k = 0; k < pairs; ++k) {
            Vector rx(static_cast<Eigen::Index>(data.p()));
            Vector ry(static_cast<Eigen::Index>(data.q()));
            for (auto &v : rx) {
                v = gauss(rng);
            }
            for (auto &v : ry) {
                v = gauss(rng);
            }
            const auto [nx, ny] = normalize_to_constraints(centered, rx, ry);
            const Real obj = brute_force_objective(centered, ops, nx, ny);
            best_random = std::max(best_random, obj);
            if (obj > top + 1e-8) {
                ++violations;
            }
        }
        Json j;
        j["dataset"] = dataset_shape(data);
        j["top_objective"] = top;
        j["lambda_1"] = s.eigenvalues[0];
        j["best_random_objective"] = best_random;
        j["violations"] = violations;
        results[i] = j;
        ok[i] = violations == 0;
    });
    for (auto &j : results) {
        cases.push_back(j);
    }
    const auto ref = reference_dataset();
    const SpectralResult rs = solve_dcca(build_operators(mean_center(ref), ref), ref.classes());
    const Real ref_err = std::abs(rs.eigenvalues[0] - 4 / std::sqrt(5.0));
    Json rj;
    rj["reference_lambda_1"] = rs.eigenvalues[0];
    rj["error"] = ref_err;
    cases.push_back(rj);
    const int good = std::accumulate(ok.begin(), ok.end(), 0);
    const bool pass = good == static_cast<int>(instances) && ref_err <= 1e-10;
    return finish(1, "classical", pass,
                  std::to_string(good) + "/" + std::to_string(instances) + " instances beat " +
                      std::to_string(pairs) + " random pairs; reference |lambda_1 - 4/sqrt5| = " + fmt(ref_err),
                  start, 10, cases);
}

// ---------------------------------------------------------------- 2

SuiteResult identities_suite(const SuiteOptions &opt) {
    const auto start = Clock::now();
    const std::size_t count = 100;
    std::vector<Json> results(count);
    std::vector<double> worst(3, 0.0);
    std::mutex mu;
    parallel_for(count, opt.threads, [&](std::size_t i) {
        Rng rng = make_rng(opt.seed, 200 + i);
        const PairedDataset data = random_dataset(rng, 4, 4, 12, 1, 3);
        const DccaOperators ops = build_operators(mean_center(data), data);
        const Real d_err = (ops.d_matrix - (ops.j_matrix - ops.k_matrix)).cwiseAbs().maxCoeff();
        auto rel = [](const Matrix &a, const Matrix &b) { return (a - b).norm() / std::max(1e-300, b.norm()); };
        const Real fe = rel(ops.e_factor * ops.e_factor.transpose(), ops.e_matrix);
        const Real fj = rel(ops.j_factor * ops.j_factor.transpose(), ops.j_matrix);
        const Real fk = rel(ops.k_factor * ops.k_factor.transpose(), ops.k_matrix);
        const Real tr_e = ops.e_matrix.trace();
        const Real tr_j = ops.j_matrix.trace();
        const Real tr_k = ops.k_matrix.trace();
        const Matrix root = inverse_sqrt_psd(ops.e_matrix / tr_e);
        const Matrix htilde = root * (ops.j_matrix / tr_j - ops.k_matrix / tr_k) * root;
        const Matrix target = (tr_e / tr_j) * reduced_hamiltonian(ops);
        const Real h_err = (htilde - target).cwiseAbs().maxCoeff() / std::max(1.0, target.cwiseAbs().maxCoeff());
        Json j;
        j["dataset"] = dataset_shape(data);
        j["d_minus_j_plus_k"] = d_err;
        j["factor_rel_error"] = {fe, fj, fk};
        j["htilde_error"] = h_err;
        results[i] = j;
        std::lock_guard lock(mu);
        worst[0] = std::max(worst[0], d_err);
        worst[1] = std::max({worst[1], fe, fj, fk});
        worst[2] = std::max(worst[2], h_err);
    });
    Json cases(results);
    const bool pass = worst[0] == 0 && worst[1] <= 1e-12 && worst[2] <= 1e-10;
    return finish(2, "identities", pass,
                  "100 datasets: max|D-(J-K)| = " + fmt(worst[0]) + ", factorization rel " + fmt(worst[1]) +
                      " (<= 1e-12), H~ vs (trE/trJ)H " + fmt(worst[2]) + " (<= 1e-10)",
                  start, 10, cases);
}

// ---------------------------------------------------------------- 3

Matrix grid_matrix(Rng &rng, std::size_t rows, std::size_t cols) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (auto &v : m.reshaped()) {
        v = static_cast<Real>(static_cast<long>(uniform_int(rng, 0, 256)) - 128) / 128.0;
    }
    return m;
}

SuiteResult means_suite(const SuiteOptions &opt) {
    const auto start = Clock::now();
    const std::size_t trials = 500;
    MeanEstimationConfig cfg;
    cfg.epsilon = 0.05;
    cfg.delta = 0.05;
    std::vector<int> hit(trials, 0);
    std::vector<Json> results(trials);
    parallel_for(trials, opt.threads, [&](std::size_t t) {
        Rng rng = make_rng(opt.seed, 300 + t);
        const std::size_t rows = uniform_int(rng, 1, 4);
        const std::size_t cols = uniform_int(rng, 1, 8);
        const OracleTable table("L", grid_matrix(rng, rows, cols), FixedPointFormat{});
        const std::size_t row = uniform_int(rng, 0, rows - 1);
        const Real truth = table.values().row(static_cast<Eigen::Index>(row)).mean();
        const Real est = estimate_row_mean(table, row, cfg, rng);
        hit[t] = std::abs(est - truth) <= cfg.epsilon;
        Json j;
        j["shape"] = {rows, cols};
        j["truth"] = truth;
        j["estimate"] = est;
        j["success"] = hit[t] != 0;
        results[t] = j;
    });
    const double rate = static_cast<double>(std::accumulate(hit.begin(), hit.end(), 0)) / trials;
    const double need = 1 - 2 * cfg.delta - 0.03;

    Rng rng = make_rng(opt.seed, 399);
    const OracleTable table("L", grid_matrix(rng, 2, 8), FixedPointFormat{});
    std::vector<double> inv_eps;
    std::vector<double> queries;
    Json sweep = Json::array();
    for (Real eps : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
        MeanEstimationConfig c = cfg;
        c.epsilon = eps;
        c.c_scale = 1.0;
        RowMeanEstimator est(table, c);
        inv_eps.push_back(1 / eps);
        queries.push_back(static_cast<double>(est.queries_per_estimate()));
        sweep.push_back({{"epsilon", eps}, {"grid", est.grid()}, {"queries", est.queries_per_estimate()}});
    }
    const double slope = log_log_slope(inv_eps, queries);
    Json cases;
    cases["trials"] = results;
    cases["query_sweep"] = sweep;
    cases["slope"] = slope;
    const bool pass = rate >= need && std::abs(slope - 1.0) <= 0.15;
    return finish(3, "means", pass,
                  "success " + fmt(rate) + " (>= " + fmt(need) + ") over 500 trials; query slope vs 1/eps " +
                      fmt(slope) + " (1.0 +- 0.15)",
                  start, 300, cases);
}

// ---------------------------------------------------------------- 4

PairedDataset adversarial_dataset(Rng &rng, std::size_t kind) {
    const std::size_t p = uniform_int(rng, 1, 3);
    const std::size_t q = uniform_int(rng, 1, 3);
    const std::size_t c = uniform_int(rng, 1, 3);
    const std::size_t n = uniform_int(rng, std::max<std::size_t>(c, 2), 12);
    const auto sizes = random_composition(rng, n, c);
    const Real mx = 0.5 + 2.5 * uniform01(rng);
    Matrix m(static_cast<Eigen::Index>(p + q), static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            switch (kind % 4) {
            case 0:  // a single outlier at +max among -max
                m(r, j) = j == 0 ? mx : -mx;
                break;
            case 1:  // first class at +max, the rest at -max
                m(r, j) = static_cast<std::size_t>(j) < sizes[0] ? mx : -mx;
                break;
            case 2:
                m(r, j) = (j % 2 == 0) ? mx : -mx;
                break;
            default:  // all equal
                m(r, j) = mx;
                break;
            }
        }
    }
    const auto ep = static_cast<Eigen::Index>(p);
    return PairedDataset(m.topRows(ep), m.bottomRows(static_cast<Eigen::Index>(q)), sizes);
}

SuiteResult jbound_suite(const SuiteOptions &opt) {
    const auto start = Clock::now();
    const std::size_t count = 100;
    const std::size_t adversarial = 24;
    std::vector<Json> results(count);
    std::vector<int> violation(count, 0);
    std::vector<double> tightness(count, 0.0);
    parallel_for(count, opt.threads, [&](std::size_t i) {
        Rng rng = make_rng(opt.seed, 400 + i);
        const bool adv = i < adversarial;
        const PairedDataset data = adv ? adversarial_dataset(rng, i) : random_dataset(rng, 4, 4, 12, 1, 3);
        const DccaOperators ops = build_operators(mean_center(data), data);
        const ScalingBounds b = ScalingBounds::from(data, ops);
        const Real e_max = ops.e_factor.cwiseAbs().maxCoeff();
        const Real j_max = ops.j_factor.cwiseAbs().maxCoeff();
        violation[i] = (e_max > b.alpha) || (j_max > b.beta);
        tightness[i] = b.beta > 0 ? j_max / b.beta : 0;
        Json j;
        j["adversarial"] = adv;
        j["dataset"] = dataset_shape(data);
        j["max_e_factor"] = e_max;
        j["alpha"] = b.alpha;
        j["max_j_factor"] = j_max;
        j["beta"] = b.beta;
        results[i] = j;
    });
    const int bad = std::accumulate(violation.begin(), violation.end(), 0);
    const double tight = *std::max_element(tightness.begin(), tightness.begin() + adversarial);
    Json cases(results);
    return finish(4, "jbound", bad == 0,
                  std::to_string(bad) + " violations over 100 datasets (" + std::to_string(adversarial) +
                      " adversarial); largest max|J'|/beta on adversarial data " + fmt(tight),
                  start, 5, cases);
}

// ---------------------------------------------------------------- 5

PairedDataset density_dataset(std::uint64_t seed, std::size_t p, std::size_t q, std::size_t n) {
    GeneratorSpec spec;
    spec.p = p;
    spec.q = q;
    spec.class_sizes = {n / 2, n - n / 2};
    spec.density = DensityMode::satisfy;
    spec.value_range = 1.0;
    spec.m0 = 0.2;
    spec.seed = seed;
    return generate_dataset(spec);
}

SuiteResult stateprep_suite(const SuiteOptions &opt) {
    const auto start = Clock::now();
    struct Shape {
        std::size_t p, q, n;
    };
    const std::vector<Shape> shapes{{1, 1, 4}, {1, 1, 6}, {2, 1, 6}, {1, 2, 8}};
    const std::vector<Real> injected{0.02, 0.05, 0.1};
    std::vector<Json> results(shapes.size());
    std::vector<int> law_ok(shapes.size(), 0);
    std::vector<int> fid_ok(shapes.size(), 0);
    std::vector<unsigned> qubits(shapes.size(), 0);
    parallel_for(shapes.size(), opt.threads, [&](std::size_t i) {
        const auto &sh = shapes[i];
        const PairedDataset data = density_dataset(derive_seed(opt.seed, 500 + i), sh.p, sh.q, sh.n);
        const DccaOperators ops = build_operators(mean_center(data), data);
        const ScalingBounds bounds = ScalingBounds::from(data, ops);
        const Vector truth = data.stacked().rowwise().mean();
        Rng rng = make_rng(opt.seed, 550 + i);
        Json j;
        j["dataset"] = dataset_shape(data);
        j["m0"] = bounds.m0;
        Json law = Json::array();
        bool all_law = true;
        for (Real eps1 : injected) {
            StatePrepConfig cfg;
            Vector noisy = truth;
            for (auto &v : noisy) {
                v += uniform01(rng) < 0.5 ? -eps1 : eps1;
            }
            cfg.injected_row_means = noisy;
            const MeanEstimates means = estimate_means(data, cfg);
            const PreparedState psi = prepare_psi_e(data, bounds, means, cfg);
            const Real dist = psi.postselected_distance(ops.e_factor);
            const Real mx = data.max_abs_entry();
            const Real m0 = bounds.m0;
            const Real law_bound = std::sqrt(1 + 8 * mx * eps1 / (m0 * m0) + 2 * eps1 * eps1 / (m0 * m0)) - 1 +
                                   std::sqrt(2.0) * eps1 / m0;
            const bool ok = dist <= psi.report.error_bound + 1e-12 && dist <= law_bound;
            all_law = all_law && ok;
            law.push_back({{"eps1", eps1},
                           {"distance", dist},
                           {"closed_form_bound", psi.report.error_bound},
                           {"entry_error", psi.report.entry_error},
                           {"bound_at_eps1", law_bound},
                           {"qubits", psi.report.total_qubits}});
            qubits[i] = std::max(qubits[i], psi.report.total_qubits);
        }
        j["injected"] = law;
        StatePrepConfig cfg;
        cfg.seed = derive_seed(opt.seed, 580 + i);
        const MeanEstimates means = estimate_means(data, cfg);
        bool all_fid = true;
        Json fid = Json::array();
        const PreparedState e = prepare_psi_e(data, bounds, means, cfg);
        const PreparedState jj = prepare_psi_j(data, bounds, means, cfg);
        const PreparedState k = prepare_psi_k(data, bounds, means, cfg);
        for (const auto &[ps, target] : {std::pair{&e, &ops.e_factor}, std::pair{&jj, &ops.j_factor},
                                         std::pair{&k, &ops.k_factor}}) {
            const Real f = ps->fidelity(*target);
            const bool ok = f >= 1 - (ps->report.error_bound + 1e-3);
            all_fid = all_fid && ok;
            fid.push_back({{"state", ps->report.name},
                           {"fidelity", f},
                           {"error_bound", ps->report.error_bound},
                           {"qubits", ps->report.total_qubits}});
            qubits[i] = std::max(qubits[i], ps->report.total_qubits);
        }
        j["estimated"] = fid;
        results[i] = j;
        law_ok[i] = all_law;
        fid_ok[i] = all_fid;
    });
    const int law = std::accumulate(law_ok.begin(), law_ok.end(), 0);
    const int fid = std::accumulate(fid_ok.begin(), fid_ok.end(), 0);
    const unsigned max_q = *std::max_element(qubits.begin(), qubits.end());
    Json cases(results);
    const auto total = static_cast<int>(shapes.size());
    return finish(5, "stateprep", law == total && fid == total,
                  "error law held on " + std::to_string(law) + "/" + std::to_string(total) +
                      " datasets x eps1 in {0.02,0.05,0.1}; fidelity >= 1-(bound+1e-3) on " + std::to_string(fid) +
                      "/" + std::to_string(total) + "; largest register file " + std::to_string(max_q) +
                      " qubits (sparse)",
                  start, 600, cases);
}

// ---------------------------------------------------------------- 6

SuiteResult blockenc_suite(const SuiteOptions &opt) {
    const auto start = Clock::now();
    const std::size_t count = 20;
    std::vector<Json> results(count);
    std::vector<int> ok(count, 0);
    std::vector<int> anc_ok(count, 0);
    parallel_for(count, opt.threads, [&](std::size_t i) {
        Rng rng = make_rng(opt.seed, 600 + i);
        const PairedDataset data = random_dataset(rng, 2, 2, 8, 2, 3);
        const DccaOperators ops = build_operators(mean_center(data), data);
        const ScalingBounds bounds = ScalingBounds::from(data, ops);
        PipelineConfig cfg;
        cfg.prep.seed = derive_seed(opt.seed, 650 + i);
        const MeanEstimates means = estimate_means(data, cfg.prep);
        const PreparedState e = prepare_psi_e(data, bounds, means, cfg.prep);
        const PreparedState jj = prepare_psi_j(data, bounds, means, cfg.prep);
        const PreparedState k = prepare_psi_k(data, bounds, means, cfg.prep);
        const EncodingChain ch = build_encoding_chain(e, jj, k, cfg);
        const Real tr_e = ops.e_matrix.trace();
        const Real tr_j = ops.j_matrix.trace();
        const Real tr_k = ops.k_matrix.trace();
        const Matrix rho_e = ops.e_matrix / tr_e;
        const Matrix rho_j = ops.j_matrix / tr_j;
        const Matrix rho_k = ops.k_matrix / tr_k;
        const Matrix inv = inverse_sqrt_psd(rho_e);
        const Matrix f = inv * rho_j * inv;
        const Matrix g = inv * rho_k * inv;
        const std::vector<std::pair<const BlockEncoding *, Matrix>> rows{
            {&ch.rho_e, rho_e}, {&ch.rho_j, rho_j}, {&ch.rho_k, rho_k}, {&ch.inv_sqrt, inv},
            {&ch.f, f},         {&ch.g, g},         {&ch.htilde, f - g}};
        Json j;
        j["dataset"] = dataset_shape(data);
        j["kappa"] = ch.params.kappa;
        Json enc = Json::array();
        bool all = true;
        for (const auto &[be, target] : rows) {
            const Real err = spectral_norm(block_extract(*be) - target.cast<Complex>());
            const Real unit = unitarity_error(be->unitary);
            const bool good = err <= be->error_bound && unit <= 1e-10;
            all = all && good;
            enc.push_back({{"name", be->name},
                           {"norm_factor", be->norm_factor},
                           {"ancilla_qubits", be->ancilla_qubits},
                           {"measured_error", err},
                           {"declared_error", be->error_bound},
                           {"unitarity_error", unit}});
        }
        const auto &p = ch.params;
        const unsigned s = p.s;
        const unsigned fa_e = ancilla_budget_e(data.n(), e.report.arithmetic_qubits);
        const unsigned fa_j = ancilla_budget_j(data.classes(), jj.report.arithmetic_qubits);
        const unsigned fa_k = ancilla_budget_k(data.classes(), jj.report.arithmetic_qubits);
        const bool anc = p.a_e == fa_e && p.a_j == fa_j && p.a_k == fa_k && ch.rho_e.ancilla_qubits == fa_e + s &&
                         ch.rho_j.ancilla_qubits == fa_j + s && ch.rho_k.ancilla_qubits == fa_k + s &&
                         ch.inv_sqrt.ancilla_qubits == p.a_prime() && ch.f.ancilla_qubits == p.a_double_prime() &&
                         ch.g.ancilla_qubits == p.a_triple_prime() &&
                         ch.htilde.ancilla_qubits == p.a_triple_prime() + 1 &&
                         std::abs(ch.htilde.norm_factor - 8 * p.kappa) <= 1e-9 * p.kappa &&
                         std::abs(ch.htilde.error_bound - p.eps_htilde()) <= 1e-9 * p.eps_htilde();
        j["encodings"] = enc;
        j["ancilla"] = {{"a_E", p.a_e},       {"ancilla_budget_E", fa_e}, {"a_J", p.a_j},
                        {"ancilla_budget_J", fa_j}, {"a_K", p.a_k},       {"ancilla_budget_K", fa_k},
                        {"a_prime", p.a_prime()}, {"a_double_prime", p.a_double_prime()},
                        {"a_triple_prime", p.a_triple_prime()}};
        results[i] = j;
        ok[i] = all;
        anc_ok[i] = anc;
    });
    const int good = std::accumulate(ok.begin(), ok.end(), 0);
    const int anc = std::accumulate(anc_ok.begin(), anc_ok.end(), 0);
    Json cases(results);
    return finish(6, "blockenc", good == static_cast<int>(count) && anc == static_cast<int>(count),
                  "blocks within declared error on " + std::to_string(good) + "/20 datasets (7 encodings each); "
                  "ancilla counts match the closed-form budget on " + std::to_string(anc) + "/20",
                  start, 300, cases);
}

// ---------------------------------------------------------------- 7

struct PipelineCase {
    std::size_t p, q, n, c;
};

// Classical spectrum separated by four estimated grid steps at t_bits = 7.
bool nondegenerate(const PairedDataset &data, std::size_t d) {
    const DccaOperators ops = build_operators(mean_center(data), data);
    const SpectralResult s = solve_dcca(ops, data.classes(), d);
    if (s.condition.e_singular || s.condition.e_max_eigenvalue / s.condition.e_min_retained_eigenvalue > 1e3) {
        return false;
    }
    const Matrix h = reduced_hamiltonian(ops);
    const Real step = 2 * h.norm() / (0.98 * 128);
    const auto &f = s.full_spectrum;
    for (std::size_t k = 0; k < d && k + 1 < f.size(); ++k) {
        if (f[k] - f[k + 1] < 4 * step) {
            return false;
        }
    }
    return f[d - 1] > 4 * step;
}

SuiteResult pipeline_suite(const SuiteOptions &opt) {
    const auto start = Clock::now();
    const std::vector<PipelineCase> shapes{{1, 1, 4, 2},  {1, 1, 6, 2},  {2, 1, 6, 2},  {1, 2, 8, 2},
                                           {2, 2, 8, 2},  {2, 2, 10, 3}, {3, 2, 12, 3}, {3, 3, 12, 3},
                                           {4, 3, 14, 4}, {4, 4, 16, 4}};
    std::vector<Json> results(shapes.size());
    std::vector<int> ok(shapes.size(), 0);
    parallel_for(shapes.size(), opt.threads, [&](std::size_t i) {
        const auto &sh = shapes[i];
        // the centered class sums have rank at most c - 1, so lambda_c = 0
        const std::size_t d = std::min<std::size_t>(2, std::min({sh.p, sh.q, sh.c - 1}));
        PairedDataset data = reference_dataset();
        std::uint64_t tries = 0;
        if (i > 0) {
            while (true) {
                GeneratorSpec spec;
                spec.p = sh.p;
                spec.q = sh.q;
                Rng rng = make_rng(opt.seed, 700 + 100 * i + tries);
                spec.class_sizes = random_composition(rng, sh.n, sh.c);
                spec.separation = 1.5;
                spec.seed = rng();
                data = generate_dataset(spec);
                ++tries;
                if (nondegenerate(data, d)) {
                    break;
                }
                if (tries > 200) {
                    throw std::runtime_error("no nondegenerate dataset found for this shape");
                }
            }
        }
        PipelineConfig cfg;
        cfg.eps4 = 0.05;
        cfg.t_bits = 7;
        cfg.d = d;
        cfg.seed = derive_seed(opt.seed, 790 + i);
        Json j;
        j["dataset"] = dataset_shape(data);
        j["d"] = d;
        try {
            const QdccaResult r = run_qpe_pipeline(data, cfg);
            bool all = r.comparison.size() == d;
            Json pairs = Json::array();
            for (const auto &c : r.comparison) {
                all = all && c.gap <= c.tolerance && c.fidelity >= 0.99 && c.projection_fidelity >= 0.99;
                pairs.push_back({{"classical", c.classical_eigenvalue},
                                 {"quantum", c.quantum_eigenvalue},
                                 {"gap", c.gap},
                                 {"tolerance", c.tolerance},
                                 {"fidelity", c.fidelity},
                                 {"projection_fidelity", c.projection_fidelity}});
            }
            j["pairs"] = pairs;
            j["trace_ratio"] = {r.trace_ratio, r.trace_ratio_exact, r.trace_ratio_standard_error};
            j["grid_resolution"] = r.grid_resolution;
            j["htilde_block_error"] = r.htilde_block_error;
            j["qubits"] = {r.preparations[0].total_qubits, r.preparations[1].total_qubits,
                           r.preparations[2].total_qubits};
            ok[i] = all;
        } catch (const std::exception &ex) {
            j["error"] = ex.what();
        }
        j["pass"] = ok[i] != 0;
        results[i] = j;
    });
    const int good = std::accumulate(ok.begin(), ok.end(), 0);
    Json cases(results);
    return finish(7, "pipeline", good == static_cast<int>(shapes.size()),
                  std::to_string(good) + "/" + std::to_string(shapes.size()) +
                      " datasets: eigenvalues within eps4 + grid (eps4 = 0.05, t_bits = 7), fidelity of v and w >= 0.99",
                  start, 1800, cases);
}

// ---------------------------------------------------------------- 8

PairedDataset offset_dataset(Real m0) {
    // centered entries are exactly +-m0, the offset keeps max|M| = 1
    const std::size_t n = 8;
    Matrix a(2, static_cast<Eigen::Index>(n));
    Matrix b(2, static_cast<Eigen::Index>(n));
    const int sa[2][8] = {{1, -1, 1, -1, -1, 1, -1, 1}, {1, 1, -1, -1, 1, -1, 1, -1}};
    const int sb[2][8] = {{1, -1, -1, 1, 1, -1, -1, 1}, {-1, 1, 1, -1, 1, 1, -1, -1}};
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
        for (Eigen::Index r = 0; r < 2; ++r) {
            a(r, j) = (1 - m0) + m0 * sa[r][j];
            b(r, j) = -(1 - m0) + m0 * sb[r][j];
        }
    }
    return PairedDataset(a, b, {4, 4});
}

SuiteResult resources_suite(const SuiteOptions &opt) {
    const auto start = Clock::now();
    Json cases;
    const PairedDataset ref = reference_dataset();

    // Step 3 cost against 1/eps4
    const std::vector<Real> eps4s{0.2, 0.1, 0.05, 0.025, 0.0125};
    std::vector<double> inv;
    std::vector<double> cost(eps4s.size(), 0.0);
    std::vector<Json> sweep(eps4s.size());
    const std::size_t seeds = 3;
    parallel_for(eps4s.size(), opt.threads, [&](std::size_t k) {
        Json runs = Json::array();
        for (std::size_t s = 0; s < seeds; ++s) {
            PipelineConfig cfg;
            cfg.eps4 = eps4s[k];
            cfg.exact_trace_ratio = true;
            cfg.seed = derive_seed(opt.seed, 800 + s);
            const QdccaResult r = run_qpe_pipeline(ref, cfg);
            cost[k] += static_cast<double>(r.step3_controlled_unitaries) / seeds;
            runs.push_back({{"t_bits", r.t_bits}, {"controlled_unitaries", r.step3_controlled_unitaries}});
        }
        sweep[k] = {{"eps4", eps4s[k]}, {"runs", runs}, {"mean_controlled_unitaries", cost[k]}};
    });
    for (Real e : eps4s) {
        inv.push_back(1 / e);
    }
    const double slope_step3 = log_log_slope(inv, cost);
    cases["step3_sweep"] = sweep;
    cases["step3_slope"] = slope_step3;

    // amplification rounds against max|M|/m0
    std::vector<double> ratio;
    std::vector<double> rounds;
    Json amp = Json::array();
    for (Real m0 : {1.0, 0.5, 0.25}) {
        const PairedDataset data = offset_dataset(m0);
        const DccaOperators ops = build_operators(mean_center(data), data);
        const ScalingBounds bounds = ScalingBounds::from(data, ops);
        StatePrepConfig cfg;
        cfg.injected_row_means = data.stacked().rowwise().mean();
        const MeanEstimates means = estimate_means(data, cfg);
        const PreparedState e = prepare_psi_e(data, bounds, means, cfg);
        ratio.push_back(data.max_abs_entry() / bounds.m0);
        rounds.push_back(static_cast<double>(e.report.rounds));
        amp.push_back({{"m0", bounds.m0},
                       {"max_over_m0", ratio.back()},
                       {"initial_probability", e.report.initial_good_probability},
                       {"rounds", e.report.rounds}});
    }
    const double slope_rounds = log_log_slope(ratio, rounds);
    cases["rounds_sweep"] = amp;
    cases["rounds_slope"] = slope_rounds;

    // T_K == T_J
    bool equal = true;
    Json tk = Json::array();
    for (std::size_t i = 0; i < 6; ++i) {
        Rng rng = make_rng(opt.seed, 850 + i);
        const PairedDataset data = i == 0 ? ref : random_dataset(rng, 2, 2, 8, 2, 3);
        const DccaOperators ops = build_operators(mean_center(data), data);
        const ScalingBounds bounds = ScalingBounds::from(data, ops);
        StatePrepConfig cfg;
        cfg.seed = derive_seed(opt.seed, 870 + i);
        const MeanEstimates means = estimate_means(data, cfg);
        const PreparedState jj = prepare_psi_j(data, bounds, means, cfg);
        const PreparedState k = prepare_psi_k(data, bounds, means, cfg);
        equal = equal && jj.report.queries_per_prep == k.report.queries_per_prep;
        tk.push_back({{"dataset", dataset_shape(data)},
                      {"T_J", jj.report.queries_per_prep},
                      {"T_K", k.report.queries_per_prep},
                      {"amplified_T_J", jj.report.total_queries},
                      {"amplified_T_K", k.report.total_queries}});
    }
    cases["tk_equals_tj"] = tk;
    const bool pass = std::abs(slope_step3 - 1) <= 0.2 && std::abs(slope_rounds - 1) <= 0.2 && equal;
    return finish(8, "resources", pass,
                  "step 3 cost slope vs 1/eps4 " + fmt(slope_step3) + " (1.0 +- 0.2); rounds slope vs max/m0 " +
                      fmt(slope_rounds) + " (1.0 +- 0.2); T_K == T_J per preparation on 6 datasets: " +
                      (equal ? "yes" : "no"),
                  start, 900, cases);
}

// ---------------------------------------------------------------- 9

SuiteResult trace_suite(const SuiteOptions &opt) {
    const auto start = Clock::now();
    const PairedDataset data = reference_dataset();
    const DccaOperators ops = build_operators(mean_center(data), data);
    const ScalingBounds bounds = ScalingBounds::from(data, ops);
    StatePrepConfig cfg;
    cfg.amplify = false;
    cfg.seed = derive_seed(opt.seed, 900);
    const MeanEstimates means = estimate_means(data, cfg);
    const PreparedState e = prepare_psi_e(data, bounds, means, cfg);
    const PreparedState j = prepare_psi_j(data, bounds, means, cfg);
    const Real truth = 10.0 / 6.0;
    Rng rng = make_rng(opt.seed, 901);
    const TraceRatioEstimate est = estimate_trace_ratio(e, j, data, bounds, 10000, rng);
    const bool within = std::abs(est.ratio - truth) <= 3 * est.standard_error;
    bool below = true;
    Real largest = 0;
    for (std::size_t s = 0; s < 200; ++s) {
        Rng r = make_rng(opt.seed, 1000 + s);
        const TraceRatioEstimate t = estimate_trace_ratio(e, j, data, bounds, 10000, r);
        largest = std::max(largest, t.ratio);
        below = below && t.ratio <= t.bound_simple;
    }
    Json cases;
    cases["estimate"] = est.ratio;
    cases["standard_error"] = est.standard_error;
    cases["p_e"] = est.p_e;
    cases["p_j"] = est.p_j;
    cases["truth"] = truth;
    cases["bound"] = est.bound_simple;
    cases["bound_full"] = est.bound_full;
    cases["largest_of_200"] = largest;
    return finish(9, "trace", within && below,
                  "estimate " + fmt(est.ratio) + " +- " + fmt(est.standard_error) + " vs 10/6 (3 SE: " +
                      (within ? "yes" : "no") + "); largest of 200 runs " + fmt(largest) + " <= bound " +
                      fmt(est.bound_simple),
                  start, 60, cases);
}

using SuiteFn = SuiteResult (*)(const SuiteOptions &);

const std::vector<std::pair<std::string, SuiteFn>> &registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r{
        {"classical", classical_suite}, {"identities", identities_suite}, {"means", means_suite},
        {"jbound", jbound_suite}, {"stateprep", stateprep_suite},   {"blockenc", blockenc_suite},
        {"pipeline", pipeline_suite},   {"resources", resources_suite},   {"trace", trace_suite},
    };
    return r;
}

}  // namespace

const std::vector<std::string> &suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto &[name, fn] : registry()) {
            out.push_back(name);
        }
        return out;
    }();
    return names;
}

SuiteResult run_suite(const std::string &name, const SuiteOptions &options) {
    for (const auto &[n, fn] : registry()) {
        if (n == name) {
            return fn(options);
        }
    }
    std::string list;
    for (const auto &n : suite_names()) {
        list += (list.empty() ? "" : ", ") + n;
    }
    throw std::invalid_argument("unknown suite '" + name + "'; available: " + list);
}

SuiteResult run_criterion(int criterion, const SuiteOptions &options) {
    if (criterion < 1 || criterion > static_cast<int>(registry().size())) {
        throw std::invalid_argument("criteria are numbered 1 to " + std::to_string(registry().size()));
    }
    return registry()[static_cast<std::size_t>(criterion - 1)].second(options);
}

double log_log_slope(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("slope fit needs at least two paired points");
    }
    double mx = 0;
    double my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) {
            throw std::domain_error("log-log fit needs positive values");
        }
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0;
    double sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &body) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace qdcca
