#include "qdcca/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace qdcca {

namespace {

using Json = nlohmann::ordered_json;

Json vector_json(const Vector &v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

Json cvector_json(const CVector &v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(Json::array({v(i).real(), v(i).imag()}));
    }
    return out;
}

Json config_json(const RunConfig &c) {
    Json out;
    out["dataset"] = c.dataset_path ? Json(*c.dataset_path) : Json("generated");
    out["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
    out["eps1"] = c.eps1;
    out["eps2"] = c.eps2;
    out["eps3"] = c.eps3 ? Json(*c.eps3) : Json("auto");
    out["eps4"] = c.eps4;
    out["delta1"] = c.delta1;
    out["delta2"] = c.delta2;
    out["max_qubits"] = c.max_qubits;
    out["t_bits"] = c.t_bits;
    out["d"] = c.d ? Json(*c.d) : Json("auto");
    out["exact_trace_ratio"] = c.exact_trace_ratio;
    out["inject_exact_means"] = c.inject_exact_means;
    return out;
}

Json resources_array(const std::vector<ResourceRow> &rows) {
    Json out = Json::array();
    for (const auto &r : rows) {
        Json row;
        row["step"] = r.step;
        row["operation"] = r.operation;
        row["measured"] = r.measured;
        row["symbolic"] = r.symbolic;
        out.push_back(row);
    }
    return out;
}

std::string fmt(double v, const char *spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

bool ComparisonReport::pass() const {
    for (const auto &c : checks) {
        if (!c.pass) {
            return false;
        }
    }
    return true;
}

ComparisonReport build_comparison(const RunConfig &config, const PairedDataset &data, QdccaResult result) {
    ComparisonReport rep;
    rep.config = config;
    rep.p = data.p();
    rep.q = data.q();
    rep.n = data.n();
    rep.class_sizes = data.class_sizes();
    rep.resources = resource_summary(result, data, config.pipeline(data));
    rep.result = std::move(result);
    const auto &r = rep.result;

    ToleranceCheck grid{"phase_grid_resolution", r.grid_resolution, config.eps4, r.grid_resolution <= config.eps4, ""};
    if (!grid.pass) {
        const double need = r.t_bits + std::ceil(std::log2(r.grid_resolution / config.eps4));
        grid.diagnostic = "grid resolution " + fmt(r.grid_resolution) + " exceeds eps4 = " + fmt(config.eps4) +
                          "; about " + fmt(need, "%.0f") + " phase bits are needed";
    }
    rep.checks.push_back(grid);
    const std::size_t want = r.classical.eigenvalues.size();
    rep.checks.push_back({"eigenpairs_found", static_cast<double>(r.comparison.size()), static_cast<double>(want),
                          r.comparison.size() == want,
                          r.comparison.size() == want ? "" : "fewer distinct phases than requested pairs"});
    for (std::size_t i = 0; i < r.comparison.size(); ++i) {
        const auto &c = r.comparison[i];
        const std::string k = std::to_string(i + 1);
        rep.checks.push_back({"eigenvalue_gap_" + k, c.gap, c.tolerance, c.gap <= c.tolerance, ""});
        rep.checks.push_back({"eigenvector_fidelity_" + k, c.fidelity, 0.99, c.fidelity >= 0.99, ""});
        rep.checks.push_back({"projection_fidelity_" + k, c.projection_fidelity, 0.99, c.projection_fidelity >= 0.99, ""});
    }
    return rep;
}

ComparisonReport run_compare(const RunConfig &config) {
    config.validate();
    const PairedDataset data = config.dataset();
    QdccaResult result = run_qpe_pipeline(data, config.pipeline(data));
    return build_comparison(config, data, std::move(result));
}

std::string to_json(const ComparisonReport &rep) {
    const auto &r = rep.result;
    Json out;
    out["schema_version"] = kSchemaVersion;
    out["status"] = rep.pass() ? "PASS" : "FAIL";
    out["config"] = config_json(rep.config);
    Json ds;
    ds["p"] = rep.p;
    ds["q"] = rep.q;
    ds["n"] = rep.n;
    ds["class_sizes"] = rep.class_sizes;
    out["dataset"] = ds;
    Json pairs = Json::array();
    for (std::size_t i = 0; i < r.comparison.size(); ++i) {
        const auto &c = r.comparison[i];
        Json pr;
        pr["index"] = i + 1;
        pr["classical_eigenvalue"] = c.classical_eigenvalue;
        pr["quantum_eigenvalue"] = c.quantum_eigenvalue;
        pr["gap"] = c.gap;
        pr["tolerance"] = c.tolerance;
        pr["eigenvector_fidelity"] = c.fidelity;
        pr["projection_fidelity"] = c.projection_fidelity;
        pr["eigenstate"] = cvector_json(r.eigenstates[i]);
        pr["projection"] = cvector_json(r.projections[i]);
        pairs.push_back(pr);
    }
    out["eigenpairs"] = pairs;
    Json tr;
    tr["estimate"] = r.trace_ratio;
    tr["exact"] = r.trace_ratio_exact;
    tr["standard_error"] = r.trace_ratio_standard_error;
    tr["samples"] = r.trace_samples;
    out["trace_ratio"] = tr;
    Json qpe;
    qpe["t_bits"] = r.t_bits;
    qpe["t"] = r.t;
    qpe["shift"] = r.shift;
    qpe["grid_resolution"] = r.grid_resolution;
    qpe["ambiguous"] = r.ambiguous;
    qpe["total_tie"] = r.total_tie;
    out["phase_estimation"] = qpe;
    Json enc;
    enc["kappa"] = r.encoding.kappa;
    enc["eps3"] = r.encoding.eps3;
    enc["eps_E"] = r.encoding.eps_e;
    enc["eps_J"] = r.encoding.eps_j;
    enc["eps_K"] = r.encoding.eps_k;
    enc["eps_Htilde"] = r.encoding.eps_htilde();
    enc["a_E"] = r.encoding.a_e;
    enc["a_J"] = r.encoding.a_j;
    enc["a_K"] = r.encoding.a_k;
    enc["a_prime"] = r.encoding.a_prime();
    enc["a_double_prime"] = r.encoding.a_double_prime();
    enc["a_triple_prime"] = r.encoding.a_triple_prime();
    enc["htilde_block_error"] = r.htilde_block_error;
    out["encodings"] = enc;
    Json preps = Json::array();
    for (const auto &p : r.preparations) {
        Json j;
        j["name"] = p.name;
        j["total_qubits"] = p.total_qubits;
        j["ancilla_qubits"] = p.ancilla_qubits;
        j["initial_good_probability"] = p.initial_good_probability;
        j["final_good_probability"] = p.final_good_probability;
        j["rounds"] = p.rounds;
        j["queries_per_prep"] = p.queries_per_prep;
        j["total_queries"] = p.total_queries;
        j["error_bound"] = p.error_bound;
        j["declared_error"] = p.declared_error;
        j["density_assumption"] = p.density_assumption;
        preps.push_back(j);
    }
    out["preparations"] = preps;
    out["resources"] = resources_array(rep.resources);
    Json checks = Json::array();
    for (const auto &c : rep.checks) {
        Json j;
        j["name"] = c.name;
        j["value"] = c.value;
        j["limit"] = c.limit;
        j["pass"] = c.pass;
        if (!c.diagnostic.empty()) {
            j["diagnostic"] = c.diagnostic;
        }
        checks.push_back(j);
    }
    out["checks"] = checks;
    return out.dump(2) + "\n";
}

std::string quantum_json(const ComparisonReport &rep) {
    Json out = Json::parse(to_json(rep));
    out.erase("status");
    out.erase("checks");
    for (auto &pair : out["eigenpairs"]) {
        for (const char *k : {"classical_eigenvalue", "gap", "tolerance", "eigenvector_fidelity", "projection_fidelity"}) {
            pair.erase(k);
        }
    }
    out["trace_ratio"].erase("exact");
    return out.dump(2) + "\n";
}

std::string to_table(const ComparisonReport &rep) {
    std::ostringstream out;
    const auto &r = rep.result;
    out << "pair  classical     quantum       gap         tol         fid(v)    fid(w)\n";
    for (std::size_t i = 0; i < r.comparison.size(); ++i) {
        const auto &c = r.comparison[i];
        char line[200];
        std::snprintf(line, sizeof line, "%-5zu %-13.6f %-13.6f %-11.3e %-11.3e %-9.5f %-9.5f\n", i + 1,
                      c.classical_eigenvalue, c.quantum_eigenvalue, c.gap, c.tolerance, c.fidelity,
                      c.projection_fidelity);
        out << line;
    }
    out << "trace ratio " << fmt(r.trace_ratio) << " (exact " << fmt(r.trace_ratio_exact) << ", se "
        << fmt(r.trace_ratio_standard_error) << ")\n";
    out << "grid resolution " << fmt(r.grid_resolution) << " at t_bits = " << r.t_bits << "\n";
    if (r.ambiguous) {
        out << "note: lambda_d and lambda_{d+1} lie within two grid steps, top-d boundary is ambiguous\n";
    }
    if (r.total_tie) {
        out << "note: every phase tied, no top-d order\n";
    }
    out << "\n";
    out << "step   operation                      measured      closed form\n";
    for (const auto &row : rep.resources) {
        char line[200];
        std::snprintf(line, sizeof line, "%-6s %-30s %-13.4e %-13.4e\n", row.step.c_str(), row.operation.c_str(),
                      row.measured, row.symbolic);
        out << line;
    }
    out << "\n";
    for (const auto &c : rep.checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << " " << fmt(c.value) << " (limit " << fmt(c.limit) << ")";
        if (!c.diagnostic.empty()) {
            out << "  " << c.diagnostic;
        }
        out << "\n";
    }
    out << (rep.pass() ? "PASS" : "FAIL") << "\n";
    return out.str();
}

std::string classical_json(const PairedDataset &data, const SpectralResult &s, const RunConfig &config) {
    Json out;
    out["schema_version"] = kSchemaVersion;
    out["config"] = config_json(config);
    Json ds;
    ds["p"] = data.p();
    ds["q"] = data.q();
    ds["n"] = data.n();
    ds["class_sizes"] = data.class_sizes();
    out["dataset"] = ds;
    out["d"] = s.d;
    out["eigenvalues"] = s.eigenvalues;
    out["full_spectrum"] = s.full_spectrum;
    Json vecs = Json::array();
    for (std::size_t i = 0; i < s.eigenvectors.size(); ++i) {
        Json pr;
        pr["v"] = vector_json(s.eigenvectors[i]);
        pr["w_x"] = vector_json(s.projections[i].first);
        pr["w_y"] = vector_json(s.projections[i].second);
        vecs.push_back(pr);
    }
    out["eigenpairs"] = vecs;
    out["degenerate"] = s.degenerate;
    Json cond;
    cond["e_max_eigenvalue"] = s.condition.e_max_eigenvalue;
    cond["e_min_retained_eigenvalue"] = s.condition.e_min_retained_eigenvalue;
    cond["e_rank"] = s.condition.e_rank;
    cond["e_singular"] = s.condition.e_singular;
    out["condition"] = cond;
    return out.dump(2) + "\n";
}

std::string resources_json(const ComparisonReport &rep) {
    Json out;
    out["schema_version"] = kSchemaVersion;
    out["config"] = config_json(rep.config);
    out["resources"] = resources_array(rep.resources);
    return out.dump(2) + "\n";
}

}  // namespace qdcca
