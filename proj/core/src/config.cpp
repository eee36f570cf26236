#include "qdcca/config.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace qdcca {

namespace {

struct KeyInfo {
    const char *section;
    const char *key;
};

constexpr KeyInfo kKeys[] = {
    {"dataset", "path"},       {"dataset", "p"},          {"dataset", "q"},
    {"dataset", "classes"},    {"dataset", "range"},      {"dataset", "separation"},
    {"dataset", "density"},    {"dataset", "m0"},         {"tolerances", "eps1"},
    {"tolerances", "eps2"},    {"tolerances", "eps3"},    {"tolerances", "eps4"},
    {"tolerances", "delta1"},  {"tolerances", "delta2"},  {"simulator", "max_qubits"},
    {"simulator", "t_bits"},   {"run", "d"},              {"run", "exact_trace_ratio"},
    {"run", "inject_exact_means"}, {"run", "seed"},       {"run", "out"},
    {"run", "table"},
};

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string bare_key(const std::string &key) {
    const auto dot = key.find('.');
    std::string k = dot == std::string::npos ? key : key.substr(dot + 1);
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

const KeyInfo *find_key(const std::string &key) {
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string k = bare_key(key);
    for (const auto &info : kKeys) {
        if (k == info.key && (section.empty() || section == info.section)) {
            return &info;
        }
    }
    return nullptr;
}

double to_double(const std::string &key, const std::string &v) {
    double out = 0;
    const auto *last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), last, out);
    if (v.empty() || ec != std::errc{} || ptr != last) {
        throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
    }
    return out;
}

std::uint64_t to_uint(const std::string &key, const std::string &v) {
    std::uint64_t out = 0;
    const auto *last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), last, out);
    if (v.empty() || ec != std::errc{} || ptr != last) {
        throw std::invalid_argument(key + ": expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string &key, const std::string &v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "0" || v == "false" || v == "no" || v == "off") {
        return false;
    }
    throw std::invalid_argument(key + ": expected true or false, got '" + v + "'");
}

std::string number_text(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

const std::vector<std::string> &config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto &info : kKeys) {
            out.push_back(std::string(info.section) + "." + info.key);
        }
        return out;
    }();
    return keys;
}

void apply_setting(RunConfig &c, const std::string &key, const std::string &raw) {
    const KeyInfo *info = find_key(key);
    if (info == nullptr) {
        throw std::invalid_argument("unknown setting '" + key + "'");
    }
    const std::string k = info->key;
    const std::string v = trim(raw);
    if (k == "path") {
        c.dataset_path = v.empty() ? std::nullopt : std::optional<std::string>(v);
    } else if (k == "p") {
        c.generator.p = to_uint(k, v);
    } else if (k == "q") {
        c.generator.q = to_uint(k, v);
    } else if (k == "classes") {
        std::vector<std::size_t> sizes;
        std::istringstream parts(v);
        std::string part;
        while (std::getline(parts, part, ',')) {
            sizes.push_back(to_uint(k, trim(part)));
        }
        c.generator.class_sizes = sizes;
    } else if (k == "range") {
        c.generator.value_range = to_double(k, v);
    } else if (k == "separation") {
        c.generator.separation = to_double(k, v);
    } else if (k == "density") {
        c.generator.density = parse_density_mode(v);
    } else if (k == "m0") {
        c.generator.m0 = to_double(k, v);
    } else if (k == "eps1") {
        c.eps1 = to_double(k, v);
    } else if (k == "eps2") {
        c.eps2 = to_double(k, v);
    } else if (k == "eps3") {
        c.eps3 = v.empty() || v == "auto" ? std::nullopt : std::optional<double>(to_double(k, v));
    } else if (k == "eps4") {
        c.eps4 = to_double(k, v);
    } else if (k == "delta1") {
        c.delta1 = to_double(k, v);
    } else if (k == "delta2") {
        c.delta2 = to_double(k, v);
    } else if (k == "max_qubits") {
        c.max_qubits = static_cast<unsigned>(to_uint(k, v));
    } else if (k == "t_bits") {
        c.t_bits = static_cast<unsigned>(to_uint(k, v));
    } else if (k == "d") {
        c.d = v.empty() || v == "auto" ? std::nullopt : std::optional<std::size_t>(to_uint(k, v));
    } else if (k == "exact_trace_ratio") {
        c.exact_trace_ratio = to_bool(k, v);
    } else if (k == "inject_exact_means") {
        c.inject_exact_means = to_bool(k, v);
    } else if (k == "seed") {
        if (v.empty()) {
            c.seed.reset();
        } else {
            c.seed = to_uint(k, v);
            c.generator.seed = *c.seed;
        }
    } else if (k == "out") {
        c.out = v;
    } else if (k == "table") {
        c.table = to_bool(k, v);
    }
}

void RunConfig::validate() const {
    for (double v : {eps1, eps2, eps4, delta1, delta2}) {
        if (!(v > 0)) {
            throw std::invalid_argument("tolerances must be positive");
        }
    }
    if (eps3 && !(*eps3 > 0)) {
        throw std::invalid_argument("tolerances must be positive");
    }
    if (delta1 >= 0.5 || delta2 >= 0.5) {
        throw std::invalid_argument("failure probabilities must be below 1/2");
    }
    if (t_bits < 3 || t_bits > 10) {
        throw std::invalid_argument("t_bits must lie in [3, 10]");
    }
    if (max_qubits == 0 || max_qubits > 120) {
        throw std::invalid_argument("max_qubits must lie in [1, 120]");
    }
    if (!dataset_path) {
        generator.validate();
    }
}

std::uint64_t RunConfig::require_seed() const {
    if (!seed) {
        throw std::invalid_argument("a seed is required (--seed, QDCCA_SEED or run.seed)");
    }
    return *seed;
}

PairedDataset RunConfig::dataset() const {
    if (dataset_path) {
        return load_dataset(*dataset_path);
    }
    GeneratorSpec spec = generator;
    spec.seed = require_seed();
    return generate_dataset(spec);
}

PipelineConfig RunConfig::pipeline(const PairedDataset &data) const {
    PipelineConfig p;
    p.prep.eps1 = eps1;
    p.prep.eps2 = eps2;
    p.prep.delta1 = delta1;
    p.prep.delta2 = delta2;
    p.prep.max_qubits = max_qubits;
    if (inject_exact_means) {
        p.prep.injected_row_means = data.stacked().rowwise().mean();
    }
    p.eps3 = eps3;
    p.eps4 = eps4;
    p.t_bits = t_bits;
    p.d = d;
    p.exact_trace_ratio = exact_trace_ratio;
    p.seed = require_seed();
    return p;
}

std::map<std::string, std::string> parse_config_text(std::istream &in) {
    std::map<std::string, std::string> out;
    std::string section;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        const std::string text = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (text.empty()) {
            continue;
        }
        if (text.front() == '[') {
            if (text.back() != ']') {
                throw std::invalid_argument("config line " + std::to_string(line_no) + ": bad section header");
            }
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = (section.empty() ? "" : section + ".") + trim(text.substr(0, eq));
        const KeyInfo *info = find_key(key);
        if (info == nullptr) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        out[std::string(info->section) + "." + info->key] = trim(text.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config " + path);
    }
    return parse_config_text(in);
}

std::map<std::string, std::string> environment_settings(const std::function<const char *(const char *)> &getenv) {
    std::map<std::string, std::string> out;
    for (const auto &info : kKeys) {
        std::string name = std::string("QDCCA_") + info.key;
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
        if (const char *v = getenv(name.c_str())) {
            out[std::string(info.section) + "." + info.key] = v;
        }
    }
    return out;
}

RunConfig resolve_config(const std::map<std::string, std::string> &file,
                         const std::map<std::string, std::string> &env,
                         const std::map<std::string, std::string> &flags) {
    RunConfig c;
    for (const auto *layer : {&file, &env, &flags}) {
        for (const auto &[k, v] : *layer) {
            apply_setting(c, k, v);
        }
    }
    c.validate();
    return c;
}

std::string to_config_text(const RunConfig &c) {
    std::ostringstream out;
    std::string classes;
    for (std::size_t i = 0; i < c.generator.class_sizes.size(); ++i) {
        classes += (i ? "," : "") + std::to_string(c.generator.class_sizes[i]);
    }
    out << "[dataset]\n";
    out << "path = " << c.dataset_path.value_or("") << "\n";
    out << "p = " << c.generator.p << "\nq = " << c.generator.q << "\nclasses = " << classes << "\n";
    out << "range = " << number_text(c.generator.value_range) << "\n";
    out << "separation = " << number_text(c.generator.separation) << "\n";
    out << "density = " << to_string(c.generator.density) << "\nm0 = " << number_text(c.generator.m0) << "\n";
    out << "\n[tolerances]\n";
    out << "eps1 = " << number_text(c.eps1) << "\neps2 = " << number_text(c.eps2) << "\n";
    out << "eps3 = " << (c.eps3 ? number_text(*c.eps3) : "auto") << "\neps4 = " << number_text(c.eps4) << "\n";
    out << "delta1 = " << number_text(c.delta1) << "\ndelta2 = " << number_text(c.delta2) << "\n";
    out << "\n[simulator]\nmax_qubits = " << c.max_qubits << "\nt_bits = " << c.t_bits << "\n";
    out << "\n[run]\nd = " << (c.d ? std::to_string(*c.d) : "auto") << "\n";
    out << "exact_trace_ratio = " << (c.exact_trace_ratio ? "true" : "false") << "\n";
    out << "inject_exact_means = " << (c.inject_exact_means ? "true" : "false") << "\n";
    out << "seed = " << (c.seed ? std::to_string(*c.seed) : "") << "\n";
    out << "out = " << c.out << "\ntable = " << (c.table ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace qdcca
