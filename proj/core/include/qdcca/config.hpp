#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdcca/dataset_io.hpp"
#include "qdcca/eigensolver.hpp"

namespace qdcca {

struct RunConfig {
    std::optional<std::string> dataset_path;  // otherwise the generator
    GeneratorSpec generator;
    double eps1 = 0.002;
    double eps2 = 0.002;
    std::optional<double> eps3;
    double eps4 = 0.05;
    double delta1 = 0.05;
    double delta2 = 0.05;
    unsigned max_qubits = 120;
    unsigned t_bits = 7;
    std::optional<std::size_t> d;
    bool exact_trace_ratio = false;
    bool inject_exact_means = false;
    std::optional<std::uint64_t> seed;
    std::string out;  // report path, empty for stdout
    bool table = false;

    void validate() const;
    std::uint64_t require_seed() const;
    PairedDataset dataset() const;
    PipelineConfig pipeline(const PairedDataset &data) const;
};

/// Recognised keys, as `section.key`. Flags and QDCCA_<KEY> environment variables use the key part.
const std::vector<std::string> &config_keys();

/// Sets one knob; `key` may be `section.key` or the bare key. Throws std::invalid_argument.
void apply_setting(RunConfig &config, const std::string &key, const std::string &value);

/// `key = value` lines grouped under `[section]` headers; `#` and `;` start comments.
std::map<std::string, std::string> parse_config_text(std::istream &in);
std::map<std::string, std::string> load_config_file(const std::string &path);

/// QDCCA_<KEY> variables for every recognised key, looked up through `getenv`.
std::map<std::string, std::string> environment_settings(
    const std::function<const char *(const char *)> &getenv);

/// Defaults, then the file, then the environment, then explicit flags.
RunConfig resolve_config(const std::map<std::string, std::string> &file,
                         const std::map<std::string, std::string> &env,
                         const std::map<std::string, std::string> &flags);

/// Canonical `key = value` text of every knob, sorted by section.
std::string to_config_text(const RunConfig &config);

}  // namespace qdcca
