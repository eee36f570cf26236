// qdcca command-line tool.
// Exit codes: 0 pass, 1 a tolerance or suite check failed, 2 bad input or configuration, 3 runtime error.
#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>

#include "qdcca/config.hpp"
#include "qdcca/dataset_io.hpp"
#include "qdcca/dcca.hpp"
#include "qdcca/report.hpp"
#include "qdcca/suites.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

bool is_switch(const std::string &key) {
    return key == "exact_trace_ratio" || key == "inject_exact_means" || key == "table";
}

std::string flag_name(std::string key) {
    for (auto &ch : key) {
        if (ch == '_') {
            ch = '-';
        }
    }
    return "--" + key;
}

void emit(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
}

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Classical and simulated quantum discriminant CCA"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);

    // Every config key doubles as a flag; values are parsed by apply_setting.
    std::map<std::string, std::string> raw;
    std::map<std::string, bool> switches;
    for (const auto &full : qdcca::config_keys()) {
        const auto key = full.substr(full.find('.') + 1);
        if (is_switch(key)) {
            app.add_flag(flag_name(key), switches[key], "config " + full);
        } else {
            app.add_option(flag_name(key), raw[key], "config " + full);
        }
    }

    auto *generate = app.add_subcommand("generate", "write a synthetic dataset as CSV");
    auto *classical = app.add_subcommand("classical", "classical DCCA spectrum and projections");
    auto *quantum = app.add_subcommand("quantum", "simulated quantum pipeline estimates");
    auto *compare = app.add_subcommand("compare", "quantum vs classical report; exit 1 on any failed check");
    auto *resources = app.add_subcommand("resources", "per-step cost rows of a pipeline run");
    auto *suite = app.add_subcommand("suite", "run a named check suite, or all of them");

    std::string suite_name = "all";
    std::string report_dir;
    unsigned threads = 0;
    suite->add_option("name", suite_name, "suite name or 'all'");
    suite->add_option("--reports", report_dir, "directory for per-suite JSON reports");
    suite->add_option("--threads", threads, "worker threads, 0 for hardware concurrency");

    CLI11_PARSE(app, argc, argv);

    try {
        qdcca::RunConfig config;
        try {
            std::map<std::string, std::string> flags;
            for (const auto &[key, value] : raw) {
                if (!value.empty()) {
                    flags[key] = value;
                }
            }
            for (const auto &[key, on] : switches) {
                if (on) {
                    flags[key] = "true";
                }
            }
            const auto file = config_path.empty() ? std::map<std::string, std::string>{}
                                                  : qdcca::load_config_file(config_path);
            const auto env = qdcca::environment_settings([](const char *name) { return std::getenv(name); });
            config = qdcca::resolve_config(file, env, flags);
            config.validate();
        } catch (const std::exception &ex) {
            throw InputError(ex.what());
        }

        if (suite->parsed()) {
            qdcca::SuiteOptions opt;
            if (config.seed) {
                opt.seed = *config.seed;
            }
            opt.threads = threads;
            std::vector<std::string> names;
            if (suite_name == "all") {
                names = qdcca::suite_names();
            } else {
                names.push_back(suite_name);
            }
            if (!report_dir.empty()) {
                std::filesystem::create_directories(report_dir);
            }
            int failed = 0;
            for (const auto &name : names) {
                qdcca::SuiteResult r;
                try {
                    r = qdcca::run_suite(name, opt);
                } catch (const std::invalid_argument &ex) {
                    throw InputError(ex.what());
                }
                std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.summary << "\n";
                if (!report_dir.empty()) {
                    emit(report_dir + "/" + r.name + ".json", r.report_json);
                }
                failed += r.pass ? 0 : 1;
            }
            return failed == 0 ? 0 : kExitFail;
        }

        if (generate->parsed()) {
            if (config.dataset_path) {
                throw InputError("generate takes generator settings, not a dataset path");
            }
            emit(config.out, qdcca::dataset_to_csv(config.dataset()));
            return 0;
        }

        if (classical->parsed()) {
            const auto data = config.dataset();
            const auto ops = qdcca::build_operators(qdcca::mean_center(data), data);
            const auto spectral = qdcca::solve_dcca(ops, data.classes(), config.d);
            emit(config.out, qdcca::classical_json(data, spectral, config));
            return 0;
        }

        const auto report = qdcca::run_compare(config);
        if (quantum->parsed()) {
            emit(config.out, qdcca::quantum_json(report));
            return 0;
        }
        if (resources->parsed()) {
            emit(config.out, config.table ? qdcca::to_table(report) : qdcca::resources_json(report));
            return 0;
        }
        if (compare->parsed()) {
            emit(config.out, qdcca::to_json(report));
            if (config.table) {
                std::cerr << qdcca::to_table(report);
            }
            return report.pass() ? 0 : kExitFail;
        }
    } catch (const InputError &ex) {
        std::cerr << "qdcca: " << ex.what() << "\n";
        return kExitInput;
    } catch (const qdcca::DatasetFormatError &ex) {
        std::cerr << "qdcca: " << ex.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument &ex) {
        std::cerr << "qdcca: " << ex.what() << "\n";
        return kExitInput;
    } catch (const std::exception &ex) {
        std::cerr << "qdcca: " << ex.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
