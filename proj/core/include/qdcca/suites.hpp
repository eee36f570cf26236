#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qdcca {

/// Outcome of one acceptance criterion or named suite.
struct SuiteResult {
    int criterion = 0;
    std::string name;
    bool pass = false;
    std::string summary;     // one line, the measured quantities against their limits
    double seconds = 0;
    double time_limit = 0;
    std::string report_json; // per-case records
};

struct SuiteOptions {
    std::uint64_t seed = 20240601;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Suite names in criterion order: classical, identities, means, jbound, stateprep,
/// blockenc, pipeline, resources, trace.
const std::vector<std::string> &suite_names();

/// Throws std::invalid_argument listing the suites for an unknown name.
SuiteResult run_suite(const std::string &name, const SuiteOptions &options = {});
SuiteResult run_criterion(int criterion, const SuiteOptions &options = {});

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double> &x, const std::vector<double> &y);

/// Runs body(i) for i < count on up to `threads` workers; results are written by index.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &body);

}  // namespace qdcca
