#pragma once

#include <string>
#include <vector>

#include "qdcca/config.hpp"
#include "qdcca/eigensolver.hpp"

namespace qdcca {

inline constexpr int kSchemaVersion = 1;

struct ToleranceCheck {
    std::string name;
    double value = 0;
    double limit = 0;
    bool pass = false;
    std::string diagnostic;
};

struct ComparisonReport {
    RunConfig config;
    std::size_t p = 0;
    std::size_t q = 0;
    std::size_t n = 0;
    std::vector<std::size_t> class_sizes;
    QdccaResult result;
    std::vector<ResourceRow> resources;
    std::vector<ToleranceCheck> checks;

    bool pass() const;
};

ComparisonReport run_compare(const RunConfig &config);
ComparisonReport build_comparison(const RunConfig &config, const PairedDataset &data, QdccaResult result);

std::string to_json(const ComparisonReport &report);
std::string to_table(const ComparisonReport &report);
/// The quantum side only: no classical values, no checks, no status.
std::string quantum_json(const ComparisonReport &report);

/// Classical-only report: spectrum, projections and conditioning.
std::string classical_json(const PairedDataset &data, const SpectralResult &spectral, const RunConfig &config);
/// Cost rows with measured and closed-form columns.
std::string resources_json(const ComparisonReport &report);

}  // namespace qdcca
