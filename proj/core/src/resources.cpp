#include "qdcca/resources.hpp"

#include <algorithm>

namespace qdcca {

std::uint64_t StageCounters::total_queries() const {
    std::uint64_t total = 0;
    for (const auto &[name, count] : oracle_queries) {
        total += count;
    }
    return total;
}

StageCounters &StageCounters::operator+=(const StageCounters &other) {
    for (const auto &[name, count] : other.oracle_queries) {
        oracle_queries[name] += count;
    }
    gates += other.gates;
    ancilla_high_water = std::max(ancilla_high_water, other.ancilla_high_water);
    amplification_rounds += other.amplification_rounds;
    qpe_bits = std::max(qpe_bits, other.qpe_bits);
    for (const auto &[name, value] : other.quantities) {
        quantities[name] += value;
    }
    return *this;
}

void ResourceReport::charge_query(const std::string &stage, const std::string &oracle, std::uint64_t count) {
    stages_[stage].oracle_queries[oracle] += count;
}

void ResourceReport::merge(const ResourceReport &other) {
    for (const auto &[name, counters] : other.stages_) {
        stages_[name] += counters;
    }
    for (const auto &[name, value] : other.symbolic_) {
        symbolic_[name] = value;
    }
}

StageCounters ResourceReport::total() const {
    StageCounters out;
    for (const auto &[name, counters] : stages_) {
        out += counters;
    }
    return out;
}

}  // namespace qdcca
