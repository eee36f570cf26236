#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace qdcca {

/// Measured costs of one pipeline stage.
struct StageCounters {
    std::map<std::string, std::uint64_t> oracle_queries;
    std::uint64_t gates = 0;
    unsigned ancilla_high_water = 0;
    std::uint64_t amplification_rounds = 0;
    unsigned qpe_bits = 0;
    std::map<std::string, double> quantities;  // other additive measured costs

    std::uint64_t total_queries() const;
    StageCounters &operator+=(const StageCounters &other);
};

/// Per-stage counters plus the closed-form cost terms they are compared against.
class ResourceReport {
  public:
    StageCounters &stage(const std::string &name) { return stages_[name]; }
    const std::map<std::string, StageCounters> &stages() const { return stages_; }
    std::map<std::string, double> &symbolic() { return symbolic_; }
    const std::map<std::string, double> &symbolic() const { return symbolic_; }

    void charge_query(const std::string &stage, const std::string &oracle, std::uint64_t count = 1);
    void merge(const ResourceReport &other);
    StageCounters total() const;

  private:
    std::map<std::string, StageCounters> stages_;
    std::map<std::string, double> symbolic_;
};

}  // namespace qdcca
