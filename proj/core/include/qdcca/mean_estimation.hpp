#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>

#include "qdcca/amplitude.hpp"
#include "qdcca/oracle.hpp"

namespace qdcca {

struct MeanEstimationConfig {
    Real epsilon = 0.05;
    Real delta = 0.05;
    std::optional<Real> c_scale;  // defaults to max |L_ij| of the table

    void validate() const;
};

/// The U_y circuit for one row: registers row, flag, col, value, anc.
/// Flag |1> marks the good subspace, reached with probability (1 - mean/C)/2.
struct UyCircuit {
    GroverProblem problem;
    std::size_t row_reg;
    std::size_t flag_reg;
    std::size_t col_reg;
    std::size_t value_reg;
    std::size_t anc_reg;
    Real scale;
};

/// Throws std::domain_error if some |L_ij| exceeds scale.
UyCircuit build_uy(const OracleTable &table, std::size_t row, Real scale);

/// Row-mean estimation: amplitude estimation on U_y with a grid sized for epsilon/(2C),
/// boosted by a median of l runs. Outcome distributions are simulated once per row and cached.
class RowMeanEstimator {
  public:
    RowMeanEstimator(const OracleTable &table, MeanEstimationConfig config);

    Real scale() const { return scale_; }
    std::size_t grid() const { return grid_; }
    std::size_t repetitions() const { return repetitions_; }
    /// O_L queries charged for one boosted estimate.
    std::uint64_t queries_per_estimate() const;

    const EstimationDistribution &distribution(std::size_t row);
    Real estimate(std::size_t row, Rng &rng, const QueryLedger &ledger = {});
    /// One estimate per row, row r drawing from stream r of `seed`.
    Vector estimate_all(std::uint64_t seed, const QueryLedger &ledger = {});

  private:
    const OracleTable &table_;
    MeanEstimationConfig config_;
    Real scale_;
    std::size_t grid_;
    std::size_t repetitions_;
    std::map<std::size_t, EstimationDistribution> cache_;
};

Real estimate_row_mean(const OracleTable &table, std::size_t row, const MeanEstimationConfig &config, Rng &rng,
                       const QueryLedger &ledger = {});

/// Table of row means (one column) ready for coherent use.
OracleTable mean_table(std::string name, const Vector &means, unsigned fraction_bits);

/// U_mean inside a superposition: out_reg ^= enc(mean[index]) as a basis permutation over the
/// seeded estimates. Each use is charged `queries_per_use` queries of the underlying data oracle.
void coherent_mean(QuantumState &state, const OracleTable &means, std::size_t index_reg, std::size_t out_reg,
                   const BasisPredicate &control = {}, const QueryLedger &ledger = {},
                   std::uint64_t queries_per_use = 1);

/// |i>|j>|0> -> |i>|j>|M_ij - mean_i>, obtained by running coherent_mean, the data oracle and an
/// in-place subtraction on the full index superposition and reading the result off the support.
OracleTable qms_oracle(const OracleTable &data, const OracleTable &means, unsigned fraction_bits,
                       unsigned max_qubits = kDefaultMaxQubits);

}  // namespace qdcca
