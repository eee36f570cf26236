#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdcca/fixed_point.hpp"
#include "qdcca/linalg.hpp"
#include "qdcca/quantum_state.hpp"
#include "qdcca/resources.hpp"

namespace qdcca {

/// Classical table behind a QRAM-style oracle |i>|j>|z> -> |i>|j>|z xor enc(T_ij)>.
class OracleTable {
  public:
    /// Throws std::overflow_error if any entry does not fit `format`.
    OracleTable(std::string name, Matrix values, FixedPointFormat format);

    const std::string &name() const { return name_; }
    const Matrix &values() const { return values_; }
    const FixedPointFormat &format() const { return format_; }
    std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
    Real max_abs() const { return values_.cwiseAbs().maxCoeff(); }
    Real lookup(std::size_t row, std::size_t col = 0) const;
    std::uint64_t encoded(std::size_t row, std::size_t col = 0) const;

    /// Same entries stored in a different format.
    OracleTable with_format(FixedPointFormat format) const;

  private:
    std::string name_;
    Matrix values_;
    FixedPointFormat format_;
};

/// Where oracle queries are charged.
struct QueryLedger {
    ResourceReport *report = nullptr;
    std::string stage;
    std::uint64_t weight = 1;

    void charge(const std::string &oracle) const;
};

/// XOR-loads T(row, col) into out_reg. Indices outside the table leave the state untouched.
/// Pass std::nullopt as col_reg for a vector-valued table such as the class sizes.
void apply_oracle(QuantumState &state, const OracleTable &table, std::size_t row_reg,
                  std::optional<std::size_t> col_reg, std::size_t out_reg, const BasisPredicate &control = {},
                  const QueryLedger &ledger = {});

using ArithmeticExpr = std::function<Real(std::span<const Real>)>;

/// out ^= enc(expr(decoded inputs)); an involution. Throws std::overflow_error when the result
/// does not fit out_reg's format.
void arithmetic_oracle(QuantumState &state, const ArithmeticExpr &expr, const std::vector<std::size_t> &in_regs,
                       std::size_t out_reg, const BasisPredicate &control = {});

/// In-place reversible update out <- out + sign * expr(inputs) (two's complement arithmetic).
/// sign = -1 undoes sign = +1. in_regs must not contain out_reg.
void accumulate_oracle(QuantumState &state, const ArithmeticExpr &expr, const std::vector<std::size_t> &in_regs,
                       std::size_t out_reg, int sign, const BasisPredicate &control = {});

/// Ancilla receives (v/scale)|0> + sqrt(1-(v/scale)^2)|1> for the value v held in value_reg.
/// The rotation is a real reflection, so applying it twice is the identity.
void controlled_rotation(QuantumState &state, std::size_t value_reg, std::size_t ancilla_reg, Real scale,
                         const BasisPredicate &control = {});

using IndexExpr = std::function<std::uint64_t(std::span<const std::uint64_t>)>;

/// out ^= f(index values); exact integer index arithmetic such as (i-1)n' + j.
void index_oracle(QuantumState &state, const std::vector<std::size_t> &in_regs, std::size_t out_reg,
                  const IndexExpr &expr, const BasisPredicate &control = {});

/// reg <- (reg + delta) mod 2^width; an exact index-arithmetic permutation.
void shift_register(QuantumState &state, std::size_t reg, std::int64_t delta, const BasisPredicate &control = {});

/// Flips `bit` of target_reg where the predicate holds (a basis-controlled X).
void flag_if(QuantumState &state, std::size_t target_reg, unsigned bit, const BasisPredicate &predicate);

}  // namespace qdcca
