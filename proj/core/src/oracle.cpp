#include "qdcca/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace qdcca {

OracleTable::OracleTable(std::string name, Matrix values, FixedPointFormat format)
    : name_(std::move(name)), values_(std::move(values)), format_(format) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            if (!format_.representable(values_(i, j))) {
                throw std::overflow_error("oracle " + name_ + ": entry (" + std::to_string(i) + ", " +
                                          std::to_string(j) + ") = " + std::to_string(values_(i, j)) +
                                          " does not fit the output register");
            }
        }
    }
}

Real OracleTable::lookup(std::size_t row, std::size_t col) const {
    return values_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

std::uint64_t OracleTable::encoded(std::size_t row, std::size_t col) const { return format_.encode(lookup(row, col)); }

OracleTable OracleTable::with_format(FixedPointFormat format) const { return OracleTable(name_, values_, format); }

void QueryLedger::charge(const std::string &oracle) const {
    if (report != nullptr) {
        report->charge_query(stage, oracle, weight);
    }
}

void apply_oracle(QuantumState &state, const OracleTable &table, std::size_t row_reg,
                  std::optional<std::size_t> col_reg, std::size_t out_reg, const BasisPredicate &control,
                  const QueryLedger &ledger) {
    const auto &layout = state.layout();
    const auto &out = layout.reg(out_reg);
    if (!out.format || !(*out.format == table.format())) {
        throw std::invalid_argument("oracle " + table.name() + " needs out register '" + out.name +
                                    "' in the table's fixed-point format");
    }
    state.apply_permutation(
        [&](BasisIndex b) {
            const auto row = layout.get(b, row_reg);
            const auto col = col_reg ? layout.get(b, *col_reg) : 0;
            if (row >= table.rows() || col >= table.cols()) {
                return b;
            }
            return layout.set(b, out_reg, layout.get(b, out_reg) ^ table.encoded(row, col));
        },
        control);
    ledger.charge(table.name());
}

namespace {

std::vector<Real> decode_inputs(const RegisterLayout &layout, BasisIndex b, const std::vector<std::size_t> &regs) {
    std::vector<Real> values;
    values.reserve(regs.size());
    for (auto r : regs) {
        values.push_back(layout.get_value(b, r));
    }
    return values;
}

const FixedPointFormat &require_format(const RegisterLayout &layout, std::size_t reg) {
    const auto &r = layout.reg(reg);
    if (!r.format) {
        throw std::invalid_argument("register '" + r.name + "' has no fixed-point format");
    }
    return *r.format;
}

}  // namespace

void arithmetic_oracle(QuantumState &state, const ArithmeticExpr &expr, const std::vector<std::size_t> &in_regs,
                       std::size_t out_reg, const BasisPredicate &control) {
    const auto &layout = state.layout();
    const auto &fmt = require_format(layout, out_reg);
    for (auto r : in_regs) {
        if (r == out_reg) {
            throw std::invalid_argument("arithmetic oracle output must differ from its inputs");
        }
    }
    state.apply_permutation(
        [&](BasisIndex b) {
            const auto inputs = decode_inputs(layout, b, in_regs);
            const Real value = expr(inputs);
            return layout.set(b, out_reg, layout.get(b, out_reg) ^ fmt.encode(value));
        },
        control);
}

void accumulate_oracle(QuantumState &state, const ArithmeticExpr &expr, const std::vector<std::size_t> &in_regs,
                       std::size_t out_reg, int sign, const BasisPredicate &control) {
    const auto &layout = state.layout();
    const auto &fmt = require_format(layout, out_reg);
    for (auto r : in_regs) {
        if (r == out_reg) {
            throw std::invalid_argument("accumulator output must differ from its inputs");
        }
    }
    state.apply_permutation(
        [&](BasisIndex b) {
            const auto inputs = decode_inputs(layout, b, in_regs);
            const Real current = fmt.decode(layout.get(b, out_reg));
            const Real delta = fmt.round(expr(inputs));
            const Real next = current + (sign >= 0 ? delta : -delta);
            if (!fmt.representable(next)) {
                throw std::overflow_error("accumulator register '" + layout.reg(out_reg).name + "' overflows");
            }
            return layout.set(b, out_reg, fmt.encode(next));
        },
        control);
}

void controlled_rotation(QuantumState &state, std::size_t value_reg, std::size_t ancilla_reg, Real scale,
                         const BasisPredicate &control) {
    const auto &layout = state.layout();
    if (scale <= 0) {
        throw std::invalid_argument("rotation scale must be positive");
    }
    state.apply_qubit_operator(
        ancilla_reg, 0,
        [&](BasisIndex b) {
            const Real v = layout.get_value(b, value_reg);
            if (std::abs(v) > scale * (1 + 1e-12)) {
                throw std::domain_error("controlled rotation: |" + std::to_string(v) + "| exceeds scale " +
                                        std::to_string(scale));
            }
            const Real c = std::clamp(v / scale, -1.0, 1.0);
            const Real s = std::sqrt(std::max(0.0, 1.0 - c * c));
            Eigen::Matrix2cd r;
            r << c, s, s, -c;
            return r;
        },
        control);
}

void index_oracle(QuantumState &state, const std::vector<std::size_t> &in_regs, std::size_t out_reg,
                  const IndexExpr &expr, const BasisPredicate &control) {
    const auto &layout = state.layout();
    const auto width = layout.reg(out_reg).width;
    std::vector<std::uint64_t> values(in_regs.size());
    state.apply_permutation(
        [&](BasisIndex b) {
            for (std::size_t r = 0; r < in_regs.size(); ++r) {
                values[r] = layout.get(b, in_regs[r]);
            }
            const auto v = expr(values);
            if (width < 64 && (v >> width) != 0) {
                throw std::overflow_error("index register '" + layout.reg(out_reg).name + "' too narrow");
            }
            return layout.set(b, out_reg, layout.get(b, out_reg) ^ v);
        },
        control);
}

void shift_register(QuantumState &state, std::size_t reg, std::int64_t delta, const BasisPredicate &control) {
    const auto &layout = state.layout();
    const auto width = layout.reg(reg).width;
    const std::uint64_t mask = (width >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
    state.apply_permutation(
        [&](BasisIndex b) {
            const auto v = layout.get(b, reg);
            return layout.set(b, reg, (v + static_cast<std::uint64_t>(delta)) & mask);
        },
        control);
}

void flag_if(QuantumState &state, std::size_t target_reg, unsigned bit, const BasisPredicate &predicate) {
    const auto &layout = state.layout();
    state.apply_permutation(
        [&](BasisIndex b) { return layout.set(b, target_reg, layout.get(b, target_reg) ^ (std::uint64_t{1} << bit)); },
        predicate);
}

}  // namespace qdcca
