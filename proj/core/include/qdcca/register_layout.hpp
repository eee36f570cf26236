#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdcca/fixed_point.hpp"

namespace qdcca {

/// Computational-basis index over all registers of a layout.
using BasisIndex = unsigned __int128;

inline constexpr unsigned kDefaultMaxQubits = 120;

struct Register {
    std::string name;
    unsigned width = 1;
    std::optional<FixedPointFormat> format;
};

/// Named registers; the first register added occupies the most significant bits,
/// so |r0>|r1>...|rk> maps to the usual Kronecker ordering.
class RegisterLayout {
  public:
    explicit RegisterLayout(unsigned max_qubits = kDefaultMaxQubits) : max_qubits_(max_qubits) {}

    std::size_t add(std::string name, unsigned width);
    std::size_t add_fixed(std::string name, FixedPointFormat format);

    std::size_t index_of(const std::string &name) const;
    const Register &reg(std::size_t index) const { return registers_.at(index); }
    const std::vector<Register> &registers() const { return registers_; }
    std::size_t size() const { return registers_.size(); }

    unsigned total_qubits() const { return total_; }
    unsigned max_qubits() const { return max_qubits_; }
    unsigned offset(std::size_t index) const;

    std::uint64_t get(BasisIndex basis, std::size_t index) const;
    BasisIndex set(BasisIndex basis, std::size_t index, std::uint64_t value) const;
    Real get_value(BasisIndex basis, std::size_t index) const;

  private:
    std::vector<Register> registers_;
    unsigned total_ = 0;
    unsigned max_qubits_;
};

/// Number of qubits needed to index `count` values (at least one).
unsigned qubits_for(std::size_t count);

}  // namespace qdcca
