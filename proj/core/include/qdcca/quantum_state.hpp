#pragma once

#include <cstddef>
#include <functional>
#include <map>

#include "qdcca/linalg.hpp"
#include "qdcca/register_layout.hpp"

namespace qdcca {

using BasisPredicate = std::function<bool(BasisIndex)>;
using BasisMap = std::function<BasisIndex(BasisIndex)>;

/// Pure state over a register layout. Amplitudes are stored on their support
/// only; every operation is an exact linear map on that support.
class QuantumState {
  public:
    using Amplitudes = std::map<BasisIndex, Complex>;

    explicit QuantumState(RegisterLayout layout);
    QuantumState(RegisterLayout layout, Amplitudes amplitudes);

    const RegisterLayout &layout() const { return layout_; }
    const Amplitudes &amplitudes() const { return amps_; }
    Complex amplitude(BasisIndex basis) const;
    std::size_t support_size() const { return amps_.size(); }

    Real norm() const;
    Real probability(const BasisPredicate &predicate) const;
    Complex inner(const QuantumState &other) const;  // <this|other>

    /// Register must hold 0 on every branch; afterwards it is uniform over [0, count).
    void prepare_uniform(std::size_t reg, std::size_t count);
    void unprepare_uniform(std::size_t reg, std::size_t count);

    /// Applies a bijection of basis states (optionally only where control holds).
    void apply_permutation(const BasisMap &map, const BasisPredicate &control = {});

    /// 2x2 unitary on one bit of a register, chosen per basis state of the other registers.
    void apply_qubit_operator(std::size_t reg, unsigned bit,
                              const std::function<Eigen::Matrix2cd(BasisIndex)> &op,
                              const BasisPredicate &control = {});
    void apply_qubit_gate(std::size_t reg, unsigned bit, const Eigen::Matrix2cd &gate,
                          const BasisPredicate &control = {});

    void phase_flip(const BasisPredicate &predicate, Complex phase = -1.0);
    void scale(Complex factor);
    void axpy(Complex factor, const QuantumState &other);  // this += factor * other
    void project(const BasisPredicate &keep);
    void normalize();
    void prune(Real tolerance = 0.0);

    /// Dense vector over the given registers; all other registers must be |0>.
    CVector to_dense(const std::vector<std::size_t> &regs, Real tolerance = 1e-12) const;

  private:
    RegisterLayout layout_;
    Amplitudes amps_;
};

Eigen::Matrix2cd hadamard();

}  // namespace qdcca
