#include "qdcca/quantum_state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace qdcca {

unsigned qubits_for(std::size_t count) {
    unsigned bits = 1;
    while ((std::size_t{1} << bits) < count) {
        ++bits;
    }
    return bits;
}

std::size_t RegisterLayout::add(std::string name, unsigned width) {
    if (width == 0) {
        throw std::invalid_argument("register '" + name + "' must have at least one qubit");
    }
    for (const auto &r : registers_) {
        if (r.name == name) {
            throw std::invalid_argument("duplicate register '" + name + "'");
        }
    }
    if (total_ + width > max_qubits_) {
        throw std::length_error("layout needs " + std::to_string(total_ + width) + " qubits but the cap is " +
                                std::to_string(max_qubits_));
    }
    registers_.push_back(Register{std::move(name), width, std::nullopt});
    total_ += width;
    return registers_.size() - 1;
}

std::size_t RegisterLayout::add_fixed(std::string name, FixedPointFormat format) {
    const auto idx = add(std::move(name), format.width());
    registers_[idx].format = format;
    return idx;
}

std::size_t RegisterLayout::index_of(const std::string &name) const {
    for (std::size_t i = 0; i < registers_.size(); ++i) {
        if (registers_[i].name == name) {
            return i;
        }
    }
    throw std::out_of_range("no register named '" + name + "'");
}

unsigned RegisterLayout::offset(std::size_t index) const {
    unsigned below = 0;
    for (std::size_t i = index + 1; i < registers_.size(); ++i) {
        below += registers_[i].width;
    }
    return below;
}

std::uint64_t RegisterLayout::get(BasisIndex basis, std::size_t index) const {
    const auto &r = registers_.at(index);
    const BasisIndex mask = (BasisIndex{1} << r.width) - 1;
    return static_cast<std::uint64_t>((basis >> offset(index)) & mask);
}

BasisIndex RegisterLayout::set(BasisIndex basis, std::size_t index, std::uint64_t value) const {
    const auto &r = registers_.at(index);
    const BasisIndex mask = (BasisIndex{1} << r.width) - 1;
    const auto shift = offset(index);
    return (basis & ~(mask << shift)) | ((BasisIndex{value} & mask) << shift);
}

Real RegisterLayout::get_value(BasisIndex basis, std::size_t index) const {
    const auto &r = registers_.at(index);
    if (!r.format) {
        return static_cast<Real>(get(basis, index));
    }
    return r.format->decode(get(basis, index));
}

QuantumState::QuantumState(RegisterLayout layout) : layout_(std::move(layout)) { amps_[0] = 1.0; }

QuantumState::QuantumState(RegisterLayout layout, Amplitudes amplitudes)
    : layout_(std::move(layout)), amps_(std::move(amplitudes)) {}

Complex QuantumState::amplitude(BasisIndex basis) const {
    auto it = amps_.find(basis);
    return it == amps_.end() ? Complex{0.0} : it->second;
}

Real QuantumState::norm() const {
    Real total = 0;
    for (const auto &[b, a] : amps_) {
        total += std::norm(a);
    }
    return std::sqrt(total);
}

Real QuantumState::probability(const BasisPredicate &predicate) const {
    Real total = 0;
    for (const auto &[b, a] : amps_) {
        if (predicate(b)) {
            total += std::norm(a);
        }
    }
    return total;
}

Complex QuantumState::inner(const QuantumState &other) const {
    Complex total = 0;
    const auto &small = amps_.size() <= other.amps_.size() ? amps_ : other.amps_;
    const bool this_small = &small == &amps_;
    for (const auto &[b, a] : small) {
        const Complex o = this_small ? other.amplitude(b) : amplitude(b);
        total += this_small ? std::conj(a) * o : std::conj(o) * a;
    }
    return total;
}

namespace {

struct IndexHash {
    std::size_t operator()(BasisIndex b) const {
        return std::hash<std::uint64_t>()(static_cast<std::uint64_t>(b)) ^
               (std::hash<std::uint64_t>()(static_cast<std::uint64_t>(b >> 64)) * 0x9e3779b97f4a7c15ULL);
    }
};

}  // namespace

void QuantumState::prepare_uniform(std::size_t reg, std::size_t count) {
    const auto &r = layout_.reg(reg);
    if (count == 0 || count > (std::size_t{1} << r.width)) {
        throw std::invalid_argument("register '" + r.name + "' cannot hold a uniform state over " +
                                    std::to_string(count) + " values");
    }
    if (count == 1) {
        return;
    }
    // Householder reflection exchanging |0> with the ranged uniform state; it is its own inverse.
    const Real root = std::sqrt(static_cast<Real>(count));
    const Real w0 = 1.0 - 1.0 / root;
    const Real wv = -1.0 / root;
    const Real ww = 2.0 - 2.0 / root;
    std::unordered_map<BasisIndex, std::vector<std::pair<std::uint64_t, Complex>>, IndexHash> groups;
    for (const auto &[b, a] : amps_) {
        groups[layout_.set(b, reg, 0)].emplace_back(layout_.get(b, reg), a);
    }
    Amplitudes next;
    for (auto &[base, entries] : groups) {
        Complex dot = 0;
        for (const auto &[v, a] : entries) {
            if (v < count) {
                dot += (v == 0 ? w0 : wv) * a;
            }
        }
        for (const auto &[v, a] : entries) {
            if (v >= count) {
                next[layout_.set(base, reg, v)] += a;
            }
        }
        const Complex coef = 2.0 * dot / ww;
        std::vector<Complex> block(count, 0.0);
        for (const auto &[v, a] : entries) {
            if (v < count) {
                block[v] = a;
            }
        }
        for (std::size_t v = 0; v < count; ++v) {
            const Complex value = block[v] - coef * (v == 0 ? w0 : wv);
            if (value != Complex{0.0}) {
                next[layout_.set(base, reg, v)] += value;
            }
        }
    }
    amps_ = std::move(next);
    prune(1e-300);
}

void QuantumState::unprepare_uniform(std::size_t reg, std::size_t count) { prepare_uniform(reg, count); }

void QuantumState::apply_permutation(const BasisMap &map, const BasisPredicate &control) {
    Amplitudes next;
    for (const auto &[b, a] : amps_) {
        const BasisIndex target = (!control || control(b)) ? map(b) : b;
        auto [it, inserted] = next.emplace(target, a);
        if (!inserted) {
            throw std::logic_error("basis map is not injective on the state's support");
        }
    }
    amps_ = std::move(next);
}

void QuantumState::apply_qubit_operator(std::size_t reg, unsigned bit,
                                        const std::function<Eigen::Matrix2cd(BasisIndex)> &op,
                                        const BasisPredicate &control) {
    const auto &r = layout_.reg(reg);
    if (bit >= r.width) {
        throw std::out_of_range("bit " + std::to_string(bit) + " outside register '" + r.name + "'");
    }
    const BasisIndex mask = BasisIndex{1} << (layout_.offset(reg) + bit);
    Amplitudes next;
    for (const auto &[b, a] : amps_) {
        if (control && !control(b)) {
            next[b] += a;
            continue;
        }
        const BasisIndex b0 = b & ~mask;
        const BasisIndex b1 = b | mask;
        const int in = (b & mask) ? 1 : 0;
        const Eigen::Matrix2cd u = op(b0);
        next[b0] += u(0, in) * a;
        next[b1] += u(1, in) * a;
    }
    amps_ = std::move(next);
    prune(1e-300);
}

void QuantumState::apply_qubit_gate(std::size_t reg, unsigned bit, const Eigen::Matrix2cd &gate,
                                    const BasisPredicate &control) {
    apply_qubit_operator(reg, bit, [&gate](BasisIndex) { return gate; }, control);
}

void QuantumState::phase_flip(const BasisPredicate &predicate, Complex phase) {
    for (auto &[b, a] : amps_) {
        if (predicate(b)) {
            a *= phase;
        }
    }
}

void QuantumState::scale(Complex factor) {
    for (auto &[b, a] : amps_) {
        a *= factor;
    }
}

void QuantumState::axpy(Complex factor, const QuantumState &other) {
    for (const auto &[b, a] : other.amps_) {
        amps_[b] += factor * a;
    }
    prune(1e-300);
}

void QuantumState::project(const BasisPredicate &keep) {
    for (auto it = amps_.begin(); it != amps_.end();) {
        it = keep(it->first) ? std::next(it) : amps_.erase(it);
    }
}

void QuantumState::normalize() {
    const Real n = norm();
    if (n == 0) {
        throw std::domain_error("cannot normalize the zero vector");
    }
    scale(1.0 / n);
}

void QuantumState::prune(Real tolerance) {
    for (auto it = amps_.begin(); it != amps_.end();) {
        it = std::abs(it->second) <= tolerance ? amps_.erase(it) : std::next(it);
    }
}

CVector QuantumState::to_dense(const std::vector<std::size_t> &regs, Real tolerance) const {
    std::size_t dim = 1;
    for (auto r : regs) {
        dim <<= layout_.reg(r).width;
    }
    CVector out = CVector::Zero(static_cast<Eigen::Index>(dim));
    for (const auto &[b, a] : amps_) {
        BasisIndex rest = b;
        std::size_t index = 0;
        for (auto r : regs) {
            index = (index << layout_.reg(r).width) | layout_.get(b, r);
            rest = layout_.set(rest, r, 0);
        }
        if (rest != 0) {
            if (std::abs(a) > tolerance) {
                throw std::logic_error("state has amplitude outside the requested registers");
            }
            continue;
        }
        out(static_cast<Eigen::Index>(index)) += a;
    }
    return out;
}

Eigen::Matrix2cd hadamard() {
    const Real s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd h;
    h << s, s, s, -s;
    return h;
}

}  // namespace qdcca
