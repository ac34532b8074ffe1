#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "xcube/bits.hpp"

namespace xcube {

/// Signed tensor product of I/X/Y/Z over n qubits.
///
/// Stored as two packed bit rows (x, z) plus a power of i. Bit patterns:
/// I=(0,0), X=(1,0), Z=(0,1), Y=(1,1), where Y is the Hermitian Pauli.
/// The public surface exposes only real signs (+1/-1); the internal phase
/// exponent tracks the full {1, i, -1, -i} group so intermediate products
/// are exact.
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(std::size_t n) : x_(n), z_(n), phase_exp_(0) {}

    static PauliString identity(std::size_t n) { return PauliString(n); }

    static PauliString single(std::size_t n, std::size_t q, char pauli,
                              bool negative = false) {
        PauliString p(n);
        switch (pauli) {
        case 'X':
            p.x_.set(q, true);
            break;
        case 'Y':
            p.x_.set(q, true);
            p.z_.set(q, true);
            break;
        case 'Z':
            p.z_.set(q, true);
            break;
        default:
            throw std::invalid_argument("pauli must be one of X, Y, Z");
        }
        if (negative) {
            p.negate();
        }
        return p;
    }

    std::size_t num_qubits() const { return x_.size(); }

    bool x(std::size_t q) const { return x_.get(q); }
    bool z(std::size_t q) const { return z_.get(q); }
    void set_x(std::size_t q, bool v) { x_.set(q, v); }
    void set_z(std::size_t q, bool v) { z_.set(q, v); }

    const BitRow &x_bits() const { return x_; }
    const BitRow &z_bits() const { return z_; }
    BitRow &x_bits() { return x_; }
    BitRow &z_bits() { return z_; }

    uint8_t phase_exponent() const { return phase_exp_; }
    bool has_real_phase() const { return (phase_exp_ & 1) == 0; }

    /// +1 or -1. Only valid when the phase is real.
    int sign() const {
        assert(has_real_phase());
        return phase_exp_ == 0 ? +1 : -1;
    }
    void negate() { phase_exp_ = (phase_exp_ + 2) & 3; }
    void clear_phase() { phase_exp_ = 0; }

    /// Symplectic form: commute iff |x1&z2| + |z1&x2| is even.
    bool commutes_with(const PauliString &o) const {
        return x_.parity_and(o.z_) == z_.parity_and(o.x_);
    }

    std::size_t weight() const {
        std::size_t w = 0;
        for (std::size_t k = 0; k < x_.words().size(); k++) {
            w += std::popcount(x_.words()[k] | z_.words()[k]);
        }
        return w;
    }

    /// In-place matrix product: *this = (*this) * rhs, with exact i-power
    /// tracking. Per qubit the cyclic products XY=iZ, YZ=iX, ZX=iY pick up
    /// +i and their reverses -i; everything else is phase-free.
    PauliString &operator*=(const PauliString &rhs) {
        assert(num_qubits() == rhs.num_qubits());
        int exp = phase_exp_ + rhs.phase_exp_;
        auto lx = x_.words(), lz = z_.words();
        auto rx = rhs.x_.words(), rz = rhs.z_.words();
        for (std::size_t k = 0; k < lx.size(); k++) {
            uint64_t x1 = lx[k], z1 = lz[k], x2 = rx[k], z2 = rz[k];
            uint64_t plus = (x1 & ~z1 & x2 & z2)    // X*Y
                            | (x1 & z1 & ~x2 & z2)  // Y*Z
                            | (~x1 & z1 & x2 & ~z2);// Z*X
            uint64_t minus = (x1 & z1 & x2 & ~z2)   // Y*X
                             | (~x1 & z1 & x2 & z2) // Z*Y
                             | (x1 & ~z1 & ~x2 & z2);// X*Z
            exp += std::popcount(plus);
            exp += 3 * std::popcount(minus);
            lx[k] ^= x2;
            lz[k] ^= z2;
        }
        phase_exp_ = uint8_t(exp & 3);
        return *this;
    }

    friend PauliString operator*(PauliString lhs, const PauliString &rhs) {
        lhs *= rhs;
        return lhs;
    }

    bool operator==(const PauliString &o) const = default;

    /// Same tensor factors, phase ignored.
    bool same_paulis(const PauliString &o) const {
        return x_ == o.x_ && z_ == o.z_;
    }

    /// "+XIZY" style rendering.
    std::string str() const {
        std::string s;
        switch (phase_exp_) {
        case 0: s = "+"; break;
        case 1: s = "+i"; break;
        case 2: s = "-"; break;
        case 3: s = "-i"; break;
        }
        for (std::size_t q = 0; q < num_qubits(); q++) {
            bool xb = x_.get(q), zb = z_.get(q);
            s += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
        }
        return s;
    }

  private:
    BitRow x_, z_;
    uint8_t phase_exp_ = 0; // power of i, mod 4
};

// Clifford conjugation rules, applied directly to a Pauli string
// (P -> U P U^dag). The tableau applies these row-wise; tests check each
// rule against dense matrices.

inline void conjugate_h(PauliString &p, std::size_t q) {
    bool xb = p.x(q), zb = p.z(q);
    if (xb && zb) {
        p.negate(); // HYH = -Y
    }
    p.set_x(q, zb);
    p.set_z(q, xb);
}

inline void conjugate_x(PauliString &p, std::size_t q) {
    if (p.z(q)) {
        p.negate();
    }
}

inline void conjugate_z(PauliString &p, std::size_t q) {
    if (p.x(q)) {
        p.negate();
    }
}

inline void conjugate_cz(PauliString &p, std::size_t a, std::size_t b) {
    assert(a != b);
    bool xa = p.x(a), za = p.z(a), xb = p.x(b), zb = p.z(b);
    if (xa && xb && (za ^ zb)) {
        p.negate(); // CZ (X⊗Y) CZ = -Y⊗X and symmetric
    }
    p.set_z(a, za ^ xb);
    p.set_z(b, zb ^ xa);
}

inline void conjugate_cnot(PauliString &p, std::size_t c, std::size_t t) {
    assert(c != t);
    bool xc = p.x(c), zc = p.z(c), xt = p.x(t), zt = p.z(t);
    if (xc && zt && !(xt ^ zc)) {
        p.negate();
    }
    p.set_x(t, xt ^ xc);
    p.set_z(c, zc ^ zt);
}

} // namespace xcube
