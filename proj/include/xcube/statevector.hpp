#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "xcube/pauli.hpp"
#include "xcube/rng.hpp"
#include "xcube/tableau.hpp"

namespace xcube {

/// Dense complex statevector, capped at 20 qubits. Cross-validation
/// oracle for the tableau path; not used by the protocol itself.
///
/// Qubit 0 is the least-significant bit of the basis index. Measurement
/// consumes one rng draw exactly when the outcome is random (stabilizer
/// circuits only ever hit probabilities 0, 1/2, 1), so a statevector run
/// and a tableau run with the same seed see identical outcome streams.
class StateVector {
  public:
    static constexpr std::size_t kMaxQubits = 20;

    explicit StateVector(std::size_t n) : n_(n) {
        if (n == 0 || n > kMaxQubits) {
            throw std::invalid_argument(
                "statevector supports 1 to 20 qubits");
        }
        amps_.assign(std::size_t(1) << n, {0.0, 0.0});
        amps_[0] = {1.0, 0.0};
    }

    std::size_t num_qubits() const { return n_; }

    std::complex<double> amplitude(std::size_t basis_state) const {
        return amps_[basis_state];
    }

    void apply_h(std::size_t q) {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        std::size_t bit = std::size_t(1) << q;
        for (std::size_t s = 0; s < amps_.size(); s++) {
            if (s & bit) {
                continue;
            }
            auto a0 = amps_[s], a1 = amps_[s | bit];
            amps_[s] = (a0 + a1) * inv_sqrt2;
            amps_[s | bit] = (a0 - a1) * inv_sqrt2;
        }
    }
    void apply_x(std::size_t q) {
        std::size_t bit = std::size_t(1) << q;
        for (std::size_t s = 0; s < amps_.size(); s++) {
            if (!(s & bit)) {
                std::swap(amps_[s], amps_[s | bit]);
            }
        }
    }
    void apply_z(std::size_t q) {
        std::size_t bit = std::size_t(1) << q;
        for (std::size_t s = 0; s < amps_.size(); s++) {
            if (s & bit) {
                amps_[s] = -amps_[s];
            }
        }
    }
    void apply_cz(std::size_t a, std::size_t b) {
        std::size_t ma = std::size_t(1) << a, mb = std::size_t(1) << b;
        for (std::size_t s = 0; s < amps_.size(); s++) {
            if ((s & ma) && (s & mb)) {
                amps_[s] = -amps_[s];
            }
        }
    }
    void apply_cnot(std::size_t c, std::size_t t) {
        std::size_t mc = std::size_t(1) << c, mt = std::size_t(1) << t;
        for (std::size_t s = 0; s < amps_.size(); s++) {
            if ((s & mc) && !(s & mt)) {
                std::swap(amps_[s], amps_[s | mt]);
            }
        }
    }
    void apply_cz_multi(std::size_t control, std::span<const uint32_t> targets) {
        for (uint32_t t : targets) {
            apply_cz(control, t);
        }
    }

    Tableau::MeasureResult measure(std::size_t q, Basis basis, Rng &rng) {
        if (basis == Basis::X) {
            apply_h(q);
            auto r = measure_z(q, rng);
            apply_h(q);
            return r;
        }
        return measure_z(q, rng);
    }

    /// <psi|P|psi>. Exact up to floating-point roundoff; the imaginary
    /// part of a Hermitian expectation is discarded.
    double expectation(const PauliString &p) const {
        if (p.num_qubits() != n_) {
            throw std::invalid_argument("observable size mismatch");
        }
        std::size_t xmask = 0, zmask = 0, ymask = 0;
        for (std::size_t q = 0; q < n_; q++) {
            bool xb = p.x(q), zb = p.z(q);
            if (xb) {
                xmask |= std::size_t(1) << q;
            }
            if (zb) {
                zmask |= std::size_t(1) << q;
            }
            if (xb && zb) {
                ymask |= std::size_t(1) << q;
            }
        }
        // P|s> = i^e * prod_Y(i * (-1)^{s_q}) * prod_Z(-1)^{s_q} |s ^ xmask>
        // with Z factors taken over pure-Z sites (Y handled separately).
        static const std::complex<double> ipow[4] = {
            {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        std::complex<double> acc = 0.0;
        std::size_t pure_z = zmask & ~ymask;
        int base_exp = p.phase_exponent() + int(std::popcount(ymask));
        for (std::size_t s = 0; s < amps_.size(); s++) {
            int e = base_exp + 2 * (std::popcount(s & ymask) +
                                    std::popcount(s & pure_z));
            acc += std::conj(amps_[s ^ xmask]) * ipow[e & 3] * amps_[s];
        }
        return acc.real();
    }

  private:
    Tableau::MeasureResult measure_z(std::size_t q, Rng &rng) {
        std::size_t bit = std::size_t(1) << q;
        double p_plus = 0.0; // P(outcome +1), i.e. bit clear
        for (std::size_t s = 0; s < amps_.size(); s++) {
            if (!(s & bit)) {
                p_plus += std::norm(amps_[s]);
            }
        }
        constexpr double eps = 1e-9;
        int outcome;
        bool deterministic;
        if (p_plus > 1.0 - eps) {
            outcome = +1;
            deterministic = true;
        } else if (p_plus < eps) {
            outcome = -1;
            deterministic = true;
        } else {
            outcome = rng.fair_sign();
            deterministic = false;
        }
        double norm_sq = 0.0;
        for (std::size_t s = 0; s < amps_.size(); s++) {
            bool keep = ((s & bit) == 0) == (outcome > 0);
            if (!keep) {
                amps_[s] = 0.0;
            } else {
                norm_sq += std::norm(amps_[s]);
            }
        }
        double scale = 1.0 / std::sqrt(norm_sq);
        for (auto &a : amps_) {
            a *= scale;
        }
        return {outcome, deterministic};
    }

    std::size_t n_;
    std::vector<std::complex<double>> amps_;
};

} // namespace xcube
