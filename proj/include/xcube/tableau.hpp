#pragma once

#include <cassert>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xcube/pauli.hpp"
#include "xcube/rng.hpp"

namespace xcube {

enum class Basis : uint8_t { X, Z };

/// Stabilizer state of n qubits as 2n signed generator rows: n
/// destabilizers followed by n stabilizers, with destabilizer i the
/// symplectic partner of stabilizer i. Destabilizer signs carry no
/// information and are kept normalized to +.
///
/// Measurement and expectation work for arbitrary Pauli observables, not
/// just single-qubit ones; the multi-qubit case drives the stabilizer
/// verification throughout.
class Tableau {
  public:
    struct MeasureResult {
        int outcome;        // +1 or -1
        bool deterministic; // true iff the observable was in the group
    };

    /// |+...+>: stabilizers X_i, destabilizers Z_i.
    static Tableau plus_state(std::size_t n) {
        Tableau t(n);
        for (std::size_t i = 0; i < n; i++) {
            t.destab_[i] = PauliString::single(n, i, 'Z');
            t.stab_[i] = PauliString::single(n, i, 'X');
        }
        return t;
    }

    /// |0...0>: stabilizers Z_i, destabilizers X_i.
    static Tableau zero_state(std::size_t n) {
        Tableau t(n);
        for (std::size_t i = 0; i < n; i++) {
            t.destab_[i] = PauliString::single(n, i, 'X');
            t.stab_[i] = PauliString::single(n, i, 'Z');
        }
        return t;
    }

    std::size_t num_qubits() const { return n_; }

    const PauliString &stabilizer(std::size_t i) const { return stab_[i]; }
    const PauliString &destabilizer(std::size_t i) const { return destab_[i]; }

    void apply_h(std::size_t q) {
        check_qubit(q);
        for_each_row([q](PauliString &p) { conjugate_h(p, q); });
    }
    void apply_x(std::size_t q) {
        check_qubit(q);
        for_each_row([q](PauliString &p) { conjugate_x(p, q); });
    }
    void apply_z(std::size_t q) {
        check_qubit(q);
        for_each_row([q](PauliString &p) { conjugate_z(p, q); });
    }
    void apply_cz(std::size_t a, std::size_t b) {
        check_qubit(a);
        check_qubit(b);
        if (a == b) {
            throw std::invalid_argument("CZ operands must be distinct");
        }
        for_each_row([a, b](PauliString &p) { conjugate_cz(p, a, b); });
    }
    void apply_cnot(std::size_t c, std::size_t t) {
        check_qubit(c);
        check_qubit(t);
        if (c == t) {
            throw std::invalid_argument("CNOT operands must be distinct");
        }
        for_each_row([c, t](PauliString &p) { conjugate_cnot(p, c, t); });
    }
    /// Multi-target CZ: identical to pairwise CZs from the control.
    void apply_cz_multi(std::size_t control, std::span<const uint32_t> targets) {
        for (uint32_t t : targets) {
            apply_cz(control, t);
        }
    }

    /// Measures the observable p (real sign required). Collapses the state
    /// when the outcome is random; the random result is a fair draw.
    MeasureResult measure_pauli(const PauliString &p, Rng &rng) {
        check_observable(p);
        std::size_t pivot = n_;
        for (std::size_t i = 0; i < n_; i++) {
            if (!stab_[i].commutes_with(p)) {
                pivot = i;
                break;
            }
        }
        if (pivot == n_) {
            return MeasureResult{deterministic_value(p), true};
        }
        // Random outcome: multiply every other anticommuting row into the
        // pivot's span, then replace the pivot pair.
        for (std::size_t i = 0; i < n_; i++) {
            if (i != pivot && !stab_[i].commutes_with(p)) {
                stab_[i] = stab_[pivot] * stab_[i];
            }
            if (!destab_[i].commutes_with(p)) {
                destab_[i] = stab_[pivot] * destab_[i];
                destab_[i].clear_phase();
            }
        }
        destab_[pivot] = stab_[pivot];
        destab_[pivot].clear_phase();
        int outcome = rng.fair_sign();
        stab_[pivot] = p;
        if (outcome < 0) {
            stab_[pivot].negate();
        }
        return MeasureResult{outcome, false};
    }

    MeasureResult measure(std::size_t q, Basis basis, Rng &rng) {
        check_qubit(q);
        return measure_pauli(
            PauliString::single(n_, q, basis == Basis::X ? 'X' : 'Z'), rng);
    }

    /// +1 or -1 when ±p is a product of stabilizer rows, 0 when p
    /// anticommutes with some stabilizer. Read-only.
    int expectation(const PauliString &p) const {
        check_observable(p);
        for (std::size_t i = 0; i < n_; i++) {
            if (!stab_[i].commutes_with(p)) {
                return 0;
            }
        }
        return deterministic_value(p);
    }

    /// Unique generator set for the stabilizer group: GF(2) row-reduced
    /// echelon form over columns (x_0..x_{n-1}, z_0..z_{n-1}), signs
    /// carried through the row products. Two tableaus describe the same
    /// state iff these lists match exactly.
    std::vector<PauliString> canonical_stabilizers() const {
        std::vector<PauliString> rows = stab_;
        reduce_rows(rows, 0, n_);
        return rows;
    }

    /// One-line-per-generator rendering of canonical_stabilizers(); handy
    /// for byte-exact state comparison.
    std::string canonical_form() const {
        std::string s;
        for (const auto &g : canonical_stabilizers()) {
            s += g.str();
            s += '\n';
        }
        return s;
    }

    /// Canonical generators of the subgroup supported entirely on qubits
    /// [0, prefix). Reduction runs over the complement's columns first, so
    /// the trailing rows are exactly the prefix-supported subgroup.
    std::vector<PauliString> canonical_stabilizers_on_prefix(
        std::size_t prefix) const {
        assert(prefix <= n_);
        std::vector<PauliString> rows = stab_;
        reduce_rows(rows, prefix, n_); // eliminate ancilla block first
        std::vector<PauliString> kept;
        for (const auto &r : rows) {
            bool outside = false;
            for (std::size_t q = prefix; q < n_ && !outside; q++) {
                outside = r.x(q) || r.z(q);
            }
            if (!outside) {
                kept.push_back(r);
            }
        }
        reduce_rows(kept, 0, prefix);
        return kept;
    }

    /// Structural health check used by property tests: stabilizers pairwise
    /// commute, destabilizer i anticommutes exactly with stabilizer i, and
    /// the 2n x 2n symplectic matrix has full rank.
    bool invariants_hold() const;

  private:
    explicit Tableau(std::size_t n)
        : n_(n), destab_(n, PauliString(n)), stab_(n, PauliString(n)) {}

    void check_qubit(std::size_t q) const {
        if (q >= n_) {
            throw std::invalid_argument("qubit index out of range");
        }
    }
    void check_observable(const PauliString &p) const {
        if (p.num_qubits() != n_) {
            throw std::invalid_argument("observable size mismatch");
        }
        if (!p.has_real_phase()) {
            throw std::invalid_argument("observable must have a real sign");
        }
    }

    template <typename F> void for_each_row(F &&f) {
        for (auto &p : destab_) {
            f(p);
        }
        for (auto &p : stab_) {
            f(p);
        }
    }

    // Value of p when p commutes with the whole group: the destabilizers
    // are the dual basis, so row i enters the product iff destab_i
    // anticommutes with p. This is the GF(2)-elimination-with-signs read
    // of "is ±p in the group", in O(n) row products.
    int deterministic_value(const PauliString &p) const {
        PauliString acc = PauliString::identity(n_);
        for (std::size_t i = 0; i < n_; i++) {
            if (!destab_[i].commutes_with(p)) {
                acc *= stab_[i];
            }
        }
        assert(acc.same_paulis(p));
        assert(acc.has_real_phase());
        return acc.phase_exponent() == p.phase_exponent() ? +1 : -1;
    }

    // RREF over pivot columns x_{col_begin}..x_{col_end-1}, then the
    // matching z columns, then (when col_begin > 0) the same for the
    // leading qubit block. Eliminating a trailing block first is what
    // lets canonical_stabilizers_on_prefix peel off the subgroup.
    static void reduce_rows(std::vector<PauliString> &rows,
                            std::size_t col_begin, std::size_t col_end) {
        if (rows.empty()) {
            return;
        }
        std::size_t r = 0;
        auto run_block = [&](std::size_t b, std::size_t e) {
            for (int kind = 0; kind < 2; kind++) {
                for (std::size_t q = b; q < e; q++) {
                    std::size_t p = r;
                    auto bit = [&](const PauliString &row) {
                        return kind == 0 ? row.x(q) : row.z(q);
                    };
                    while (p < rows.size() && !bit(rows[p])) {
                        p++;
                    }
                    if (p == rows.size()) {
                        continue;
                    }
                    std::swap(rows[r], rows[p]);
                    for (std::size_t j = 0; j < rows.size(); j++) {
                        if (j != r && bit(rows[j])) {
                            rows[j] = rows[r] * rows[j];
                        }
                    }
                    if (++r == rows.size()) {
                        return;
                    }
                }
            }
        };
        run_block(col_begin, col_end);
        if (col_begin > 0) {
            run_block(0, col_begin);
        }
    }

    std::size_t n_;
    std::vector<PauliString> destab_, stab_;
};

inline bool Tableau::invariants_hold() const {
    for (std::size_t i = 0; i < n_; i++) {
        for (std::size_t j = i + 1; j < n_; j++) {
            if (!stab_[i].commutes_with(stab_[j])) {
                return false;
            }
            if (!destab_[i].commutes_with(destab_[j])) {
                return false;
            }
        }
        for (std::size_t j = 0; j < n_; j++) {
            bool want_anti = (i == j);
            if (destab_[i].commutes_with(stab_[j]) == want_anti) {
                return false;
            }
        }
        if (!stab_[i].has_real_phase()) {
            return false;
        }
    }
    // Full-rank check over GF(2): destab/stab pairing above already forces
    // independence, but verify the 2n x 2n matrix outright.
    std::vector<BitRow> m;
    m.reserve(2 * n_);
    auto vec = [&](const PauliString &p) {
        BitRow v(2 * n_);
        for (std::size_t q = 0; q < n_; q++) {
            v.set(q, p.x(q));
            v.set(n_ + q, p.z(q));
        }
        return v;
    };
    for (const auto &p : destab_) {
        m.push_back(vec(p));
    }
    for (const auto &p : stab_) {
        m.push_back(vec(p));
    }
    std::size_t rank = 0;
    for (std::size_t c = 0; c < 2 * n_ && rank < m.size(); c++) {
        std::size_t p = rank;
        while (p < m.size() && !m[p].get(c)) {
            p++;
        }
        if (p == m.size()) {
            continue;
        }
        std::swap(m[rank], m[p]);
        for (std::size_t j = 0; j < m.size(); j++) {
            if (j != rank && m[j].get(c)) {
                m[j] ^= m[rank];
            }
        }
        rank++;
    }
    return rank == 2 * n_;
}

} // namespace xcube
