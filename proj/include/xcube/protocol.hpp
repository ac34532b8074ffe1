#pragma once

#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "xcube/gf2.hpp"
#include "xcube/lattice.hpp"
#include "xcube/rng.hpp"
#include "xcube/scheduler.hpp"
#include "xcube/tableau.hpp"

namespace xcube {

struct InconsistentRecordError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operator builders over the combined register (code qubits first,
// ancillae after). All supports are mod-2 reduced, so doubled adjacency
// entries on self-wrapped fixtures cancel exactly as the gates do.

/// X_c times Z on the ancillae around code qubit c.
inline PauliString cluster_op_code(const Lattice &l, std::size_t c) {
    PauliString p(l.total_qubits());
    p.set_x(c, true);
    l.code_cube_support(c).for_each_set(
        [&](std::size_t a) { p.set_z(l.ancilla_qubit(a), true); });
    return p;
}

/// X_a times Z on the code qubits of cube a.
inline PauliString cluster_op_ancilla(const Lattice &l, std::size_t a) {
    PauliString p(l.total_qubits());
    p.set_x(l.ancilla_qubit(a), true);
    l.cube_support(a).for_each_set(
        [&](std::size_t c) { p.set_z(c, true); });
    return p;
}

/// The 12-body (mod-2) cube stabilizer: Z over the edges of cube a.
inline PauliString cube_op(const Lattice &l, std::size_t a) {
    PauliString p(l.total_qubits());
    l.cube_support(a).for_each_set([&](std::size_t c) { p.set_z(c, true); });
    return p;
}

/// The 4-body planar star stabilizer: X over the member edges.
inline PauliString star_op(const Lattice &l, std::size_t s) {
    PauliString p(l.total_qubits());
    l.star_support(s).for_each_set([&](std::size_t c) { p.set_x(c, true); });
    return p;
}

/// X over the ancillae around code qubit c: the measurable parity-check
/// combination of the ancilla-centered cluster operators (their Z parts
/// cancel pairwise around any edge).
inline PauliString ancilla_parity_op(const Lattice &l, std::size_t c) {
    PauliString p(l.total_qubits());
    l.code_cube_support(c).for_each_set(
        [&](std::size_t a) { p.set_x(l.ancilla_qubit(a), true); });
    return p;
}

/// Prepares the cluster state: |+> everywhere, then the scheduled CZ
/// layers. Both strategies land on the identical state.
inline Tableau prepare_cluster(const Lattice &lattice, Strategy strategy) {
    Schedule s = strategy == Strategy::Movement12 ? movement_schedule(lattice)
                                                  : cz12_schedule(lattice);
    Tableau t = Tableau::plus_state(lattice.total_qubits());
    for (const auto &round : s.rounds) {
        for (const auto &g : round.groups) {
            t.apply_cz_multi(lattice.ancilla_qubit(g.ancilla), g.code);
        }
    }
    return t;
}

/// X-basis ancilla outcomes in canonical (ascending index) order. The
/// final corrected state does not depend on this order, but the raw
/// outcomes do, which is why it is pinned.
struct MeasurementRecord {
    std::vector<int> outcomes; // per ancilla index, +1 / -1
    uint64_t seed = 0;

    nlohmann::json to_json() const { return outcomes; }
};

inline MeasurementRecord measure_ancillae(Tableau &t, const Lattice &lattice,
                                          Rng &rng) {
    MeasurementRecord rec;
    rec.outcomes.reserve(lattice.ancilla_count());
    for (std::size_t a = 0; a < lattice.ancilla_count(); a++) {
        rec.outcomes.push_back(
            t.measure(lattice.ancilla_qubit(a), Basis::X, rng).outcome);
    }
    return rec;
}

/// The X layer that converts the measured state into the all-(+1) cube
/// eigenstate. Kept either way: applied as gates, or carried as a Pauli
/// frame and folded into expectation reads.
struct CorrectionFrame {
    BitRow x_support; // over code qubits

    PauliString as_pauli(const Lattice &l) const {
        PauliString p(l.total_qubits());
        x_support.for_each_set([&](std::size_t c) { p.set_x(c, true); });
        return p;
    }

    nlohmann::json to_json() const { return x_support.set_bits(); }
};

/// Solves cube_incidence * x = b over GF(2), where b marks the ancillae
/// that reported -1. Any solution works: solutions differ by operators
/// that flip no cube. Throws InconsistentRecordError when the record
/// violates the parity constraints, which signals an ancilla measurement
/// error.
inline CorrectionFrame solve_correction(const Lattice &lattice,
                                        const MeasurementRecord &record) {
    if (record.outcomes.size() != lattice.ancilla_count()) {
        throw std::invalid_argument("record size mismatch");
    }
    BitRow b(lattice.ancilla_count());
    for (std::size_t a = 0; a < lattice.ancilla_count(); a++) {
        b.set(a, record.outcomes[a] < 0);
    }
    auto x = lattice.cube_incidence().solve(b);
    if (!x) {
        throw InconsistentRecordError(
            "measurement record violates constraints: no X layer flips "
            "exactly the -1 cubes (ancilla measurement error)");
    }
    return CorrectionFrame{std::move(*x)};
}

inline void apply_correction(Tableau &t, const CorrectionFrame &frame) {
    frame.x_support.for_each_set([&](std::size_t c) { t.apply_x(c); });
}

/// Expectation with an optional pending Pauli frame folded in: the frame
/// flips the value exactly when it anticommutes with the observable.
inline int framed_expectation(const Tableau &t, const PauliString &p,
                              const PauliString *frame) {
    int v = t.expectation(p);
    if (v != 0 && frame && !frame->commutes_with(p)) {
        v = -v;
    }
    return v;
}

/// Eigenvalues of every cube operator and every defined star operator.
/// Undefined boundary stars are listed as skipped, never silently
/// dropped.
struct StabilizerReport {
    std::vector<int> cube_eigenvalues; // per ancilla index
    std::vector<int> star_eigenvalues; // per defined star index
    std::vector<StarSite> skipped_stars;
    bool all_plus = false;

    nlohmann::json to_json(const Lattice &l) const {
        nlohmann::json j;
        j["cube_eigenvalues"] = cube_eigenvalues;
        auto &stars = j["star_eigenvalues"] = nlohmann::json::array();
        for (std::size_t s = 0; s < star_eigenvalues.size(); s++) {
            auto e = star_site_to_json(l.star_site(s));
            e["value"] = star_eigenvalues[s];
            stars.push_back(std::move(e));
        }
        auto &skipped = j["skipped_stars"] = nlohmann::json::array();
        for (const auto &s : skipped_stars) {
            skipped.push_back(star_site_to_json(s));
        }
        j["all_plus"] = all_plus;
        return j;
    }
};

inline StabilizerReport verify_xcube(const Tableau &t, const Lattice &lattice,
                                     const PauliString *frame = nullptr) {
    StabilizerReport r;
    r.all_plus = true;
    for (std::size_t a = 0; a < lattice.ancilla_count(); a++) {
        int v = framed_expectation(t, cube_op(lattice, a), frame);
        r.cube_eigenvalues.push_back(v);
        r.all_plus &= v == +1;
    }
    for (std::size_t s = 0; s < lattice.star_count(); s++) {
        int v = framed_expectation(t, star_op(lattice, s), frame);
        r.star_eigenvalues.push_back(v);
        r.all_plus &= v == +1;
    }
    r.skipped_stars = lattice.undefined_stars();
    return r;
}

/// log2 of the ground-space degeneracy: code qubit count minus the GF(2)
/// rank of the independent star+cube generator set, via symplectic
/// elimination over (x|z) columns.
inline int ground_space_dimension(const Lattice &lattice) {
    if (!lattice.periodic()) {
        throw std::invalid_argument(
            "ground space dimension is defined for periodic lattices");
    }
    std::size_t n = lattice.code_count();
    Gf2Matrix m(lattice.star_count() + lattice.ancilla_count(), 2 * n);
    for (std::size_t s = 0; s < lattice.star_count(); s++) {
        lattice.star_support(s).for_each_set(
            [&](std::size_t c) { m.set(s, c, true); });
    }
    for (std::size_t a = 0; a < lattice.ancilla_count(); a++) {
        lattice.cube_support(a).for_each_set([&](std::size_t c) {
            m.set(lattice.star_count() + a, n + c, true);
        });
    }
    return int(n) - int(m.rank());
}

} // namespace xcube
