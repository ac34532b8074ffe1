#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "xcube/circuit.hpp"
#include "xcube/lattice.hpp"

namespace xcube {

struct ColoringError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Strategy : uint8_t { Movement12, CZ12Colored };
enum class CircuitForm : uint8_t { CZ, DynamicCNOT };

inline const char *strategy_name(Strategy s) {
    return s == Strategy::Movement12 ? "movement" : "cz12";
}
inline const char *form_name(CircuitForm f) {
    return f == CircuitForm::CZ ? "cz" : "dynamic-cnot";
}

/// One ancilla's gates within a round: movement rounds carry a single
/// code qubit per group, CZ12 rounds the cube's full (mod-2 reduced)
/// target list.
struct GateGroup {
    uint32_t ancilla;
    std::vector<uint32_t> code;
    bool operator==(const GateGroup &) const = default;
};

struct ScheduleRound {
    std::vector<GateGroup> groups;
    // Conflict certificate: which canonical neighbor slot (movement) or
    // parity color class (cz12) this round realizes.
    int movement_slot = -1;
    std::array<int, 3> color = {-1, -1, -1};
};

/// Gate rounds covering every (ancilla, adjacent code qubit) pair.
/// Movement covers the adjacency multiset exactly once per pair; CZ12
/// covers each cube's mod-2 support in a single group (identical to the
/// multiset except on self-wrapped fixtures, where doubled pairs cancel).
struct Schedule {
    Strategy strategy;
    std::vector<ScheduleRound> rounds;

    std::size_t depth() const { return rounds.size(); }
};

/// The coherent-transport strategy: 12 rounds, round i pairing every
/// ancilla with its i-th canonical neighbor in parallel.
inline Schedule movement_schedule(const Lattice &lattice) {
    Schedule s{Strategy::Movement12, {}};
    for (int slot = 0; slot < 12; slot++) {
        ScheduleRound round;
        round.movement_slot = slot;
        for (std::size_t a = 0; a < lattice.ancilla_count(); a++) {
            round.groups.push_back(
                {uint32_t(a), {lattice.cube_edges(a)[slot]}});
        }
        s.rounds.push_back(std::move(round));
    }
    return s;
}

/// The blockade strategy: one CZ12 per cube, cubes grouped by parity
/// color so no two same-round cubes share a vertex, edge or face. Four
/// colors when lz = 1, eight otherwise. Periodic wrap requires even
/// extents along colored axes.
inline Schedule cz12_schedule(const Lattice &lattice) {
    const auto &spec = lattice.spec();
    bool color_z = spec.lz > 1;
    if (lattice.periodic()) {
        if (spec.lx % 2 || spec.ly % 2 || (color_z && spec.lz % 2)) {
            throw ColoringError(
                "parity coloring does not wrap on odd periodic "
                "dimensions; use even extents or the movement strategy");
        }
    }
    std::map<std::array<int, 3>, std::vector<uint32_t>> classes;
    for (std::size_t a = 0; a < lattice.ancilla_count(); a++) {
        const auto &id = lattice.ancilla_id(a);
        classes[{id.x % 2, id.y % 2, color_z ? id.z % 2 : -1}].push_back(
            uint32_t(a));
    }
    Schedule s{Strategy::CZ12Colored, {}};
    for (const auto &[color, cubes] : classes) {
        ScheduleRound round;
        round.color = color;
        for (uint32_t a : cubes) {
            round.groups.push_back({a, lattice.cube_support(a).set_bits()});
        }
        s.rounds.push_back(std::move(round));
    }
    return s;
}

/// Independent validator pass: re-derives coverage and per-round conflict
/// freedom from scratch, trusting nothing about how the schedule was
/// built. Throws ScheduleError on any violation.
inline void validate_schedule(const Schedule &s, const Lattice &lattice) {
    std::map<std::pair<uint32_t, uint32_t>, int> coverage;
    for (std::size_t r = 0; r < s.rounds.size(); r++) {
        const auto &round = s.rounds[r];
        std::set<uint32_t> used;
        auto claim = [&](uint32_t q) {
            if (!used.insert(q).second) {
                throw ScheduleError("round " + std::to_string(r) +
                                    " reuses qubit " + std::to_string(q));
            }
        };
        for (const auto &g : round.groups) {
            if (g.ancilla >= lattice.ancilla_count()) {
                throw ScheduleError("bad ancilla index in schedule");
            }
            claim(lattice.ancilla_qubit(g.ancilla));
            for (uint32_t c : g.code) {
                if (c >= lattice.code_count()) {
                    throw ScheduleError("bad code index in schedule");
                }
                claim(c);
                coverage[{g.ancilla, c}]++;
            }
        }
        if (s.strategy == Strategy::CZ12Colored) {
            for (std::size_t i = 0; i < round.groups.size(); i++) {
                for (std::size_t j = i + 1; j < round.groups.size(); j++) {
                    if (lattice.cubes_adjacent(round.groups[i].ancilla,
                                               round.groups[j].ancilla)) {
                        throw ScheduleError(
                            "round " + std::to_string(r) +
                            " schedules adjacent cubes " +
                            std::to_string(round.groups[i].ancilla) + " and " +
                            std::to_string(round.groups[j].ancilla));
                    }
                }
            }
        }
    }
    // Coverage must match the lattice adjacency exactly: the 12-slot
    // multiset for movement, the mod-2 support sets for CZ12.
    for (std::size_t a = 0; a < lattice.ancilla_count(); a++) {
        std::map<uint32_t, int> want;
        if (s.strategy == Strategy::Movement12) {
            for (uint32_t e : lattice.cube_edges(a)) {
                want[e]++;
            }
        } else {
            for (uint32_t e : lattice.cube_support(a).set_bits()) {
                want[e]++;
            }
        }
        for (const auto &[edge, count] : want) {
            auto it = coverage.find({uint32_t(a), edge});
            int got = it == coverage.end() ? 0 : it->second;
            if (got != count) {
                throw ScheduleError(
                    "coverage mismatch at ancilla " + std::to_string(a) +
                    ", code " + std::to_string(edge) + ": expected " +
                    std::to_string(count) + ", got " + std::to_string(got));
            }
            if (it != coverage.end()) {
                coverage.erase(it);
            }
        }
    }
    if (!coverage.empty()) {
        throw ScheduleError("schedule covers pairs outside the adjacency");
    }
}

/// Emits the scheduled preparation as a runnable circuit.
///
/// CZ form: H layer on every qubit, the scheduled CZ/CZ12 rounds, MX on
/// all ancillae. DynamicCNOT form: the per-gate rewrite
/// CZ = (H on target) CNOT (H on target) with adjacent Hadamards
/// cancelled, leaving H on the ancillae up front, CNOT rounds, one
/// trailing H on every qubit, and Z-basis ancilla measurements. The two
/// forms are the same unitary followed by the same measurements, so for
/// equal seeds the outcomes and the post-measurement code state match
/// with no byproduct left over.
inline Circuit emit_circuit(const Schedule &s, const Lattice &lattice,
                            CircuitForm form) {
    validate_schedule(s, lattice);
    Circuit c;
    c.num_qubits = uint32_t(lattice.total_qubits());
    c.code_count = uint32_t(lattice.code_count());
    c.form = form_name(form);
    c.depth = int(s.depth());

    auto tick = [&] { c.ops.push_back({GateKind::TICK, {}, -1}); };

    if (form == CircuitForm::CZ) {
        for (uint32_t q = 0; q < c.num_qubits; q++) {
            c.ops.push_back({GateKind::H, {q}, -1});
        }
    } else {
        for (std::size_t a = 0; a < lattice.ancilla_count(); a++) {
            c.ops.push_back({GateKind::H, {lattice.ancilla_qubit(a)}, -1});
        }
    }
    tick();
    for (const auto &round : s.rounds) {
        for (const auto &g : round.groups) {
            uint32_t anc = lattice.ancilla_qubit(g.ancilla);
            if (form == CircuitForm::CZ) {
                if (g.code.size() == 1) {
                    c.ops.push_back({GateKind::CZ, {anc, g.code[0]}, -1});
                } else {
                    GateOp op{GateKind::CZ12, {anc}, -1};
                    op.qubits.insert(op.qubits.end(), g.code.begin(),
                                     g.code.end());
                    c.ops.push_back(std::move(op));
                }
            } else {
                for (uint32_t t : g.code) {
                    c.ops.push_back({GateKind::CNOT, {anc, t}, -1});
                }
            }
        }
        tick();
    }
    if (form == CircuitForm::DynamicCNOT) {
        for (uint32_t q = 0; q < c.num_qubits; q++) {
            c.ops.push_back({GateKind::H, {q}, -1});
        }
        tick();
    }
    for (std::size_t a = 0; a < lattice.ancilla_count(); a++) {
        c.ops.push_back({form == CircuitForm::CZ ? GateKind::MX
                                                 : GateKind::MZ,
                         {lattice.ancilla_qubit(a)},
                         int(a)});
    }
    c.validate();
    return c;
}

inline nlohmann::json schedule_to_json(const Schedule &s,
                                       const Lattice &lattice) {
    nlohmann::json j;
    j["schema"] = "xcube.schedule/1";
    j["strategy"] = strategy_name(s.strategy);
    j["depth"] = s.depth();
    j["lattice"] = spec_to_json(lattice.spec());
    auto &rounds = j["rounds"] = nlohmann::json::array();
    for (const auto &round : s.rounds) {
        nlohmann::json r;
        if (round.movement_slot >= 0) {
            r["slot"] = round.movement_slot;
        }
        if (round.color[0] >= 0) {
            r["color"] = {round.color[0], round.color[1], round.color[2]};
        }
        auto &groups = r["groups"] = nlohmann::json::array();
        for (const auto &g : round.groups) {
            groups.push_back({{"ancilla", g.ancilla}, {"code", g.code}});
        }
        rounds.push_back(std::move(r));
    }
    return j;
}

} // namespace xcube
