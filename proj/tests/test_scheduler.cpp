#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "xcube/scheduler.hpp"
#include "xcube/statevector.hpp"

using namespace xcube;

TEST_CASE("movement schedule is 12 rounds covering the adjacency multiset",
          "[scheduler]") {
    auto l = Lattice::build({2, 2, 2, Boundary::Periodic3D});
    auto s = movement_schedule(l);
    REQUIRE(s.depth() == 12);
    std::size_t pairs = 0;
    for (const auto &round : s.rounds) {
        REQUIRE(round.groups.size() == 8); // one CZ pair per ancilla
        for (const auto &g : round.groups) {
            pairs += g.code.size();
        }
    }
    CHECK(pairs == 96); // 8 ancillae x 12 neighbors
    validate_schedule(s, l);

    auto flat = Lattice::build({2, 2, 1, Boundary::Periodic3D});
    auto sf = movement_schedule(flat);
    REQUIRE(sf.depth() == 12);
    for (const auto &round : sf.rounds) {
        REQUIRE(round.groups.size() == 4);
    }
    validate_schedule(sf, flat);
}

TEST_CASE("movement coverage equals the adjacency multiset exactly",
          "[scheduler]") {
    auto l = Lattice::build({3, 3, 1, Boundary::OneStoreyOpen});
    auto s = movement_schedule(l);
    std::map<std::pair<uint32_t, uint32_t>, int> got, want;
    for (const auto &round : s.rounds) {
        for (const auto &g : round.groups) {
            for (uint32_t c : g.code) {
                got[{g.ancilla, c}]++;
            }
        }
    }
    for (std::size_t a = 0; a < l.ancilla_count(); a++) {
        for (uint32_t c : l.cube_edges(a)) {
            want[{uint32_t(a), c}]++;
        }
    }
    CHECK(got == want);
}

TEST_CASE("cz12 schedule colors", "[scheduler]") {
    SECTION("one-storey 4x4: four rounds of four, no same-round contact") {
        auto l = Lattice::build({4, 4, 1, Boundary::OneStoreyOpen});
        auto s = cz12_schedule(l);
        REQUIRE(s.depth() == 4);
        for (const auto &round : s.rounds) {
            REQUIRE(round.groups.size() == 4);
            for (std::size_t i = 0; i < round.groups.size(); i++) {
                for (std::size_t j = i + 1; j < round.groups.size(); j++) {
                    REQUIRE_FALSE(l.cubes_adjacent(round.groups[i].ancilla,
                                                   round.groups[j].ancilla));
                }
            }
        }
        validate_schedule(s, l);
    }
    SECTION("periodic 2x2x2: every cube pair touches, eight singleton rounds") {
        auto l = Lattice::build({2, 2, 2, Boundary::Periodic3D});
        auto s = cz12_schedule(l);
        REQUIRE(s.depth() == 8);
        for (const auto &round : s.rounds) {
            REQUIRE(round.groups.size() == 1);
        }
        validate_schedule(s, l);
    }
    SECTION("odd periodic dimensions are rejected with a suggestion") {
        auto l = Lattice::build({3, 3, 3, Boundary::Periodic3D});
        CHECK_THROWS_WITH(cz12_schedule(l),
                          Catch::Matchers::ContainsSubstring("movement"));
    }
}

TEST_CASE("validator rejects a corrupted schedule", "[scheduler]") {
    auto l = Lattice::build({4, 4, 1, Boundary::OneStoreyOpen});
    auto s = cz12_schedule(l);

    SECTION("two adjacent cubes forced into one round") {
        REQUIRE(s.rounds.size() >= 2);
        s.rounds[0].groups.push_back(s.rounds[1].groups[0]);
        s.rounds[1].groups.erase(s.rounds[1].groups.begin());
        CHECK_THROWS_AS(validate_schedule(s, l), ScheduleError);
    }
    SECTION("dropped pair breaks coverage") {
        auto m = movement_schedule(l);
        m.rounds[3].groups.pop_back();
        CHECK_THROWS_AS(validate_schedule(m, l), ScheduleError);
    }
    SECTION("duplicated pair breaks coverage") {
        auto m = movement_schedule(l);
        m.rounds.push_back(m.rounds[0]);
        CHECK_THROWS_AS(validate_schedule(m, l), ScheduleError);
    }
}

TEST_CASE("emitted circuit round-trips through the parser bit-exactly",
          "[scheduler]") {
    auto l = Lattice::build({2, 2, 1, Boundary::Periodic3D});
    for (auto strategy : {Strategy::Movement12, Strategy::CZ12Colored}) {
        auto s = strategy == Strategy::Movement12 ? movement_schedule(l)
                                                  : cz12_schedule(l);
        for (auto form : {CircuitForm::CZ, CircuitForm::DynamicCNOT}) {
            auto c = emit_circuit(s, l, form);
            auto text = c.to_text();
            auto reparsed = Circuit::from_text(text);
            REQUIRE(reparsed.to_text() == text);
        }
    }
}

TEST_CASE("circuit depth metadata", "[scheduler]") {
    auto flat = Lattice::build({4, 4, 1, Boundary::OneStoreyOpen});
    CHECK(emit_circuit(movement_schedule(flat), flat, CircuitForm::CZ).depth ==
          12);
    CHECK(emit_circuit(cz12_schedule(flat), flat, CircuitForm::CZ).depth == 4);
}

TEST_CASE("dynamic form contains CNOTs and no CZ ops", "[scheduler]") {
    auto l = Lattice::build({2, 2, 2, Boundary::Periodic3D});
    auto c = emit_circuit(movement_schedule(l), l, CircuitForm::DynamicCNOT);
    bool saw_cnot = false;
    for (const auto &op : c.ops) {
        REQUIRE(op.kind != GateKind::CZ);
        REQUIRE(op.kind != GateKind::CZ12);
        REQUIRE(op.kind != GateKind::MX);
        saw_cnot |= op.kind == GateKind::CNOT;
    }
    CHECK(saw_cnot);
}

TEST_CASE("CZ and dynamic forms agree on the isolated cube", "[scheduler]") {
    // One ancilla, twelve code qubits, no sharing: run both emissions and
    // compare the projected code state, also against the dense oracle.
    Circuit cz, dyn;
    cz.num_qubits = dyn.num_qubits = 13;
    cz.code_count = dyn.code_count = 12;
    const uint32_t anc = 12;
    for (uint32_t q = 0; q < 13; q++) {
        cz.ops.push_back({GateKind::H, {q}, -1});
    }
    dyn.ops.push_back({GateKind::H, {anc}, -1});
    GateOp big{GateKind::CZ12, {anc}, -1};
    for (uint32_t t = 0; t < 12; t++) {
        big.qubits.push_back(t);
        dyn.ops.push_back({GateKind::CNOT, {anc, t}, -1});
    }
    cz.ops.push_back(big);
    cz.ops.push_back({GateKind::MX, {anc}, 0});
    for (uint32_t q = 0; q < 13; q++) {
        dyn.ops.push_back({GateKind::H, {q}, -1});
    }
    dyn.ops.push_back({GateKind::MZ, {anc}, 0});

    for (uint64_t seed : {0ULL, 1ULL, 2ULL, 3ULL}) {
        auto t1 = Tableau::zero_state(13);
        auto t2 = Tableau::zero_state(13);
        Rng r1(seed), r2(seed);
        auto o1 = run_circuit(t1, cz, r1);
        auto o2 = run_circuit(t2, dyn, r2);
        REQUIRE(o1.results == o2.results);
        auto code1 = t1.canonical_stabilizers_on_prefix(12);
        auto code2 = t2.canonical_stabilizers_on_prefix(12);
        REQUIRE(code1 == code2);

        StateVector sv(13);
        Rng r3(seed);
        auto o3 = run_circuit(sv, cz, r3);
        REQUIRE(o3.results == o1.results);
        for (const auto &g : code1) {
            REQUIRE(sv.expectation(g) == Catch::Approx(1.0).margin(1e-10));
        }
    }
}

TEST_CASE("dynamic three-qubit fragment teleports the entanglement",
          "[scheduler]") {
    // Code - ancilla - code chain in the rewritten form: the code pair
    // ends up stabilized by {XX, ZZ} up to the outcome byproduct sign.
    Circuit dyn;
    dyn.num_qubits = 3;
    dyn.code_count = 2;
    const uint32_t anc = 2;
    dyn.ops = {
        {GateKind::H, {anc}, -1},
        {GateKind::CNOT, {anc, 0}, -1},
        {GateKind::CNOT, {anc, 1}, -1},
        {GateKind::H, {0}, -1},
        {GateKind::H, {1}, -1},
        {GateKind::H, {anc}, -1},
        {GateKind::MZ, {anc}, 0},
    };
    for (uint64_t seed : {10ULL, 11ULL, 12ULL, 13ULL}) {
        auto t = Tableau::zero_state(3);
        Rng rng(seed);
        auto out = run_circuit(t, dyn, rng);
        auto code = t.canonical_stabilizers_on_prefix(2);
        REQUIRE(code.size() == 2);
        PauliString xx(3), zz(3);
        xx.set_x(0, true);
        xx.set_x(1, true);
        zz.set_z(0, true);
        zz.set_z(1, true);
        if (out.results[0] < 0) {
            zz.negate();
        }
        CHECK(code[0] == xx);
        CHECK(code[1] == zz);
    }
}

TEST_CASE("schedule JSON shape", "[scheduler]") {
    auto l = Lattice::build({2, 2, 2, Boundary::Periodic3D});
    auto j = schedule_to_json(movement_schedule(l), l);
    CHECK(j["schema"] == "xcube.schedule/1");
    CHECK(j["depth"] == 12);
    CHECK(j["rounds"].size() == 12);
    CHECK(j["rounds"][0]["slot"] == 0);
    auto jc = schedule_to_json(cz12_schedule(l), l);
    CHECK(jc["rounds"][0].contains("color"));
}
