#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "xcube/lattice.hpp"

using namespace xcube;

namespace {

// Independent brute-force edge enumerator for the open one-storey slab:
// walks all vertex pairs and keeps the axis-aligned unit-distance ones.
// Deliberately a different route than the builder's owned-edge scan.
std::set<std::pair<std::array<int, 3>, std::array<int, 3>>>
brute_force_storey_edges(int lx, int ly) {
    std::vector<std::array<int, 3>> vertices;
    for (int z = 0; z <= 1; z++) {
        for (int y = 0; y <= ly; y++) {
            for (int x = 0; x <= lx; x++) {
                vertices.push_back({x, y, z});
            }
        }
    }
    std::set<std::pair<std::array<int, 3>, std::array<int, 3>>> edges;
    for (std::size_t i = 0; i < vertices.size(); i++) {
        for (std::size_t j = i + 1; j < vertices.size(); j++) {
            auto a = vertices[i], b = vertices[j];
            int d = std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) +
                    std::abs(a[2] - b[2]);
            bool axis_aligned = (a[0] == b[0]) + (a[1] == b[1]) +
                                    (a[2] == b[2]) ==
                                2;
            if (d == 1 && axis_aligned) {
                edges.insert({std::min(a, b), std::max(a, b)});
            }
        }
    }
    return edges;
}

} // namespace

TEST_CASE("periodic counts", "[lattice]") {
    auto l = Lattice::build({2, 2, 2, Boundary::Periodic3D});
    CHECK(l.code_count() == 24); // 3 L^3 edges
    CHECK(l.ancilla_count() == 8);
    CHECK_FALSE(l.self_wrapped_z());

    auto flat = Lattice::build({2, 2, 1, Boundary::Periodic3D});
    CHECK(flat.code_count() == 12);
    CHECK(flat.ancilla_count() == 4);
    CHECK(flat.self_wrapped_z());
}

TEST_CASE("one-storey counts match the brute-force enumerator",
          "[lattice]") {
    auto oracle_edges = brute_force_storey_edges(3, 3);
    REQUIRE(oracle_edges.size() == 64); // 24 horizontal x 2 planes + 16

    auto l = Lattice::build({3, 3, 1, Boundary::OneStoreyOpen});
    CHECK(l.code_count() == 64);
    CHECK(l.ancilla_count() == 9);

    // Each lattice edge must be one of the oracle's vertex pairs, and the
    // map must be a bijection.
    std::set<std::pair<std::array<int, 3>, std::array<int, 3>>> seen;
    for (std::size_t i = 0; i < l.code_count(); i++) {
        auto id = l.code_id(i);
        std::array<int, 3> a{id.vertex.x, id.vertex.y, id.vertex.z};
        auto b = a;
        b[int(id.axis)] += 1;
        auto key = std::make_pair(std::min(a, b), std::max(a, b));
        REQUIRE(oracle_edges.count(key) == 1);
        REQUIRE(seen.insert(key).second);
    }
    CHECK(seen == oracle_edges);
}

TEST_CASE("invalid specs are rejected with diagnostics", "[lattice]") {
    CHECK_THROWS_AS(Lattice::build({1, 2, 2, Boundary::Periodic3D}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Lattice::build({2, 2, 0, Boundary::Periodic3D}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Lattice::build({3, 3, 2, Boundary::OneStoreyOpen}),
                    std::invalid_argument);
}

TEST_CASE("index maps are bijective and deterministic", "[lattice]") {
    for (LatticeSpec spec :
         {LatticeSpec{2, 2, 2, Boundary::Periodic3D},
          LatticeSpec{3, 3, 1, Boundary::OneStoreyOpen}}) {
        auto l = Lattice::build(spec);
        for (std::size_t i = 0; i < l.code_count(); i++) {
            REQUIRE(l.code_index(l.code_id(i)) == i);
        }
        for (std::size_t i = 0; i < l.ancilla_count(); i++) {
            REQUIRE(l.ancilla_index(l.ancilla_id(i)) == i);
        }
        // Rebuild and compare the serialized forms byte for byte.
        auto l2 = Lattice::build(spec);
        REQUIRE(l.to_json() == l2.to_json());
    }
}

TEST_CASE("every cube lists 12 edges; adjacency is symmetric", "[lattice]") {
    for (LatticeSpec spec :
         {LatticeSpec{2, 2, 2, Boundary::Periodic3D},
          LatticeSpec{2, 2, 1, Boundary::Periodic3D},
          LatticeSpec{3, 3, 3, Boundary::Periodic3D},
          LatticeSpec{3, 3, 1, Boundary::OneStoreyOpen}}) {
        auto l = Lattice::build(spec);
        std::map<uint32_t, std::multiset<uint32_t>> edge_to_cubes;
        for (std::size_t a = 0; a < l.ancilla_count(); a++) {
            const auto &edges = l.cube_edges(a);
            REQUIRE(edges.size() == 12);
            for (uint32_t e : edges) {
                edge_to_cubes[e].insert(uint32_t(a));
            }
        }
        for (std::size_t c = 0; c < l.code_count(); c++) {
            const auto &cubes = l.code_cubes(c);
            std::multiset<uint32_t> want(cubes.begin(), cubes.end());
            REQUIRE(want == edge_to_cubes[uint32_t(c)]);
            if (spec.boundary == Boundary::Periodic3D) {
                REQUIRE(cubes.size() == 4);
            } else {
                bool vertical = l.code_id(c).axis == Axis::Z;
                REQUIRE(cubes.size() <= (vertical ? 4 : 2));
                REQUIRE(!cubes.empty());
            }
        }
    }
}

TEST_CASE("periodic cube incidence has even column sums, also per layer",
          "[lattice]") {
    // Structural content of the cube-product identity: every edge sits in
    // an even number of cubes, within every dual layer too.
    for (LatticeSpec spec : {LatticeSpec{2, 2, 2, Boundary::Periodic3D},
                             LatticeSpec{3, 3, 3, Boundary::Periodic3D},
                             LatticeSpec{2, 2, 1, Boundary::Periodic3D}}) {
        auto l = Lattice::build(spec);
        auto count_in = [&](auto &&keep) {
            std::vector<int> per_edge(l.code_count(), 0);
            for (std::size_t a = 0; a < l.ancilla_count(); a++) {
                if (!keep(l.ancilla_id(a))) {
                    continue;
                }
                for (uint32_t e : l.cube_edges(a)) {
                    per_edge[e]++;
                }
            }
            return per_edge;
        };
        for (int count : count_in([](const AncillaId &) { return true; })) {
            REQUIRE(count % 2 == 0);
        }
        for (int axis = 0; axis < 3; axis++) {
            int extent = axis == 0 ? spec.lx : axis == 1 ? spec.ly : spec.lz;
            for (int layer = 0; layer < extent; layer++) {
                auto counts = count_in([&](const AncillaId &id) {
                    int coord = axis == 0 ? id.x : axis == 1 ? id.y : id.z;
                    return coord == layer;
                });
                for (int count : counts) {
                    REQUIRE(count % 2 == 0);
                }
            }
        }
    }
}

TEST_CASE("star members at a periodic vertex", "[lattice]") {
    auto l = Lattice::build({2, 2, 2, Boundary::Periodic3D});
    auto m = l.star_members({0, 0, 0}, Plane::XY);
    CHECK_FALSE(m.degenerate);
    CHECK(m.edges[0] == CodeQubitId{{0, 0, 0}, Axis::X});
    CHECK(m.edges[1] == CodeQubitId{{1, 0, 0}, Axis::X}); // -x wraps
    CHECK(m.edges[2] == CodeQubitId{{0, 0, 0}, Axis::Y});
    CHECK(m.edges[3] == CodeQubitId{{0, 1, 0}, Axis::Y});
    CHECK(l.star_count() == 3 * 8);
}

TEST_CASE("open-boundary vertical stars are undefined, never truncated",
          "[lattice]") {
    auto l = Lattice::build({3, 3, 1, Boundary::OneStoreyOpen});
    CHECK_THROWS_AS(l.star_members({1, 1, 0}, Plane::XZ),
                    UndefinedStabilizerError);
    CHECK_THROWS_AS(l.star_members({1, 1, 1}, Plane::YZ),
                    UndefinedStabilizerError);
    // xy stars exist exactly at interior vertices of either plane.
    CHECK(l.star_count() == 8);
    CHECK(l.undefined_stars().size() == 96 - 8);
    auto m = l.star_members({1, 2, 1}, Plane::XY);
    CHECK_FALSE(m.degenerate);
}

TEST_CASE("z self-wrap reports the degeneracy", "[lattice]") {
    auto l = Lattice::build({2, 2, 1, Boundary::Periodic3D});
    auto m = l.star_members({0, 0, 0}, Plane::XZ);
    CHECK(m.degenerate);
    // Index-arithmetic oracle: under z-wrap both z-members are the edge
    // at (0,0,0); dense index ((0*2+0)*2+0)*3 + 2 = 2.
    CHECK(l.code_index(m.edges[2]) == 2);
    CHECK(l.code_index(m.edges[3]) == 2);
    CHECK(m.edges[0] == CodeQubitId{{0, 0, 0}, Axis::X});
    CHECK(m.edges[1] == CodeQubitId{{1, 0, 0}, Axis::X});
    // Mod-2 support keeps only the two x-edges.
    uint32_t s = l.star_index({{0, 0, 0}, Plane::XZ});
    CHECK(l.star_support(s).popcount() == 2);
    CHECK(l.star_degenerate(s));
}

TEST_CASE("lattice JSON fixture round-trip", "[lattice]") {
    auto l = Lattice::build({2, 2, 2, Boundary::Periodic3D});
    auto j = l.to_json();
    CHECK(j["schema"] == "xcube.lattice/1");
    auto back = Lattice::from_json(j);
    CHECK(back.to_json() == j);

    auto tampered = j;
    tampered["ancilla_adj"][0][0] = 23;
    CHECK_THROWS_AS(Lattice::from_json(tampered), std::invalid_argument);
}

TEST_CASE("cube adjacency under wrap", "[lattice]") {
    auto l2 = Lattice::build({2, 2, 2, Boundary::Periodic3D});
    // At L=2 every pair of cubes touches under wrap.
    for (std::size_t a = 0; a < l2.ancilla_count(); a++) {
        for (std::size_t b = 0; b < l2.ancilla_count(); b++) {
            REQUIRE(l2.cubes_adjacent(a, b));
        }
    }
    auto l4 = Lattice::build({4, 4, 1, Boundary::OneStoreyOpen});
    uint32_t c00 = l4.ancilla_index({0, 0, 0});
    uint32_t c22 = l4.ancilla_index({2, 2, 0});
    uint32_t c11 = l4.ancilla_index({1, 1, 0});
    CHECK_FALSE(l4.cubes_adjacent(c00, c22));
    CHECK(l4.cubes_adjacent(c00, c11));
}
