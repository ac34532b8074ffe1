#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "xcube/bits.hpp"
#include "xcube/gf2.hpp"

namespace xcube {

struct UndefinedStabilizerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Boundary : uint8_t { Periodic3D, OneStoreyOpen };
enum class Axis : uint8_t { X = 0, Y = 1, Z = 2 };
enum class Plane : uint8_t { XY = 0, XZ = 1, YZ = 2 };

inline const char *boundary_name(Boundary b) {
    return b == Boundary::Periodic3D ? "periodic3d" : "one-storey-open";
}
inline const char *axis_name(Axis a) {
    switch (a) {
    case Axis::X: return "X";
    case Axis::Y: return "Y";
    case Axis::Z: return "Z";
    }
    return "?";
}
inline const char *plane_name(Plane p) {
    switch (p) {
    case Plane::XY: return "xy";
    case Plane::XZ: return "xz";
    case Plane::YZ: return "yz";
    }
    return "?";
}

struct Vec3 {
    int x = 0, y = 0, z = 0;
    auto operator<=>(const Vec3 &) const = default;
};

/// An edge of the cubic lattice: the vertex it starts from plus its axis.
struct CodeQubitId {
    Vec3 vertex;
    Axis axis;
    auto operator<=>(const CodeQubitId &) const = default;
};

/// A cube, named by its lowest corner.
using AncillaId = Vec3;

struct StarSite {
    Vec3 vertex;
    Plane plane;
    auto operator<=>(const StarSite &) const = default;
};

/// Geometry request. OneStoreyOpen is the three-layer slab: one storey
/// of cubes, open in x and y.
struct LatticeSpec {
    int lx = 2, ly = 2, lz = 2;
    Boundary boundary = Boundary::Periodic3D;

    void validate() const {
        if (lx < 2 || ly < 2) {
            throw std::invalid_argument(
                "lattice needs lx >= 2 and ly >= 2 (got " +
                std::to_string(lx) + "x" + std::to_string(ly) + ")");
        }
        if (lz < 1) {
            throw std::invalid_argument("lattice needs lz >= 1");
        }
        if (boundary == Boundary::OneStoreyOpen && lz != 1) {
            throw std::invalid_argument(
                "one-storey lattice requires lz = 1 (got lz = " +
                std::to_string(lz) + ")");
        }
    }

    bool operator==(const LatticeSpec &) const = default;
};

/// Code/ancilla geometry with dense index maps and adjacency.
///
/// Canonical orderings (stable across builds and serialization):
///   code qubits by (z, y, x, axis), ancillae by (z, y, x), star sites by
///   (z, y, x, plane). A cube's 12 edges are listed axis-major — X edges
///   at offsets (0,dy,dz), then Y at (dx,0,dz), then Z at (dx,dy,0), each
///   block in lexicographic (d1,d2) order — and this slot order is what
///   the movement schedule's rounds index into.
///
/// With lz = 1 under periodic boundaries the vertical edges self-wrap:
/// the cube edge list then names some edges twice and the mod-2 supports
/// drop them. Such lattices are flagged (self_wrapped_z) and kept as the
/// smallest exactly-solvable fixtures.
///
/// Immutable after build; safe to share read-only across threads.
class Lattice {
  public:
    static Lattice build(const LatticeSpec &spec) { return Lattice(spec); }

    const LatticeSpec &spec() const { return spec_; }
    bool periodic() const { return spec_.boundary == Boundary::Periodic3D; }
    bool self_wrapped_z() const { return self_wrapped_z_; }

    std::size_t code_count() const { return code_ids_.size(); }
    std::size_t ancilla_count() const { return ancilla_ids_.size(); }
    /// Code qubits first, ancillae after, in one simulation register.
    std::size_t total_qubits() const { return code_count() + ancilla_count(); }
    uint32_t ancilla_qubit(std::size_t a) const {
        return uint32_t(code_count() + a);
    }

    const CodeQubitId &code_id(std::size_t i) const { return code_ids_[i]; }
    const AncillaId &ancilla_id(std::size_t i) const {
        return ancilla_ids_[i];
    }

    uint32_t code_index(const CodeQubitId &id) const {
        auto it = code_index_.find(code_key(normalize_edge(id)));
        if (it == code_index_.end()) {
            throw std::invalid_argument("no such code qubit");
        }
        return it->second;
    }
    uint32_t ancilla_index(const AncillaId &id) const {
        auto it = ancilla_index_.find(vec_key(normalize_cube(id)));
        if (it == ancilla_index_.end()) {
            throw std::invalid_argument("no such ancilla");
        }
        return it->second;
    }

    /// The 12 edges of cube a in canonical slot order (entries may repeat
    /// on self-wrapped lattices).
    const std::array<uint32_t, 12> &cube_edges(std::size_t a) const {
        return cube_edges_[a];
    }
    /// Mod-2 support of cube a over code qubits.
    const BitRow &cube_support(std::size_t a) const {
        return cube_support_[a];
    }
    /// Cubes containing code qubit c, with multiplicity.
    const std::vector<uint32_t> &code_cubes(std::size_t c) const {
        return code_cubes_[c];
    }
    /// Mod-2 support of "the ancillae around code qubit c".
    const BitRow &code_cube_support(std::size_t c) const {
        return code_cube_support_[c];
    }

    std::size_t star_count() const { return star_sites_.size(); }
    const StarSite &star_site(std::size_t s) const { return star_sites_[s]; }
    const std::array<uint32_t, 4> &star_edges(std::size_t s) const {
        return star_edges_[s];
    }
    const BitRow &star_support(std::size_t s) const {
        return star_support_[s];
    }
    bool star_degenerate(std::size_t s) const { return star_degenerate_[s]; }
    const std::vector<StarSite> &undefined_stars() const {
        return undefined_stars_;
    }
    uint32_t star_index(const StarSite &site) const {
        Vec3 v = wrap(site.vertex);
        auto it = star_index_.find({v.z, v.y, v.x, int(site.plane)});
        if (it == star_index_.end()) {
            throw UndefinedStabilizerError("undefined stabilizer: no star at "
                                           "the requested site");
        }
        return it->second;
    }
    /// Stars whose mod-2 support contains code qubit c.
    const std::vector<uint32_t> &code_stars(std::size_t c) const {
        return code_stars_[c];
    }

    /// True when the X-product over the ancillae around code qubit c is a
    /// genuine parity constraint: the Z parts of the surrounding cluster
    /// operators cancel (always in the periodic bulk; fails near open
    /// boundaries, where the product is unconstrained).
    bool ancilla_parity_defined(std::size_t c) const {
        return ancilla_parity_defined_[c];
    }

    struct StarMembers {
        std::array<CodeQubitId, 4> edges; // +a1, -a1, +a2, -a2
        bool degenerate;                  // some members coincide (z wrap)
    };

    /// The four edges incident to `vertex` in `plane`. Throws
    /// UndefinedStabilizerError where the star does not exist (open
    /// boundaries) rather than returning a truncated list.
    StarMembers star_members(Vec3 vertex, Plane plane) const {
        auto [a1, a2] = plane_axes(plane);
        StarMembers out{};
        std::array<CodeQubitId, 4> raw = {
            CodeQubitId{vertex, a1},
            CodeQubitId{step(vertex, a1, -1), a1},
            CodeQubitId{vertex, a2},
            CodeQubitId{step(vertex, a2, -1), a2},
        };
        for (std::size_t i = 0; i < 4; i++) {
            auto norm = normalize_edge(raw[i]);
            if (!code_index_.count(code_key(norm))) {
                throw UndefinedStabilizerError(
                    "undefined stabilizer: star at (" +
                    std::to_string(vertex.x) + "," + std::to_string(vertex.y) +
                    "," + std::to_string(vertex.z) + ") plane " +
                    plane_name(plane) + " lacks edge " +
                    std::to_string(i));
            }
            out.edges[i] = norm;
        }
        out.degenerate = out.edges[0] == out.edges[1] ||
                         out.edges[2] == out.edges[3];
        return out;
    }

    /// Cubes sharing a vertex, edge or face (the blockade notion used by
    /// the CZ12 scheduler).
    bool cubes_adjacent(std::size_t a, std::size_t b) const {
        const Vec3 &u = ancilla_ids_[a], &v = ancilla_ids_[b];
        return axis_close(u.x, v.x, spec_.lx) &&
               axis_close(u.y, v.y, spec_.ly) &&
               axis_close(u.z, v.z, spec_.lz);
    }

    /// Cube-by-edge incidence over GF(2) (mod-2 supports).
    Gf2Matrix cube_incidence() const {
        Gf2Matrix m(ancilla_count(), code_count());
        for (std::size_t a = 0; a < ancilla_count(); a++) {
            m.row(a) = cube_support_[a];
        }
        return m;
    }

    nlohmann::json to_json() const;
    static Lattice from_json(const nlohmann::json &j);

  private:
    explicit Lattice(const LatticeSpec &spec) : spec_(spec) {
        spec_.validate();
        self_wrapped_z_ = periodic() && spec_.lz == 1;
        enumerate_code_qubits();
        enumerate_ancillae();
        build_cube_adjacency();
        enumerate_stars();
        code_stars_.assign(code_count(), {});
        for (std::size_t s = 0; s < star_count(); s++) {
            star_support_[s].for_each_set(
                [&](std::size_t e) { code_stars_[e].push_back(uint32_t(s)); });
        }
        ancilla_parity_defined_.assign(code_count(), false);
        for (std::size_t c = 0; c < code_count(); c++) {
            BitRow acc(code_count());
            code_cube_support_[c].for_each_set(
                [&](std::size_t a) { acc ^= cube_support_[a]; });
            ancilla_parity_defined_[c] = !acc.any();
        }
    }

    static std::tuple<int, int, int> vec_key(const Vec3 &v) {
        return {v.z, v.y, v.x};
    }
    static std::tuple<int, int, int, int> code_key(const CodeQubitId &id) {
        return {id.vertex.z, id.vertex.y, id.vertex.x, int(id.axis)};
    }

    static std::pair<Axis, Axis> plane_axes(Plane p) {
        switch (p) {
        case Plane::XY: return {Axis::X, Axis::Y};
        case Plane::XZ: return {Axis::X, Axis::Z};
        case Plane::YZ: return {Axis::Y, Axis::Z};
        }
        throw std::invalid_argument("bad plane");
    }

    static Vec3 step(Vec3 v, Axis a, int d) {
        switch (a) {
        case Axis::X: v.x += d; break;
        case Axis::Y: v.y += d; break;
        case Axis::Z: v.z += d; break;
        }
        return v;
    }

    static int wrap_coord(int c, int l) { return ((c % l) + l) % l; }

    Vec3 wrap(Vec3 v) const {
        if (periodic()) {
            v.x = wrap_coord(v.x, spec_.lx);
            v.y = wrap_coord(v.y, spec_.ly);
            v.z = wrap_coord(v.z, spec_.lz);
        }
        return v;
    }

    /// Periodic: wrap the base vertex. Open: identity (bounds checked by
    /// the index map).
    CodeQubitId normalize_edge(CodeQubitId id) const {
        id.vertex = wrap(id.vertex);
        return id;
    }
    AncillaId normalize_cube(AncillaId id) const { return wrap(id); }

    bool axis_close(int a, int b, int l) const {
        int d = a > b ? a - b : b - a;
        if (periodic()) {
            d = std::min(d, l - d);
        }
        return d <= 1;
    }

    void enumerate_code_qubits() {
        const bool open = !periodic();
        const int vx = open ? spec_.lx + 1 : spec_.lx;
        const int vy = open ? spec_.ly + 1 : spec_.ly;
        const int vz = open ? 2 : spec_.lz;
        for (int z = 0; z < vz; z++) {
            for (int y = 0; y < vy; y++) {
                for (int x = 0; x < vx; x++) {
                    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
                        if (open) {
                            if (a == Axis::X && x >= spec_.lx) continue;
                            if (a == Axis::Y && y >= spec_.ly) continue;
                            if (a == Axis::Z && z != 0) continue;
                        }
                        CodeQubitId id{{x, y, z}, a};
                        code_index_[code_key(id)] =
                            uint32_t(code_ids_.size());
                        code_ids_.push_back(id);
                    }
                }
            }
        }
    }

    void enumerate_ancillae() {
        for (int z = 0; z < spec_.lz; z++) {
            for (int y = 0; y < spec_.ly; y++) {
                for (int x = 0; x < spec_.lx; x++) {
                    AncillaId id{x, y, z};
                    ancilla_index_[vec_key(id)] =
                        uint32_t(ancilla_ids_.size());
                    ancilla_ids_.push_back(id);
                }
            }
        }
    }

    void build_cube_adjacency() {
        code_cubes_.assign(code_count(), {});
        code_cube_support_.assign(code_count(), BitRow(ancilla_count()));
        for (std::size_t a = 0; a < ancilla_count(); a++) {
            const Vec3 &c = ancilla_ids_[a];
            std::array<uint32_t, 12> edges{};
            BitRow support(code_count());
            for (int slot = 0; slot < 12; slot++) {
                Axis axis = Axis(slot / 4);
                int d1 = (slot % 4) >> 1, d2 = (slot % 4) & 1;
                Vec3 v = c;
                switch (axis) {
                case Axis::X: v.y += d1; v.z += d2; break;
                case Axis::Y: v.x += d1; v.z += d2; break;
                case Axis::Z: v.x += d1; v.y += d2; break;
                }
                uint32_t e = code_index(CodeQubitId{v, axis});
                edges[slot] = e;
                support.flip(e);
                code_cubes_[e].push_back(uint32_t(a));
                code_cube_support_[e].flip(a);
            }
            cube_edges_.push_back(edges);
            cube_support_.push_back(std::move(support));
        }
    }

    void enumerate_stars() {
        const bool open = !periodic();
        const int vx = open ? spec_.lx + 1 : spec_.lx;
        const int vy = open ? spec_.ly + 1 : spec_.ly;
        const int vz = open ? 2 : spec_.lz;
        for (int z = 0; z < vz; z++) {
            for (int y = 0; y < vy; y++) {
                for (int x = 0; x < vx; x++) {
                    for (Plane p : {Plane::XY, Plane::XZ, Plane::YZ}) {
                        StarSite site{{x, y, z}, p};
                        StarMembers m;
                        try {
                            m = star_members(site.vertex, site.plane);
                        } catch (const UndefinedStabilizerError &) {
                            undefined_stars_.push_back(site);
                            continue;
                        }
                        star_index_[{z, y, x, int(p)}] =
                            uint32_t(star_sites_.size());
                        star_sites_.push_back(site);
                        std::array<uint32_t, 4> es{};
                        BitRow support(code_count());
                        for (int i = 0; i < 4; i++) {
                            es[i] = code_index(m.edges[i]);
                            support.flip(es[i]);
                        }
                        star_edges_.push_back(es);
                        star_support_.push_back(std::move(support));
                        star_degenerate_.push_back(m.degenerate);
                    }
                }
            }
        }
    }

    LatticeSpec spec_;
    bool self_wrapped_z_ = false;

    std::vector<CodeQubitId> code_ids_;
    std::map<std::tuple<int, int, int, int>, uint32_t> code_index_;
    std::vector<AncillaId> ancilla_ids_;
    std::map<std::tuple<int, int, int>, uint32_t> ancilla_index_;

    std::vector<std::array<uint32_t, 12>> cube_edges_;
    std::vector<BitRow> cube_support_;
    std::vector<std::vector<uint32_t>> code_cubes_;
    std::vector<BitRow> code_cube_support_;

    std::vector<StarSite> star_sites_;
    std::map<std::tuple<int, int, int, int>, uint32_t> star_index_;
    std::vector<std::array<uint32_t, 4>> star_edges_;
    std::vector<BitRow> star_support_;
    std::vector<bool> star_degenerate_;
    std::vector<StarSite> undefined_stars_;
    std::vector<std::vector<uint32_t>> code_stars_;
    std::vector<bool> ancilla_parity_defined_;
};

inline nlohmann::json spec_to_json(const LatticeSpec &s) {
    return {{"lx", s.lx},
            {"ly", s.ly},
            {"lz", s.lz},
            {"boundary", boundary_name(s.boundary)}};
}

inline LatticeSpec spec_from_json(const nlohmann::json &j) {
    LatticeSpec s;
    s.lx = j.at("lx").get<int>();
    s.ly = j.at("ly").get<int>();
    s.lz = j.at("lz").get<int>();
    std::string b = j.at("boundary").get<std::string>();
    if (b == "periodic3d") {
        s.boundary = Boundary::Periodic3D;
    } else if (b == "one-storey-open") {
        s.boundary = Boundary::OneStoreyOpen;
    } else {
        throw std::invalid_argument("unknown boundary '" + b + "'");
    }
    return s;
}

inline nlohmann::json star_site_to_json(const StarSite &s) {
    return {{"vertex", {s.vertex.x, s.vertex.y, s.vertex.z}},
            {"plane", plane_name(s.plane)}};
}

inline nlohmann::json Lattice::to_json() const {
    nlohmann::json j;
    j["schema"] = "xcube.lattice/1";
    j["spec"] = spec_to_json(spec_);
    j["code_count"] = code_count();
    j["ancilla_count"] = ancilla_count();
    j["self_wrapped_z"] = self_wrapped_z_;
    auto &codes = j["code_qubits"] = nlohmann::json::array();
    for (const auto &id : code_ids_) {
        codes.push_back({id.vertex.x, id.vertex.y, id.vertex.z,
                         axis_name(id.axis)});
    }
    auto &ancs = j["ancillae"] = nlohmann::json::array();
    for (const auto &id : ancilla_ids_) {
        ancs.push_back({id.x, id.y, id.z});
    }
    auto &adj = j["ancilla_adj"] = nlohmann::json::array();
    for (const auto &edges : cube_edges_) {
        adj.push_back(edges);
    }
    auto &stars = j["stars"] = nlohmann::json::array();
    for (std::size_t s = 0; s < star_count(); s++) {
        auto e = star_site_to_json(star_sites_[s]);
        e["edges"] = star_edges_[s];
        e["degenerate"] = bool(star_degenerate_[s]);
        stars.push_back(std::move(e));
    }
    auto &undef = j["undefined_stars"] = nlohmann::json::array();
    for (const auto &s : undefined_stars_) {
        undef.push_back(star_site_to_json(s));
    }
    return j;
}

inline Lattice Lattice::from_json(const nlohmann::json &j) {
    if (j.at("schema") != "xcube.lattice/1") {
        throw std::invalid_argument("unsupported lattice schema");
    }
    Lattice l = build(spec_from_json(j.at("spec")));
    // Builds are deterministic; a stored fixture must match bit for bit.
    if (j.at("code_count") != l.code_count() ||
        j.at("ancilla_count") != l.ancilla_count() ||
        j.at("ancilla_adj") != l.to_json()["ancilla_adj"]) {
        throw std::invalid_argument("lattice fixture does not match rebuild");
    }
    return l;
}

} // namespace xcube
