#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "xcube/protocol.hpp"

namespace xcube {

enum class Stage : uint8_t { PreMeasurement, PostPreparation };

inline const char *stage_name(Stage s) {
    return s == Stage::PreMeasurement ? "pre" : "post";
}

/// A single injected Pauli. PreMeasurement events land on the cluster
/// state before the ancilla readout (valid for ancilla and code
/// targets); PostPreparation events land on the finished code state
/// (code targets only — the ancillae are measured out by then).
struct ErrorEvent {
    char pauli = 'X'; // X, Y or Z
    bool on_ancilla = false;
    uint32_t index = 0;
    Stage stage = Stage::PostPreparation;

    void validate(const Lattice &l) const {
        if (pauli != 'X' && pauli != 'Y' && pauli != 'Z') {
            throw std::invalid_argument("error pauli must be X, Y or Z");
        }
        if (on_ancilla && stage == Stage::PostPreparation) {
            throw std::invalid_argument(
                "invalid pairing: ancilla errors only occur before the "
                "readout (stage pre)");
        }
        std::size_t limit = on_ancilla ? l.ancilla_count() : l.code_count();
        if (index >= limit) {
            throw std::invalid_argument("error target out of range");
        }
    }

    nlohmann::json to_json() const {
        return {{"pauli", std::string(1, pauli)},
                {"target", (on_ancilla ? "a" : "c") + std::to_string(index)},
                {"stage", stage_name(stage)}};
    }

    bool operator==(const ErrorEvent &) const = default;
};

/// Applies the event's Pauli to the live state. Y decomposes into X then
/// Z (conjugation is blind to the global i).
inline void apply_event(Tableau &t, const Lattice &l, const ErrorEvent &e) {
    uint32_t q = e.on_ancilla ? l.ancilla_qubit(e.index) : e.index;
    if (e.pauli == 'X' || e.pauli == 'Y') {
        t.apply_x(q);
    }
    if (e.pauli == 'Z' || e.pauli == 'Y') {
        t.apply_z(q);
    }
}

enum class SyndromeClass : uint8_t {
    Clean,
    IsolatedFracton,
    FractonQuadruple,
    FractonDipole,
    LineonPair,
    Unclassified,
};

inline const char *syndrome_class_name(SyndromeClass c) {
    switch (c) {
    case SyndromeClass::Clean: return "clean";
    case SyndromeClass::IsolatedFracton: return "isolated-fracton";
    case SyndromeClass::FractonQuadruple: return "fracton-quadruple";
    case SyndromeClass::FractonDipole: return "fracton-dipole";
    case SyndromeClass::LineonPair: return "lineon-pair";
    case SyndromeClass::Unclassified: return "unclassified";
    }
    return "?";
}

/// Everything the checks see, with raw values kept alongside the
/// violation sets. Check values are +1 (satisfied), -1 (violated) or 0
/// (indefinite at this stage / unconstrained at this boundary); only -1
/// counts as a violation.
///
/// Cube checks compare against the record before correction and against
/// +1 after it; they are indefinite on the bare cluster state. The
/// code-centered cluster parities (the qubit-centered 5-body checks) are
/// definite only on the cluster state, before the readout destroys the
/// ancilla Z context. The ancilla-centered parities (X products around a
/// code qubit) are definite at every stage and equal the record parities
/// once measured.
struct SyndromeReport {
    std::vector<uint32_t> flipped_cubes;
    std::vector<uint32_t> flipped_stars;            // defined-star indices
    std::vector<uint32_t> violated_code_parities;   // code qubit ids
    std::vector<uint32_t> violated_ancilla_parities;// keyed by code qubit
    SyndromeClass classification = SyndromeClass::Clean;

    std::vector<int> cube_values, star_values;
    std::vector<int> code_parity_values, ancilla_parity_values;
    std::vector<int> record;      // empty before the readout
    bool record_consistent = true;

    bool clean() const {
        return flipped_cubes.empty() && flipped_stars.empty() &&
               violated_code_parities.empty() &&
               violated_ancilla_parities.empty();
    }

    nlohmann::json to_json(const Lattice &l) const {
        nlohmann::json j;
        j["schema"] = "xcube.syndrome-report/1";
        j["flipped_cubes"] = flipped_cubes;
        auto &fs = j["flipped_stars"] = nlohmann::json::array();
        for (uint32_t s : flipped_stars) {
            fs.push_back(star_site_to_json(l.star_site(s)));
        }
        j["violated_code_parities"] = violated_code_parities;
        j["violated_ancilla_parities"] = violated_ancilla_parities;
        j["classification"] = syndrome_class_name(classification);
        j["cube_values"] = cube_values;
        j["star_values"] = star_values;
        j["code_parity_values"] = code_parity_values;
        j["ancilla_parity_values"] = ancilla_parity_values;
        j["record"] = record;
        j["record_consistent"] = record_consistent;
        return j;
    }
};

/// Extraction inputs beyond the state itself: the record once measured,
/// whether the correction layer is accounted for, and the pending Pauli
/// frame when corrections are tracked classically.
struct ExtractContext {
    const MeasurementRecord *record = nullptr;
    const PauliString *frame = nullptr;
    bool corrected = false;
    bool record_consistent = true;
};

namespace detail {

inline SyndromeClass classify(const SyndromeReport &r, const Lattice &l) {
    if (r.clean()) {
        return SyndromeClass::Clean;
    }
    bool cubes = !r.flipped_cubes.empty(), stars = !r.flipped_stars.empty();
    if (cubes && !stars) {
        // Quadruple (exact single-edge footprint) takes priority over the
        // count-based labels.
        if (r.flipped_cubes.size() == 4) {
            for (std::size_t c = 0; c < l.code_count(); c++) {
                if (l.code_cube_support(c).set_bits() == r.flipped_cubes) {
                    return SyndromeClass::FractonQuadruple;
                }
            }
        }
        if (r.flipped_cubes.size() == 1) {
            return SyndromeClass::IsolatedFracton;
        }
        if (r.flipped_cubes.size() == 2) {
            return SyndromeClass::FractonDipole;
        }
        return SyndromeClass::Unclassified;
    }
    if (stars && !cubes) {
        // A lineon pair: two vertices carrying two crossed stars each,
        // the two planes at each vertex sharing one axis, the same axis
        // at both vertices.
        if (r.flipped_stars.size() == 4) {
            std::map<Vec3, std::vector<Plane>> by_vertex;
            for (uint32_t s : r.flipped_stars) {
                const auto &site = l.star_site(s);
                by_vertex[site.vertex].push_back(site.plane);
            }
            auto shared_axis = [](Plane a, Plane b) -> int {
                // planes as axis pairs: XY={0,1}, XZ={0,2}, YZ={1,2}
                auto axes = [](Plane p) -> std::pair<int, int> {
                    switch (p) {
                    case Plane::XY: return {0, 1};
                    case Plane::XZ: return {0, 2};
                    default: return {1, 2};
                    }
                };
                auto [a1, a2] = axes(a);
                auto [b1, b2] = axes(b);
                if (a1 == b1 || a1 == b2) return a1;
                if (a2 == b1 || a2 == b2) return a2;
                return -1;
            };
            if (by_vertex.size() == 2) {
                int axis = -2;
                bool ok = true;
                for (const auto &[v, planes] : by_vertex) {
                    if (planes.size() != 2) {
                        ok = false;
                        break;
                    }
                    int ax = shared_axis(planes[0], planes[1]);
                    if (ax < 0 || (axis != -2 && ax != axis)) {
                        ok = false;
                        break;
                    }
                    axis = ax;
                }
                if (ok) {
                    return SyndromeClass::LineonPair;
                }
            }
        }
        return SyndromeClass::Unclassified;
    }
    return SyndromeClass::Unclassified;
}

} // namespace detail

/// Evaluates every check on the given state: cube and star stabilizers,
/// the code-centered cluster parities and the ancilla-centered parities.
inline SyndromeReport extract_syndromes(const Tableau &t, const Lattice &l,
                                        const ExtractContext &ctx = {}) {
    SyndromeReport r;
    r.record_consistent = ctx.record_consistent;
    if (ctx.record) {
        r.record = ctx.record->outcomes;
    }
    for (std::size_t a = 0; a < l.ancilla_count(); a++) {
        int v = framed_expectation(t, cube_op(l, a), ctx.frame);
        r.cube_values.push_back(v);
        int expected = ctx.corrected
                           ? +1
                           : (ctx.record ? ctx.record->outcomes[a] : 0);
        if (expected != 0 && v != expected) {
            r.flipped_cubes.push_back(uint32_t(a));
        }
    }
    for (std::size_t s = 0; s < l.star_count(); s++) {
        int v = framed_expectation(t, star_op(l, s), ctx.frame);
        r.star_values.push_back(v);
        if (v == -1) {
            r.flipped_stars.push_back(uint32_t(s));
        }
    }
    for (std::size_t c = 0; c < l.code_count(); c++) {
        // The 5-body code-centered checks need the ancilla Z context, so
        // they are live on the cluster state and inapplicable (0) once
        // the ancillae are read out.
        int v = ctx.record
                    ? 0
                    : framed_expectation(t, cluster_op_code(l, c), ctx.frame);
        r.code_parity_values.push_back(v);
        if (v == -1) {
            r.violated_code_parities.push_back(uint32_t(c));
        }
        // The ancilla-centered parities are X products: read them from
        // the record once measured (identical to the operator expectation
        // under X-basis readout, and independent of the measurement
        // convention the emitted circuit used).
        int w;
        if (ctx.record) {
            w = +1;
            l.code_cube_support(c).for_each_set(
                [&](std::size_t a) { w *= ctx.record->outcomes[a]; });
        } else {
            w = framed_expectation(t, ancilla_parity_op(l, c), ctx.frame);
        }
        r.ancilla_parity_values.push_back(w);
        if (w == -1 && l.ancilla_parity_defined(c)) {
            r.violated_ancilla_parities.push_back(uint32_t(c));
        }
    }
    r.classification = detail::classify(r, l);
    return r;
}

/// Proposed explanation of a report, or the honest refusal.
struct DecodeOutcome {
    enum class Kind : uint8_t { None, Ambiguous, Proposal };
    Kind kind = Kind::None;
    ErrorEvent event;
    std::string note;
};

/// One staged pipeline run with error injection:
///   prepare -> [pre events] -> measure -> solve + correct -> [post
///   events] -> verify/extract.
/// An inconsistent record skips the correction; the final report then
/// reads relative to the recorded outcomes, which is where an isolated
/// fracton shows up.
class Simulation {
  public:
    struct Result {
        uint64_t seed = 0;
        Strategy strategy = Strategy::Movement12;
        bool pauli_frame_mode = false;
        MeasurementRecord record;
        bool record_consistent = true;
        CorrectionFrame frame;
        StabilizerReport report;
        SyndromeReport syndromes;
        std::vector<ErrorEvent> injected;

        bool all_plus() const { return report.all_plus; }

        nlohmann::json to_json(const Lattice &l) const {
            nlohmann::json j;
            j["schema"] = "xcube.run-report/1";
            j["lattice"] = spec_to_json(l.spec());
            j["strategy"] = strategy_name(strategy);
            j["seed"] = seed;
            j["pauli_frame"] = pauli_frame_mode;
            j["record"] = record.to_json();
            j["record_consistent"] = record_consistent;
            j["x_support"] = frame.to_json();
            j["report"] = report.to_json(l);
            j["syndromes"] = syndromes.to_json(l);
            auto &inj = j["injected"] = nlohmann::json::array();
            for (const auto &e : injected) {
                inj.push_back(e.to_json());
            }
            return j;
        }
    };

    Simulation(const Lattice &lattice, Strategy strategy, uint64_t seed,
               bool pauli_frame = false)
        : lattice_(lattice), strategy_(strategy), seed_(seed),
          pauli_frame_(pauli_frame),
          state_(Tableau::plus_state(lattice.total_qubits())) {}

    void inject(const ErrorEvent &e) {
        e.validate(lattice_);
        events_.push_back(e);
    }

    /// Runs the staged pipeline. When `emitted` is given, preparation and
    /// readout execute that circuit (from |0...0>) instead of the direct
    /// gate path; measurement slot a must carry ancilla a's outcome.
    /// Pre-measurement injection is only supported on the direct path.
    Result run(const Circuit *emitted = nullptr) {
        Result res;
        res.seed = seed_;
        res.strategy = strategy_;
        res.pauli_frame_mode = pauli_frame_;
        res.injected = events_;

        Rng rng(seed_);
        if (emitted) {
            for (const auto &e : events_) {
                if (e.stage == Stage::PreMeasurement) {
                    throw std::invalid_argument(
                        "pre-measurement injection is not supported when "
                        "running an emitted circuit");
                }
            }
            if (emitted->num_results() != lattice_.ancilla_count()) {
                throw std::invalid_argument(
                    "emitted circuit must measure every ancilla");
            }
            state_ = Tableau::zero_state(lattice_.total_qubits());
            auto out = run_circuit(state_, *emitted, rng);
            res.record.outcomes = out.results;
        } else {
            state_ = prepare_cluster(lattice_, strategy_);
            for (const auto &e : events_) {
                if (e.stage == Stage::PreMeasurement) {
                    apply_event(state_, lattice_, e);
                }
            }
            res.record = measure_ancillae(state_, lattice_, rng);
        }
        res.record.seed = seed_;

        res.frame.x_support = BitRow(lattice_.code_count());
        try {
            res.frame = solve_correction(lattice_, res.record);
            res.record_consistent = true;
            if (pauli_frame_) {
                frame_pauli_ = res.frame.as_pauli(lattice_);
            } else {
                apply_correction(state_, res.frame);
            }
        } catch (const InconsistentRecordError &) {
            res.record_consistent = false;
        }

        for (const auto &e : events_) {
            if (e.stage == Stage::PostPreparation) {
                apply_event(state_, lattice_, e);
            }
        }

        ctx_.record = &record_storage_;
        record_storage_ = res.record;
        ctx_.frame = (pauli_frame_ && res.record_consistent) ? &frame_pauli_
                                                             : nullptr;
        ctx_.corrected = res.record_consistent;
        ctx_.record_consistent = res.record_consistent;

        res.report = verify_xcube(state_, lattice_, ctx_.frame);
        res.syndromes = extract_syndromes(state_, lattice_, ctx_);
        return res;
    }

    Tableau &state() { return state_; }
    const Lattice &lattice() const { return lattice_; }
    /// Extraction context of the finished run, for follow-on syndrome
    /// reads and mobility traces.
    const ExtractContext &context() const { return ctx_; }

    /// Applies a decode outcome to the finished run and returns the
    /// post-repair report. Code proposals are Pauli gates. Ancilla
    /// proposals flip the recorded outcome, then either run the
    /// correction the solver had refused (tainted periodic record) or,
    /// when a correction is already in, clear the residual cube flips
    /// with a fresh X solve.
    SyndromeReport apply_repair(const DecodeOutcome &out) {
        if (out.kind == DecodeOutcome::Kind::Proposal) {
            if (!out.event.on_ancilla) {
                apply_event(state_, lattice_, out.event);
            } else {
                auto &m = record_storage_.outcomes[out.event.index];
                m = -m;
                if (!ctx_.corrected) {
                    auto frame = solve_correction(lattice_, record_storage_);
                    if (pauli_frame_) {
                        frame_pauli_ = frame.as_pauli(lattice_);
                        ctx_.frame = &frame_pauli_;
                    } else {
                        apply_correction(state_, frame);
                    }
                    ctx_.corrected = true;
                    ctx_.record_consistent = true;
                } else {
                    BitRow residual(lattice_.ancilla_count());
                    for (std::size_t a = 0; a < lattice_.ancilla_count();
                         a++) {
                        residual.set(a, framed_expectation(
                                            state_, cube_op(lattice_, a),
                                            ctx_.frame) != +1);
                    }
                    auto x = lattice_.cube_incidence().solve(residual);
                    if (x) {
                        x->for_each_set(
                            [&](std::size_t c) { state_.apply_x(c); });
                    }
                }
            }
        }
        return extract_syndromes(state_, lattice_, ctx_);
    }

  private:
    const Lattice &lattice_;
    Strategy strategy_;
    uint64_t seed_;
    bool pauli_frame_;
    Tableau state_;
    std::vector<ErrorEvent> events_;
    MeasurementRecord record_storage_;
    PauliString frame_pauli_;
    ExtractContext ctx_;
};

/// Single-error decoder. Matches the report against the footprint of
/// every weight-1 error: a cube pattern equal to an edge's incident set
/// proposes X there, a star pattern equal to an edge's coboundary
/// proposes Z, both together on one edge propose Y, and an inconsistent
/// record is explained by the unique ancilla outcome flip that restores
/// solvability. Syndrome-equivalent candidate edges (possible on wrapped
/// L=2 fixtures) differ by operators that flip no check, so the lowest
/// index is proposed and the correction still restores Clean.
inline DecodeOutcome correct_single(const SyndromeReport &r,
                                    const Lattice &l) {
    DecodeOutcome out;
    if (r.clean() && r.record_consistent) {
        out.kind = DecodeOutcome::Kind::None;
        out.note = "none";
        return out;
    }

    if (!r.record_consistent) {
        if (r.record.empty()) {
            out.kind = DecodeOutcome::Kind::Ambiguous;
            out.note = "inconsistent record without outcomes";
            return out;
        }
        BitRow b(l.ancilla_count());
        for (std::size_t a = 0; a < l.ancilla_count(); a++) {
            b.set(a, r.record[a] < 0);
        }
        auto m = l.cube_incidence();
        std::vector<uint32_t> candidates;
        for (std::size_t a = 0; a < l.ancilla_count(); a++) {
            BitRow flipped = b;
            flipped.flip(a);
            if (m.solve(flipped)) {
                candidates.push_back(uint32_t(a));
            }
        }
        if (candidates.size() == 1) {
            out.kind = DecodeOutcome::Kind::Proposal;
            out.event = ErrorEvent{'Z', true, candidates[0],
                                   Stage::PreMeasurement};
            out.note = "flip ancilla outcome and re-solve";
            return out;
        }
        out.kind = DecodeOutcome::Kind::Ambiguous;
        out.note = candidates.empty()
                       ? "no single outcome flip restores consistency"
                       : "multiple outcome flips restore consistency";
        return out;
    }

    bool cubes = !r.flipped_cubes.empty(), stars = !r.flipped_stars.empty();

    // A flipped ancilla outcome on an open lattice never trips the
    // solver (the record stays solvable), so it surfaces afterwards as
    // one wrong cube plus exactly the parity stains of the flipped
    // entry. That evidence pattern disambiguates it from a boundary
    // code X with the same single-cube footprint; with no defined
    // parities around the cube the two explanations repair identically
    // and the outcome flip is proposed.
    if (!stars && r.flipped_cubes.size() == 1 && !r.record.empty()) {
        uint32_t a = r.flipped_cubes[0];
        std::vector<uint32_t> expect_parity;
        for (std::size_t c = 0; c < l.code_count(); c++) {
            if (l.ancilla_parity_defined(c) && l.code_cube_support(c).get(a)) {
                expect_parity.push_back(uint32_t(c));
            }
        }
        if (r.violated_ancilla_parities == expect_parity) {
            out.kind = DecodeOutcome::Kind::Proposal;
            out.event = ErrorEvent{'Z', true, a, Stage::PreMeasurement};
            out.note = "single flipped ancilla outcome";
            return out;
        }
    }
    if (!r.violated_ancilla_parities.empty()) {
        // Code errors cannot touch the X-product parities.
        out.kind = DecodeOutcome::Kind::Ambiguous;
        out.note = "parity violations match no single-error pattern";
        return out;
    }

    std::vector<uint32_t> cube_match, star_match;
    for (std::size_t c = 0; c < l.code_count(); c++) {
        if (cubes && l.code_cube_support(c).set_bits() == r.flipped_cubes) {
            cube_match.push_back(uint32_t(c));
        }
        if (stars && l.code_stars(c) == r.flipped_stars) {
            star_match.push_back(uint32_t(c));
        }
    }
    if (cubes && stars) {
        // Y explanation: one edge carrying both footprints.
        std::vector<uint32_t> both;
        std::set_intersection(cube_match.begin(), cube_match.end(),
                              star_match.begin(), star_match.end(),
                              std::back_inserter(both));
        if (!both.empty()) {
            out.kind = DecodeOutcome::Kind::Proposal;
            out.event =
                ErrorEvent{'Y', false, both[0], Stage::PostPreparation};
            out.note = "single code-qubit Y";
            return out;
        }
        out.kind = DecodeOutcome::Kind::Ambiguous;
        out.note = "no single error explains both syndrome families";
        return out;
    }
    if (cubes) {
        if (!cube_match.empty()) {
            out.kind = DecodeOutcome::Kind::Proposal;
            out.event = ErrorEvent{'X', false, cube_match[0],
                                   Stage::PostPreparation};
            out.note = "single code-qubit X";
            return out;
        }
    } else if (stars) {
        if (!star_match.empty()) {
            out.kind = DecodeOutcome::Kind::Proposal;
            out.event = ErrorEvent{'Z', false, star_match[0],
                                   Stage::PostPreparation};
            out.note = "single code-qubit Z";
            return out;
        }
    }
    out.kind = DecodeOutcome::Kind::Ambiguous;
    out.note = "no single-error explanation matches the report";
    return out;
}

/// Translates a two-cube excitation by applying X along `path`, one
/// report per step. Steps must touch the current excitation; moves
/// within the plane perpendicular to the dipole keep the count at two,
/// anything else splits it.
inline std::vector<SyndromeReport>
move_fracton_dipole(Tableau &t, const Lattice &l, const ExtractContext &ctx,
                    std::pair<uint32_t, uint32_t> dipole,
                    std::span<const uint32_t> path) {
    std::vector<SyndromeReport> trace;
    trace.push_back(extract_syndromes(t, l, ctx));
    std::vector<uint32_t> want{std::min(dipole.first, dipole.second),
                               std::max(dipole.first, dipole.second)};
    if (trace.back().flipped_cubes != want) {
        throw std::invalid_argument(
            "state does not carry the requested two-cube excitation");
    }
    for (uint32_t e : path) {
        if (e >= l.code_count()) {
            throw std::invalid_argument("path edge out of range");
        }
        bool adjacent = false;
        for (uint32_t a : trace.back().flipped_cubes) {
            adjacent |= l.cube_support(a).get(e);
        }
        if (!adjacent) {
            throw std::invalid_argument(
                "invalid chain: path edge touches no current excitation");
        }
        t.apply_x(e);
        trace.push_back(extract_syndromes(t, l, ctx));
    }
    return trace;
}

/// Walks one lineon endpoint along `axis` by `steps` Z applications,
/// one report per step. On-axis steps translate the endpoint; an
/// off-axis walk leaves extra star violations behind.
inline std::vector<SyndromeReport>
move_lineon(Tableau &t, const Lattice &l, const ExtractContext &ctx,
            Vec3 endpoint, Axis axis, int steps) {
    std::vector<SyndromeReport> trace;
    trace.push_back(extract_syndromes(t, l, ctx));
    {
        int at_endpoint = 0;
        for (uint32_t s : trace.back().flipped_stars) {
            // Compare wrapped coordinates via the star site lookup.
            const auto &site = l.star_site(s);
            try {
                if (site == l.star_site(l.star_index({endpoint, site.plane})))
                    at_endpoint++;
            } catch (const UndefinedStabilizerError &) {
            }
        }
        if (at_endpoint != 2) {
            throw std::invalid_argument(
                "endpoint does not carry a lineon (expected two crossed "
                "star violations)");
        }
    }
    Vec3 v = endpoint;
    for (int k = 0; k < steps; k++) {
        uint32_t e = l.code_index(CodeQubitId{v, axis});
        t.apply_z(e);
        switch (axis) {
        case Axis::X: v.x++; break;
        case Axis::Y: v.y++; break;
        case Axis::Z: v.z++; break;
        }
        trace.push_back(extract_syndromes(t, l, ctx));
    }
    return trace;
}

} // namespace xcube
