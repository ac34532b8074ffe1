// Command-line front end: build -> schedule -> simulate -> verify ->
// inject -> report, with JSON output for downstream tooling.
//
// Exit codes: 0 on success (prepare: all stabilizers +1 and a consistent
// record), 1 on a detected violation, inconsistent record, validation
// mismatch or I/O failure, 2 on usage or configuration errors.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xcube/errors.hpp"

namespace {

using nlohmann::json;
using namespace xcube;

struct LatticeOpts {
    int lx = 2, ly = 2, lz = 2;
    bool periodic = false;
    bool one_storey = false;

    LatticeSpec spec() const {
        LatticeSpec s;
        s.lx = lx;
        s.ly = ly;
        s.lz = lz;
        s.boundary = one_storey ? Boundary::OneStoreyOpen
                                : Boundary::Periodic3D;
        return s;
    }
};

void add_lattice_opts(CLI::App *cmd, LatticeOpts &o) {
    cmd->add_option("--lx", o.lx, "cubes along x");
    cmd->add_option("--ly", o.ly, "cubes along y");
    cmd->add_option("--lz", o.lz, "cubes along z");
    auto *p = cmd->add_flag("--periodic", o.periodic,
                            "periodic boundaries (default)");
    cmd->add_flag("--one-storey", o.one_storey,
                  "open one-storey slab (forces lz = 1)")
        ->excludes(p);
}

Strategy parse_strategy(const std::string &s) {
    if (s == "movement") {
        return Strategy::Movement12;
    }
    if (s == "cz12") {
        return Strategy::CZ12Colored;
    }
    throw std::invalid_argument("--strategy expects movement or cz12");
}

CircuitForm parse_form(const std::string &s) {
    if (s == "cz") {
        return CircuitForm::CZ;
    }
    if (s == "dynamic-cnot") {
        return CircuitForm::DynamicCNOT;
    }
    throw std::invalid_argument("--form expects cz or dynamic-cnot");
}

ErrorEvent parse_inject(const std::string &text) {
    auto bad = [&] {
        return std::invalid_argument(
            "bad --inject '" + text +
            "': expected <pauli>:<target>:<stage>, e.g. X:c5:post or "
            "Z:a3:pre");
    };
    auto c1 = text.find(':');
    auto c2 = text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        throw bad();
    }
    std::string pauli = text.substr(0, c1);
    std::string target = text.substr(c1 + 1, c2 - c1 - 1);
    std::string stage = text.substr(c2 + 1);
    if (pauli.size() != 1 || target.size() < 2) {
        throw bad();
    }
    ErrorEvent e;
    e.pauli = pauli[0];
    if (target[0] != 'a' && target[0] != 'c') {
        throw bad();
    }
    e.on_ancilla = target[0] == 'a';
    try {
        e.index = uint32_t(std::stoul(target.substr(1)));
    } catch (const std::exception &) {
        throw bad();
    }
    if (stage == "pre") {
        e.stage = Stage::PreMeasurement;
    } else if (stage == "post") {
        e.stage = Stage::PostPreparation;
    } else {
        throw bad();
    }
    return e;
}

int write_output(const std::string &path, const std::string &content) {
    if (path == "-") {
        std::cout << content;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open '" << path << "' for writing\n";
        return 1;
    }
    out << content;
    return out.good() ? 0 : 1;
}

int cmd_prepare(const LatticeOpts &lo, const std::string &strategy,
                uint64_t seed, bool pauli_frame,
                const std::vector<std::string> &injects,
                const std::string &out_path) {
    auto lattice = Lattice::build(lo.spec());
    Simulation sim(lattice, parse_strategy(strategy), seed, pauli_frame);
    for (const auto &text : injects) {
        sim.inject(parse_inject(text));
    }
    auto t0 = std::chrono::steady_clock::now();
    auto res = sim.run();
    auto t1 = std::chrono::steady_clock::now();

    json j = res.to_json(lattice);
    j["timing_ms"] =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (int rc = write_output(out_path, j.dump(2) + "\n")) {
        return rc;
    }
    if (!res.record_consistent) {
        std::cerr << "measurement record violates constraints (ancilla "
                     "measurement error detected)\n";
        return 1;
    }
    if (!res.all_plus()) {
        std::cerr << "stabilizer verification failed: state is not the "
                     "all-(+1) eigenstate\n";
        return 1;
    }
    return 0;
}

int cmd_sweep(const LatticeOpts &lo, const std::string &strategy,
              uint64_t seed, const std::string &pauli,
              const std::string &targets, const std::string &stage,
              const std::vector<std::string> &injects,
              const std::string &out_path) {
    auto lattice = Lattice::build(lo.spec());
    Strategy strat = parse_strategy(strategy);

    std::vector<ErrorEvent> events;
    for (const auto &text : injects) {
        events.push_back(parse_inject(text));
    }
    if (!pauli.empty()) {
        if (pauli.size() != 1) {
            throw std::invalid_argument("--pauli expects X, Y or Z");
        }
        Stage st = stage == "pre" ? Stage::PreMeasurement
                                  : Stage::PostPreparation;
        bool on_ancilla = targets == "ancilla";
        std::size_t limit =
            on_ancilla ? lattice.ancilla_count() : lattice.code_count();
        for (uint32_t i = 0; i < limit; i++) {
            events.push_back({pauli[0], on_ancilla, i, st});
        }
    }

    // Independent runs on substream seeds: identical output under any
    // parallelism degree. The lattice is shared read-only.
    std::vector<json> line_store(events.size());
    auto run_one = [&](std::size_t i) {
        Simulation sim(lattice, strat, substream_seed(seed, i));
        sim.inject(events[i]);
        auto res = sim.run();
        bool was_detected =
            !res.syndromes.clean() || !res.record_consistent;

        auto outcome = correct_single(res.syndromes, lattice);
        bool corrected_clean = false;
        json decode;
        switch (outcome.kind) {
        case DecodeOutcome::Kind::None:
            decode["kind"] = "none";
            break;
        case DecodeOutcome::Kind::Ambiguous:
            decode["kind"] = "ambiguous";
            break;
        case DecodeOutcome::Kind::Proposal:
            decode["kind"] = "proposal";
            decode["event"] = outcome.event.to_json();
            try {
                corrected_clean = sim.apply_repair(outcome).clean();
            } catch (const InconsistentRecordError &) {
            }
            break;
        }
        decode["note"] = outcome.note;

        json line;
        line["index"] = i;
        line["injected"] = events[i].to_json();
        line["classification"] =
            syndrome_class_name(res.syndromes.classification);
        line["record_consistent"] = res.record_consistent;
        line["all_plus"] = res.all_plus();
        line["detected"] = was_detected;
        line["decode"] = decode;
        line["corrected_clean"] = corrected_clean;
        line["syndromes"] = res.syndromes.to_json(lattice);
        line_store[i] = std::move(line);
    };
    std::size_t n_threads = std::min<std::size_t>(
        std::max(1u, std::thread::hardware_concurrency()), events.size());
    if (n_threads > 1) {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; t++) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < events.size(); i += n_threads) {
                    run_one(i);
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
    } else {
        for (std::size_t i = 0; i < events.size(); i++) {
            run_one(i);
        }
    }

    std::string lines;
    std::size_t detected = 0, decoded = 0;
    for (const auto &line : line_store) {
        detected += line.at("detected").get<bool>();
        decoded += line.at("corrected_clean").get<bool>();
        lines += line.dump() + "\n";
    }

    Simulation reference(lattice, strat, seed);
    auto ref = reference.run();
    json summary;
    summary["summary"] = {{"runs", events.size()},
                          {"detected", detected},
                          {"decoded", decoded},
                          {"reference_all_plus", ref.all_plus()},
                          {"reference_clean", ref.syndromes.clean()}};
    lines += summary.dump() + "\n";
    return write_output(out_path, lines);
}

int cmd_emit(const LatticeOpts &lo, const std::string &strategy,
             const std::string &form, uint64_t seed, bool validate,
             const std::string &out_path,
             const std::string &schedule_out) {
    auto lattice = Lattice::build(lo.spec());
    Strategy strat = parse_strategy(strategy);
    CircuitForm cform = parse_form(form);
    auto schedule = strat == Strategy::Movement12
                        ? movement_schedule(lattice)
                        : cz12_schedule(lattice);
    auto circuit = emit_circuit(schedule, lattice, cform);
    auto text = circuit.to_text();
    if (int rc = write_output(out_path, text)) {
        return rc;
    }
    if (!schedule_out.empty()) {
        auto j = schedule_to_json(schedule, lattice);
        if (int rc = write_output(schedule_out, j.dump(2) + "\n")) {
            return rc;
        }
    }
    if (!validate) {
        return 0;
    }

    auto reparsed = Circuit::from_text(text);
    if (reparsed.to_text() != text) {
        std::cerr << "validate: re-emission differs from the original\n";
        return 1;
    }
    Simulation direct(lattice, strat, seed);
    auto direct_res = direct.run();
    Simulation via_circuit(lattice, strat, seed);
    auto circuit_res = via_circuit.run(&reparsed);
    if (direct_res.to_json(lattice) != circuit_res.to_json(lattice)) {
        std::cerr << "validate: circuit-path report differs from the "
                     "direct pipeline\n";
        return 1;
    }
    std::cerr << "validate: ok (depth " << circuit.depth << ", "
              << reparsed.ops.size() << " ops)\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"X-cube ground-state preparation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "INI config file; keys mirror the flags under a "
                   "[prepare] / [sweep-errors] / [emit] section");

    LatticeOpts lo_prepare, lo_sweep, lo_emit;
    std::string strategy_prepare = "movement", strategy_sweep = "movement",
                strategy_emit = "movement";
    uint64_t seed_prepare = 0, seed_sweep = 0, seed_emit = 0;
    bool pauli_frame = false, validate = false;
    std::string out_prepare = "-", out_sweep = "-", out_emit = "-";
    std::vector<std::string> injects_prepare, injects_sweep;
    std::string pauli, targets = "code", stage = "post", form = "cz";
    std::string schedule_out;

    auto *prepare =
        app.add_subcommand("prepare", "run the full preparation pipeline "
                                      "and write a run report");
    add_lattice_opts(prepare, lo_prepare);
    prepare->add_option("--strategy", strategy_prepare, "movement | cz12");
    prepare->add_option("--seed", seed_prepare, "rng seed");
    prepare->add_flag("--pauli-frame", pauli_frame,
                      "track the correction classically instead of "
                      "applying X gates");
    prepare->add_option("--inject", injects_prepare,
                        "<pauli>:<target>:<stage>, e.g. X:c5:post");
    prepare->add_option("--out", out_prepare, "output path or -");

    auto *sweep = app.add_subcommand(
        "sweep-errors", "run one pipeline per injected single error and "
                        "write JSON-lines reports");
    add_lattice_opts(sweep, lo_sweep);
    sweep->add_option("--strategy", strategy_sweep, "movement | cz12");
    sweep->add_option("--seed", seed_sweep,
                      "master seed; run i uses substream i");
    sweep->add_option("--pauli", pauli,
                      "enumerate every target with this pauli (X|Y|Z)");
    sweep->add_option("--targets", targets, "code | ancilla")
        ->check(CLI::IsMember({"code", "ancilla"}));
    sweep->add_option("--stage", stage, "pre | post")
        ->check(CLI::IsMember({"pre", "post"}));
    sweep->add_option("--inject", injects_sweep,
                      "explicit error script entries");
    sweep->add_option("--out", out_sweep, "output path or -");

    auto *emit = app.add_subcommand(
        "emit", "write the scheduled preparation circuit as text");
    add_lattice_opts(emit, lo_emit);
    emit->add_option("--strategy", strategy_emit, "movement | cz12");
    emit->add_option("--form", form, "cz | dynamic-cnot");
    emit->add_option("--seed", seed_emit, "seed for --validate runs");
    emit->add_flag("--validate", validate,
                   "re-parse and re-simulate, asserting report equality");
    emit->add_option("--out", out_emit, "output path or -");
    emit->add_option("--schedule-out", schedule_out,
                     "also write the gate schedule as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (prepare->parsed()) {
            return cmd_prepare(lo_prepare, strategy_prepare, seed_prepare,
                               pauli_frame, injects_prepare, out_prepare);
        }
        if (sweep->parsed()) {
            return cmd_sweep(lo_sweep, strategy_sweep, seed_sweep, pauli,
                             targets, stage, injects_sweep, out_sweep);
        }
        if (emit->parsed()) {
            return cmd_emit(lo_emit, strategy_emit, form, seed_emit,
                            validate, out_emit, schedule_out);
        }
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ColoringError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
