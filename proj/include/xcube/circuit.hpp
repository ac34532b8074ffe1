#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xcube/tableau.hpp"

namespace xcube {

struct CircuitParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GateKind : uint8_t { H, X, Z, CZ, CNOT, CZ12, MX, MZ, TICK };

inline const char *gate_name(GateKind k) {
    switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::CZ: return "CZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ12: return "CZ12";
    case GateKind::MX: return "MX";
    case GateKind::MZ: return "MZ";
    case GateKind::TICK: return "TICK";
    }
    return "?";
}

/// One gate operation. CZ12 stores [control, targets...]; measurements
/// store one qubit plus the record slot the outcome lands in.
struct GateOp {
    GateKind kind;
    std::vector<uint32_t> qubits;
    int result_slot = -1;

    bool operator==(const GateOp &) const = default;
};

/// Timestep-ordered gate list plus layout metadata.
///
/// Text format, one op per line, whitespace-delimited, '#' comments:
///
///   QUBITS 16 CODE 12        header; CODE is optional
///   FORM cz                  optional metadata (cz | dynamic-cnot)
///   DEPTH 12                 optional metadata (scheduled gate rounds)
///   H a0
///   CZ c3 a1
///   CNOT a1 c3
///   CZ12 a5 : c0 c1 c2 c3
///   MX a0 -> m0
///   MZ q4 -> m3
///   TICK
///
/// Operands: q<i> is a global qubit index, c<i> a code-qubit index
/// (global index i), a<i> an ancilla index (global code_count + i, valid
/// only when CODE is declared). Emission uses c/a names when code_count
/// is known and q otherwise, so emit(parse(emit(c))) is byte-identical.
struct Circuit {
    uint32_t num_qubits = 0;
    uint32_t code_count = 0; // 0 = unknown; operands render as q<i>
    std::string form;        // "cz", "dynamic-cnot", or empty
    int depth = -1;          // scheduled gate rounds; -1 = unspecified
    std::vector<GateOp> ops;

    uint32_t num_results() const {
        int m = -1;
        for (const auto &op : ops) {
            m = std::max(m, op.result_slot);
        }
        return uint32_t(m + 1);
    }

    void validate() const {
        std::set<int> slots;
        for (const auto &op : ops) {
            std::set<uint32_t> seen;
            for (uint32_t q : op.qubits) {
                if (q >= num_qubits) {
                    throw std::invalid_argument(
                        "gate operand out of range: " + std::to_string(q));
                }
                if (!seen.insert(q).second) {
                    throw std::invalid_argument(
                        "gate operands must be distinct");
                }
            }
            switch (op.kind) {
            case GateKind::H:
            case GateKind::X:
            case GateKind::Z:
                expect_operands(op, 1);
                break;
            case GateKind::CZ:
            case GateKind::CNOT:
                expect_operands(op, 2);
                break;
            case GateKind::CZ12:
                if (op.qubits.size() < 2 || op.qubits.size() > 13) {
                    throw std::invalid_argument(
                        "CZ12 takes a control and 1..12 targets");
                }
                break;
            case GateKind::MX:
            case GateKind::MZ:
                expect_operands(op, 1);
                if (op.result_slot < 0 ||
                    !slots.insert(op.result_slot).second) {
                    throw std::invalid_argument(
                        "measurement slots must be unique and non-negative");
                }
                break;
            case GateKind::TICK:
                expect_operands(op, 0);
                break;
            }
        }
    }

    std::string to_text() const {
        std::ostringstream out;
        out << "QUBITS " << num_qubits;
        if (code_count > 0) {
            out << " CODE " << code_count;
        }
        out << '\n';
        if (!form.empty()) {
            out << "FORM " << form << '\n';
        }
        if (depth >= 0) {
            out << "DEPTH " << depth << '\n';
        }
        for (const auto &op : ops) {
            if (op.kind == GateKind::TICK) {
                out << "TICK\n";
                continue;
            }
            out << gate_name(op.kind);
            if (op.kind == GateKind::CZ12) {
                out << ' ' << operand_name(op.qubits[0]) << " :";
                for (std::size_t i = 1; i < op.qubits.size(); i++) {
                    out << ' ' << operand_name(op.qubits[i]);
                }
            } else {
                for (uint32_t q : op.qubits) {
                    out << ' ' << operand_name(q);
                }
            }
            if (op.kind == GateKind::MX || op.kind == GateKind::MZ) {
                out << " -> m" << op.result_slot;
            }
            out << '\n';
        }
        return out.str();
    }

    static Circuit from_text(std::string_view text);

  private:
    static void expect_operands(const GateOp &op, std::size_t n) {
        if (op.qubits.size() != n) {
            throw std::invalid_argument(std::string("bad operand count for ") +
                                        gate_name(op.kind));
        }
    }

    std::string operand_name(uint32_t q) const {
        if (code_count == 0) {
            return "q" + std::to_string(q);
        }
        if (q < code_count) {
            return "c" + std::to_string(q);
        }
        return "a" + std::to_string(q - code_count);
    }
};

namespace detail {

inline std::vector<std::string> tokenize_line(std::string_view line) {
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : line) {
        if (ch == '#') {
            break;
        }
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            if (!cur.empty()) {
                toks.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) {
        toks.push_back(std::move(cur));
    }
    return toks;
}

inline uint32_t parse_uint(const std::string &tok, const char *what) {
    if (tok.empty() ||
        !std::all_of(tok.begin(), tok.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
        throw CircuitParseError(std::string("expected ") + what + ", got '" +
                                tok + "'");
    }
    return uint32_t(std::stoul(tok));
}

} // namespace detail

inline Circuit Circuit::from_text(std::string_view text) {
    Circuit c;
    bool have_header = false;
    uint32_t max_index = 0;

    auto parse_operand = [&](const std::string &tok) -> uint32_t {
        if (tok.size() < 2) {
            throw CircuitParseError("bad operand '" + tok + "'");
        }
        uint32_t idx = detail::parse_uint(tok.substr(1), "qubit index");
        uint32_t global;
        switch (tok[0]) {
        case 'q':
            global = idx;
            break;
        case 'c':
            global = idx;
            break;
        case 'a':
            if (c.code_count == 0) {
                throw CircuitParseError(
                    "operand '" + tok + "' needs a CODE declaration");
            }
            global = c.code_count + idx;
            break;
        default:
            throw CircuitParseError("bad operand prefix in '" + tok + "'");
        }
        max_index = std::max(max_index, global);
        return global;
    };

    std::size_t pos = 0, lineno = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        lineno++;
        auto toks = detail::tokenize_line(line);
        if (toks.empty()) {
            continue;
        }
        try {
            const std::string &head = toks[0];
            if (head == "QUBITS") {
                if (toks.size() != 2 && !(toks.size() == 4 && toks[2] == "CODE")) {
                    throw CircuitParseError("QUBITS line malformed");
                }
                c.num_qubits = detail::parse_uint(toks[1], "qubit count");
                if (toks.size() == 4) {
                    c.code_count = detail::parse_uint(toks[3], "code count");
                }
                have_header = true;
                continue;
            }
            if (head == "FORM") {
                if (toks.size() != 2) {
                    throw CircuitParseError("FORM line malformed");
                }
                c.form = toks[1];
                continue;
            }
            if (head == "DEPTH") {
                if (toks.size() != 2) {
                    throw CircuitParseError("DEPTH line malformed");
                }
                c.depth = int(detail::parse_uint(toks[1], "depth"));
                continue;
            }
            if (head == "TICK") {
                if (toks.size() != 1) {
                    throw CircuitParseError("TICK takes no operands");
                }
                c.ops.push_back({GateKind::TICK, {}, -1});
                continue;
            }
            GateKind kind;
            if (head == "H") kind = GateKind::H;
            else if (head == "X") kind = GateKind::X;
            else if (head == "Z") kind = GateKind::Z;
            else if (head == "CZ") kind = GateKind::CZ;
            else if (head == "CNOT") kind = GateKind::CNOT;
            else if (head == "CZ12") kind = GateKind::CZ12;
            else if (head == "MX") kind = GateKind::MX;
            else if (head == "MZ") kind = GateKind::MZ;
            else {
                throw CircuitParseError("unknown op '" + head + "'");
            }

            GateOp op;
            op.kind = kind;
            if (kind == GateKind::CZ12) {
                if (toks.size() < 4 || toks[2] != ":") {
                    throw CircuitParseError(
                        "CZ12 syntax: CZ12 <control> : <targets...>");
                }
                op.qubits.push_back(parse_operand(toks[1]));
                for (std::size_t i = 3; i < toks.size(); i++) {
                    op.qubits.push_back(parse_operand(toks[i]));
                }
            } else if (kind == GateKind::MX || kind == GateKind::MZ) {
                if (toks.size() != 4 || toks[2] != "->" || toks[3].empty() ||
                    toks[3][0] != 'm') {
                    throw CircuitParseError(
                        "measurement syntax: MX <qubit> -> m<slot>");
                }
                op.qubits.push_back(parse_operand(toks[1]));
                op.result_slot =
                    int(detail::parse_uint(toks[3].substr(1), "result slot"));
            } else {
                for (std::size_t i = 1; i < toks.size(); i++) {
                    op.qubits.push_back(parse_operand(toks[i]));
                }
            }
            c.ops.push_back(std::move(op));
        } catch (const CircuitParseError &e) {
            throw CircuitParseError("line " + std::to_string(lineno) + ": " +
                                    e.what());
        }
    }
    if (!have_header) {
        c.num_qubits = c.ops.empty() ? 0 : max_index + 1;
    } else if (max_index >= c.num_qubits && !c.ops.empty()) {
        throw CircuitParseError("operand exceeds declared QUBITS");
    }
    c.validate();
    return c;
}

/// Outcomes of one circuit execution, indexed by measurement slot.
struct RunOutcome {
    std::vector<int> results;         // +1 / -1, 0 = slot never written
    std::vector<bool> deterministic;
};

/// Runs the circuit on any backend exposing the apply_* gate methods and
/// measure(q, basis, rng) (Tableau or StateVector).
template <typename State>
RunOutcome run_circuit(State &state, const Circuit &c, Rng &rng) {
    c.validate();
    if (state.num_qubits() != c.num_qubits) {
        throw std::invalid_argument("backend size does not match circuit");
    }
    RunOutcome out;
    out.results.assign(c.num_results(), 0);
    out.deterministic.assign(c.num_results(), false);
    for (const auto &op : c.ops) {
        switch (op.kind) {
        case GateKind::H:
            state.apply_h(op.qubits[0]);
            break;
        case GateKind::X:
            state.apply_x(op.qubits[0]);
            break;
        case GateKind::Z:
            state.apply_z(op.qubits[0]);
            break;
        case GateKind::CZ:
            state.apply_cz(op.qubits[0], op.qubits[1]);
            break;
        case GateKind::CNOT:
            state.apply_cnot(op.qubits[0], op.qubits[1]);
            break;
        case GateKind::CZ12:
            state.apply_cz_multi(
                op.qubits[0],
                std::span<const uint32_t>(op.qubits).subspan(1));
            break;
        case GateKind::MX:
        case GateKind::MZ: {
            auto r = state.measure(
                op.qubits[0],
                op.kind == GateKind::MX ? Basis::X : Basis::Z, rng);
            out.results[op.result_slot] = r.outcome;
            out.deterministic[op.result_slot] = r.deterministic;
            break;
        }
        case GateKind::TICK:
            break;
        }
    }
    return out;
}

} // namespace xcube
