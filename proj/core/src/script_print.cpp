#include <cctype>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "fpd/queries.hpp"
#include "fpd/script.hpp"

namespace fpd::script {

namespace {

const std::unordered_set<std::string_view> kReserved = {
    "process", "product",  "energy", "information", "operator",
    "resource", "fork",    "join",   "decision",    "merge",
    "flow",     "usage",   "char",   "unit",        "in",
    "out",      "internal", "refines", "decompose", "id",
    "boundary",
};

bool is_bare(const std::string& text) {
    if (text.empty() || kReserved.count(text)) return false;
    if (!std::isalpha(static_cast<unsigned char>(text[0])) && text[0] != '_')
        return false;
    for (char c : text) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return false;
    }
    return true;
}

void append_quoted(const std::string& text, std::string& out) {
    out += '"';
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    out += '"';
}

void append_name(const std::string& text, std::string& out) {
    if (is_bare(text)) out += text;
    else append_quoted(text, out);
}

void indent(int depth, std::string& out) {
    out.append(static_cast<size_t>(depth) * 4, ' ');
}

void append_characteristics(const std::vector<Characteristic>& chars,
                            int depth, std::string& out) {
    if (chars.empty()) return;
    out += " {\n";
    for (const auto& ch : chars) {
        indent(depth + 1, out);
        out += "char ";
        append_name(ch.identification.short_name, out);
        out += " id=";
        append_name(ch.identification.unique_ident, out);
        out += " = ";
        append_quoted(ch.value, out);
        if (!ch.unit.empty()) {
            out += " unit ";
            append_quoted(ch.unit, out);
        }
        append_characteristics(ch.children, depth + 1, out);
        out += '\n';
    }
    indent(depth, out);
    out += '}';
}

std::string_view state_keyword(StateKind kind) {
    switch (kind) {
        case StateKind::Product: return "product";
        case StateKind::Energy: return "energy";
        case StateKind::Information: return "information";
    }
    return "product";
}

std::string_view connector_keyword(ConnectorKind kind) {
    switch (kind) {
        case ConnectorKind::Fork: return "fork";
        case ConnectorKind::Join: return "join";
        case ConnectorKind::Decision: return "decision";
        case ConnectorKind::Merge: return "merge";
    }
    return "fork";
}

void append_process(const Process& process, std::string& out) {
    out += "process ";
    append_name(process.identification.short_name, out);
    out += " id=";
    append_name(process.identification.unique_ident, out);
    if (!process.system_boundary_id.empty()) {
        out += " boundary=";
        append_name(process.system_boundary_id, out);
    }
    out += " {\n";

    // Boundary direction keywords are derived from the flows; states
    // violating the one-direction rule print as 'in' and are reported by
    // the validator, not the printer.
    auto boundary = boundary_states(process);
    std::unordered_map<const StateNode*, std::string_view> directions;
    for (const auto* state : boundary.outputs) directions[state] = "out";

    for (const auto& state : process.states) {
        indent(1, out);
        out += state_keyword(state.kind);
        out += ' ';
        append_name(state.identification.short_name, out);
        out += " id=";
        append_name(state.identification.unique_ident, out);
        out += ' ';
        if (state.placement == Placement::Intermediate) {
            out += "internal";
        } else {
            auto it = directions.find(&state);
            out += it != directions.end() ? it->second : "in";
        }
        if (state.refines) {
            out += " refines ";
            append_name(*state.refines, out);
        }
        append_characteristics(state.characteristics, 1, out);
        out += '\n';
    }
    for (const auto& op : process.operators) {
        indent(1, out);
        out += "operator ";
        append_name(op.identification.short_name, out);
        out += " id=";
        append_name(op.identification.unique_ident, out);
        if (op.decomposition) {
            out += " decompose ";
            append_name(*op.decomposition, out);
        }
        append_characteristics(op.characteristics, 1, out);
        out += '\n';
    }
    for (const auto& resource : process.resources) {
        indent(1, out);
        out += "resource ";
        append_name(resource.identification.short_name, out);
        out += " id=";
        append_name(resource.identification.unique_ident, out);
        append_characteristics(resource.characteristics, 1, out);
        out += '\n';
    }
    for (const auto& connector : process.connectors) {
        indent(1, out);
        out += connector_keyword(connector.kind);
        out += ' ';
        append_name(connector.identification.short_name, out);
        out += " id=";
        append_name(connector.identification.unique_ident, out);
        out += '\n';
    }
    for (const auto& flow : process.flows) {
        indent(1, out);
        out += "flow ";
        append_name(flow.source, out);
        out += " -> ";
        append_name(flow.target, out);
        out += " id=";
        append_name(flow.id, out);
        out += '\n';
    }
    for (const auto& usage : process.usages) {
        indent(1, out);
        out += "usage ";
        append_name(usage.operator_id, out);
        out += " -- ";
        append_name(usage.resource_id, out);
        out += " id=";
        append_name(usage.id, out);
        out += '\n';
    }
    out += "}\n";
}

}  // namespace

std::string print(const Model& model) {
    std::string out;
    for (size_t i = 0; i < model.processes.size(); ++i) {
        if (i) out += '\n';
        append_process(model.processes[i], out);
    }
    return out;
}

}  // namespace fpd::script
