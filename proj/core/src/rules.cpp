#include "fpd/rules.hpp"

#include <algorithm>
#include <unordered_set>

#include "fpd/queries.hpp"

namespace fpd {

namespace {

// clang-format off
constexpr RuleInfo kCatalog[] = {
    {RuleId::R1FlowStateToState, "R1", "FLOW_STATE_TO_STATE",
     "No flow may connect two state-describing elements.", Severity::Error},
    {RuleId::R2ProcHasOperator, "R2", "PROC_HAS_OPERATOR",
     "Every process must contain at least one process operator.", Severity::Error},
    {RuleId::R3StateAssigned, "R3", "STATE_ASSIGNED",
     "Every state-describing element must be connected to a process operator.", Severity::Error},
    {RuleId::R4ProcMinStates, "R4", "PROC_MIN_STATES",
     "Every process needs at least two states, including one input and one output.", Severity::Error},
    {RuleId::R5BoundaryStateDirection, "R5", "BOUNDARY_STATE_DIRECTION",
     "A boundary state must have flows in exactly one direction.", Severity::Error},
    {RuleId::R6IntermediateStateBoth, "R6", "INTERMEDIATE_STATE_BOTH",
     "An intermediate state needs both incoming and outgoing flows.", Severity::Error},
    {RuleId::R7OperatorIo, "R7", "OPERATOR_IO",
     "Every process operator needs at least one input and one output state.", Severity::Error},
    {RuleId::R8UsageEndpoints, "R8", "USAGE_ENDPOINTS",
     "A usage must join exactly one process operator and one technical resource.", Severity::Error},
    {RuleId::R9DecompConsistency, "R9", "DECOMP_CONSISTENCY",
     "Every boundary state of a sub-process must correspond to an input or output of the decomposed operator.", Severity::Error},
    {RuleId::R10FlowAlternation, "R10", "FLOW_ALTERNATION",
     "Every flow path must run state to operator or operator to state.", Severity::Error},
    {RuleId::R11ProcHasBoundary, "R11", "PROC_HAS_BOUNDARY",
     "Every process must declare exactly one system boundary.", Severity::Error},
    {RuleId::R12ConnectorArity, "R12", "CONNECTOR_ARITY",
     "Fork and decision nodes take one input and several outputs; join and merge nodes the reverse.", Severity::Error},
    {RuleId::R13ResourceUsed, "R13", "RESOURCE_USED",
     "Every technical resource should be used by a process operator.", Severity::Warning},
};
// clang-format on

static_assert(std::size(kCatalog) == kRuleCount);

// Messages attached to emitted diagnostics. R1 reproduces the modeling
// tool's wording exactly; tests pin it verbatim.
std::string_view message_of(RuleId rule) {
    switch (rule) {
        case RuleId::R1FlowStateToState:
            return "A state must always be assigned a process operator. "
                   "Linking two states is not permitted.";
        case RuleId::R2ProcHasOperator:
            return "A process must contain at least one process operator.";
        case RuleId::R3StateAssigned:
            return "A state-describing element must be connected to at "
                   "least one process operator.";
        case RuleId::R4ProcMinStates:
            return "A process must contain at least two state-describing "
                   "elements, including at least one input and one output.";
        case RuleId::R5BoundaryStateDirection:
            return "A state on the system boundary must have flows in "
                   "exactly one direction.";
        case RuleId::R6IntermediateStateBoth:
            return "A state within the system boundary must have at least "
                   "one incoming and one outgoing flow.";
        case RuleId::R7OperatorIo:
            return "A process operator must have at least one input state "
                   "and one output state connected by flows.";
        case RuleId::R8UsageEndpoints:
            return "A usage relationship must connect exactly one process "
                   "operator and one technical resource.";
        case RuleId::R9DecompConsistency:
            return "A boundary state of a sub-process must correspond to "
                   "an input or output of the decomposed process operator "
                   "with the same state kind.";
        case RuleId::R10FlowAlternation:
            return "A flow path must run from a state to a process "
                   "operator or from a process operator to a state.";
        case RuleId::R11ProcHasBoundary:
            return "A process must declare exactly one system boundary.";
        case RuleId::R12ConnectorArity:
            return "A fork or decision node must have exactly one incoming "
                   "and at least two outgoing flows; a join or merge node "
                   "must have at least two incoming and exactly one "
                   "outgoing flow.";
        case RuleId::R13ResourceUsed:
            return "A technical resource should be linked to a process "
                   "operator by a usage relationship.";
    }
    return "";
}

class Collector {
public:
    void emit(RuleId rule, const Process& process,
              std::vector<std::string> elements) {
        Diagnostic diag;
        diag.rule = rule;
        diag.severity = rule_info(rule).default_severity;
        diag.message = std::string(message_of(rule));
        diag.elements = std::move(elements);
        diag.process_id = process.identification.unique_ident;
        diagnostics_.push_back(std::move(diag));
    }

    std::vector<Diagnostic> take() { return std::move(diagnostics_); }

private:
    std::vector<Diagnostic> diagnostics_;
};

struct FlowDegrees {
    int incoming = 0;
    int outgoing = 0;
};

FlowDegrees degrees_of(const Process& process, std::string_view id) {
    FlowDegrees deg;
    for (const auto& flow : process.flows) {
        if (flow.source == id) ++deg.outgoing;
        if (flow.target == id) ++deg.incoming;
    }
    return deg;
}

void rule_flow_state_to_state(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        for (const auto& flow : process.flows) {
            if (process.find_state(flow.source) &&
                process.find_state(flow.target))
                out.emit(RuleId::R1FlowStateToState, process, {flow.id});
        }
    }
}

void rule_proc_has_operator(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        if (process.operators.empty())
            out.emit(RuleId::R2ProcHasOperator, process,
                     {process.identification.unique_ident});
    }
}

void rule_state_assigned(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        for (const auto& state : process.states) {
            if (assigned_operators(state, process).empty())
                out.emit(RuleId::R3StateAssigned, process,
                         {state.identification.unique_ident});
        }
    }
}

void rule_proc_min_states(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        auto boundary = boundary_states(process);
        if (process.states.size() < 2 || boundary.inputs.empty() ||
            boundary.outputs.empty())
            out.emit(RuleId::R4ProcMinStates, process,
                     {process.identification.unique_ident});
    }
}

void rule_boundary_state_direction(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        for (const auto& state : process.states) {
            if (state.placement != Placement::Boundary) continue;
            auto deg = degrees_of(process, state.identification.unique_ident);
            bool one_direction = (deg.outgoing > 0 && deg.incoming == 0) ||
                                 (deg.incoming > 0 && deg.outgoing == 0);
            if (!one_direction)
                out.emit(RuleId::R5BoundaryStateDirection, process,
                         {state.identification.unique_ident});
        }
    }
}

void rule_intermediate_state_both(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        for (const auto& state : process.states) {
            if (state.placement != Placement::Intermediate) continue;
            auto deg = degrees_of(process, state.identification.unique_ident);
            if (deg.incoming == 0 || deg.outgoing == 0)
                out.emit(RuleId::R6IntermediateStateBoth, process,
                         {state.identification.unique_ident});
        }
    }
}

void rule_operator_io(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        for (const auto& op : process.operators) {
            auto io = operator_io(op, process);
            if (io.inputs.empty() || io.outputs.empty())
                out.emit(RuleId::R7OperatorIo, process,
                         {op.identification.unique_ident});
        }
    }
}

void rule_usage_endpoints(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        for (const auto& usage : process.usages) {
            if (!process.find_operator(usage.operator_id) ||
                !process.find_resource(usage.resource_id))
                out.emit(RuleId::R8UsageEndpoints, process, {usage.id});
        }
    }
}

// Correspondence per design: an explicit refines reference wins; without
// one, a unique (kind, shortName) match among the operator-side states is
// required. Zero or several fallback candidates both violate the rule.
bool corresponds(const StateNode& sub_state,
                 const std::vector<const StateNode*>& operator_side) {
    if (sub_state.refines) {
        for (const auto* candidate : operator_side) {
            if (candidate->identification.unique_ident == *sub_state.refines)
                return candidate->kind == sub_state.kind;
        }
        return false;
    }
    int matches = 0;
    for (const auto* candidate : operator_side) {
        if (candidate->kind == sub_state.kind &&
            candidate->identification.short_name ==
                sub_state.identification.short_name)
            ++matches;
    }
    return matches == 1;
}

void rule_decomp_consistency(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        for (const auto& op : process.operators) {
            const Process* sub = decomposition_of(op, model);
            if (!sub) continue;
            auto io = operator_io(op, process);
            auto sub_boundary = boundary_states(*sub);
            for (const auto* state : sub_boundary.inputs) {
                if (!corresponds(*state, io.inputs))
                    out.emit(RuleId::R9DecompConsistency, process,
                             {op.identification.unique_ident,
                              state->identification.unique_ident});
            }
            for (const auto* state : sub_boundary.outputs) {
                if (!corresponds(*state, io.outputs))
                    out.emit(RuleId::R9DecompConsistency, process,
                             {op.identification.unique_ident,
                              state->identification.unique_ident});
            }
        }
    }
}

void rule_flow_alternation(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        for (const auto& path : flow_paths(process)) {
            bool state_to_operator = process.find_state(path.origin) &&
                                     process.find_operator(path.terminus);
            bool operator_to_state = process.find_operator(path.origin) &&
                                     process.find_state(path.terminus);
            if (state_to_operator || operator_to_state) continue;
            std::vector<std::string> elements;
            elements.push_back(path.origin);
            elements.insert(elements.end(), path.connectors.begin(),
                            path.connectors.end());
            elements.push_back(path.terminus);
            out.emit(RuleId::R10FlowAlternation, process,
                     std::move(elements));
        }
    }
}

void rule_proc_has_boundary(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        if (process.system_boundary_id.empty())
            out.emit(RuleId::R11ProcHasBoundary, process,
                     {process.identification.unique_ident});
    }
}

void rule_connector_arity(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        for (const auto& conn : process.connectors) {
            auto deg = degrees_of(process, conn.identification.unique_ident);
            bool splits = conn.kind == ConnectorKind::Fork ||
                          conn.kind == ConnectorKind::Decision;
            bool ok = splits ? (deg.incoming == 1 && deg.outgoing >= 2)
                             : (deg.incoming >= 2 && deg.outgoing == 1);
            if (!ok)
                out.emit(RuleId::R12ConnectorArity, process,
                         {conn.identification.unique_ident});
        }
    }
}

void rule_resource_used(const Model& model, Collector& out) {
    for (const auto& process : model.processes) {
        for (const auto& resource : process.resources) {
            const std::string& id = resource.identification.unique_ident;
            bool used = false;
            for (const auto& usage : process.usages) {
                if (usage.operator_id == id || usage.resource_id == id) {
                    used = true;
                    break;
                }
            }
            if (!used)
                out.emit(RuleId::R13ResourceUsed, process, {id});
        }
    }
}

using RuleFn = void (*)(const Model&, Collector&);

constexpr RuleFn kRuleFns[kRuleCount] = {
    rule_flow_state_to_state,    rule_proc_has_operator,
    rule_state_assigned,         rule_proc_min_states,
    rule_boundary_state_direction, rule_intermediate_state_both,
    rule_operator_io,            rule_usage_endpoints,
    rule_decomp_consistency,     rule_flow_alternation,
    rule_proc_has_boundary,      rule_connector_arity,
    rule_resource_used,
};

void sort_and_dedup(std::vector<Diagnostic>& diagnostics) {
    auto key_less = [](const Diagnostic& a, const Diagnostic& b) {
        if (a.process_id != b.process_id) return a.process_id < b.process_id;
        if (a.rule != b.rule) return a.rule < b.rule;
        return a.elements < b.elements;
    };
    std::stable_sort(diagnostics.begin(), diagnostics.end(), key_less);
    diagnostics.erase(std::unique(diagnostics.begin(), diagnostics.end()),
                      diagnostics.end());
}

}  // namespace

std::span<const RuleInfo> list_rules() { return kCatalog; }

const RuleInfo& rule_info(RuleId id) {
    return kCatalog[static_cast<size_t>(id)];
}

std::optional<RuleId> rule_from_code(std::string_view code) {
    for (const auto& info : kCatalog) {
        if (info.code == code || info.name == code) return info.id;
    }
    return std::nullopt;
}

std::vector<Diagnostic> validate(const Model& model,
                                 const RuleConfig& config) {
    Collector collector;
    for (size_t i = 0; i < kRuleCount; ++i) {
        if (config.enabled[i]) kRuleFns[i](model, collector);
    }
    auto diagnostics = collector.take();
    for (auto& diag : diagnostics)
        diag.severity = config.severity_of(diag.rule);
    sort_and_dedup(diagnostics);
    return diagnostics;
}

std::vector<Diagnostic> check_rule(const Model& model, RuleId rule) {
    Collector collector;
    kRuleFns[static_cast<size_t>(rule)](model, collector);
    auto diagnostics = collector.take();
    sort_and_dedup(diagnostics);
    return diagnostics;
}

std::string_view to_string(Severity severity) {
    return severity == Severity::Error ? "error" : "warning";
}

}  // namespace fpd
