#include "fpd/queries.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace fpd {

namespace {

struct DegreeCount {
    int incoming = 0;
    int outgoing = 0;
};

DegreeCount degrees(const Process& process, std::string_view id) {
    DegreeCount count;
    for (const auto& flow : process.flows) {
        if (flow.source == id) ++count.outgoing;
        if (flow.target == id) ++count.incoming;
    }
    return count;
}

class PathEnumerator {
public:
    explicit PathEnumerator(const Process& process) : process_(process) {
        for (size_t i = 0; i < process.flows.size(); ++i)
            out_edges_[process.flows[i].source].push_back(i);
    }

    std::vector<FlowPath> enumerate() {
        // Origins in declaration order: states, operators, then
        // connectors without incoming flows.
        for (const auto& state : process_.states)
            start_from(state.identification.unique_ident);
        for (const auto& op : process_.operators)
            start_from(op.identification.unique_ident);
        for (const auto& conn : process_.connectors) {
            const std::string& id = conn.identification.unique_ident;
            if (degrees(process_, id).incoming == 0) start_from(id);
        }
        return std::move(paths_);
    }

private:
    void start_from(const std::string& origin) {
        auto it = out_edges_.find(origin);
        if (it == out_edges_.end()) return;
        for (size_t edge : it->second) {
            chain_.clear();
            walk(origin, process_.flows[edge].target);
        }
    }

    // Extends the path at `node`, with `chain_` holding the connectors
    // traversed so far. Connectors never repeat within one path, so the
    // walk terminates on any input.
    void walk(const std::string& origin, const std::string& node) {
        if (!process_.find_connector(node)) {
            paths_.push_back({origin, chain_, node});
            return;
        }
        bool extended = false;
        auto it = out_edges_.find(node);
        if (it != out_edges_.end()) {
            for (size_t edge : it->second) {
                const std::string& next = process_.flows[edge].target;
                if (process_.find_connector(next) && on_chain(next)) continue;
                chain_.push_back(node);
                walk(origin, next);
                chain_.pop_back();
                extended = true;
            }
        }
        // Dead end: no outgoing flows, or every continuation would
        // revisit a connector already on the path.
        if (!extended) paths_.push_back({origin, chain_, node});
    }

    bool on_chain(const std::string& id) const {
        return std::find(chain_.begin(), chain_.end(), id) != chain_.end();
    }

    const Process& process_;
    std::unordered_map<std::string, std::vector<size_t>> out_edges_;
    std::vector<std::string> chain_;
    std::vector<FlowPath> paths_;
};

}  // namespace

BoundaryStates boundary_states(const Process& process) {
    BoundaryStates result;
    for (const auto& state : process.states) {
        if (state.placement != Placement::Boundary) continue;
        auto count = degrees(process, state.identification.unique_ident);
        if (count.outgoing > 0 && count.incoming == 0)
            result.inputs.push_back(&state);
        else if (count.incoming > 0 && count.outgoing == 0)
            result.outputs.push_back(&state);
    }
    return result;
}

OperatorIo operator_io(const ProcessOperator& op, const Process& process) {
    const std::string& op_id = op.identification.unique_ident;
    std::unordered_set<std::string> input_ids;
    std::unordered_set<std::string> output_ids;
    for (const auto& path : flow_paths(process)) {
        if (path.terminus == op_id && process.find_state(path.origin))
            input_ids.insert(path.origin);
        if (path.origin == op_id && process.find_state(path.terminus))
            output_ids.insert(path.terminus);
    }
    OperatorIo io;
    for (const auto& state : process.states) {
        const std::string& id = state.identification.unique_ident;
        if (input_ids.count(id)) io.inputs.push_back(&state);
        if (output_ids.count(id)) io.outputs.push_back(&state);
    }
    return io;
}

std::vector<const TechnicalResource*> resources_of(const ProcessOperator& op,
                                                   const Process& process) {
    const std::string& op_id = op.identification.unique_ident;
    std::vector<const TechnicalResource*> result;
    for (const auto& usage : process.usages) {
        if (usage.operator_id != op_id) continue;
        const auto* resource = process.find_resource(usage.resource_id);
        if (!resource) continue;
        if (std::find(result.begin(), result.end(), resource) == result.end())
            result.push_back(resource);
    }
    return result;
}

const Process* decomposition_of(const ProcessOperator& op,
                                const Model& model) {
    if (!op.decomposition) return nullptr;
    return model.find_process(*op.decomposition);
}

std::vector<FlowPath> flow_paths(const Process& process) {
    return PathEnumerator(process).enumerate();
}

std::vector<const ProcessOperator*> assigned_operators(
    const StateNode& state, const Process& process) {
    const std::string& state_id = state.identification.unique_ident;
    std::unordered_set<std::string> op_ids;
    for (const auto& path : flow_paths(process)) {
        if (path.origin == state_id && process.find_operator(path.terminus))
            op_ids.insert(path.terminus);
        if (path.terminus == state_id && process.find_operator(path.origin))
            op_ids.insert(path.origin);
    }
    std::vector<const ProcessOperator*> result;
    for (const auto& op : process.operators) {
        if (op_ids.count(op.identification.unique_ident))
            result.push_back(&op);
    }
    return result;
}

int decomposition_depth(const Process& process, const Model& model) {
    int deepest = 0;
    for (const auto& op : process.operators) {
        if (const Process* sub = decomposition_of(op, model))
            deepest = std::max(deepest, decomposition_depth(*sub, model));
    }
    return deepest + 1;
}

}  // namespace fpd
