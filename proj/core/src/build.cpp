#include "fpd/build.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace fpd {

namespace {

class Builder {
public:
    explicit Builder(std::vector<Process> processes)
        : processes_(std::move(processes)) {}

    BuildResult run() {
        collect_ids();
        check_references();
        check_decomposition_graph();
        BuildResult result;
        result.errors = std::move(errors_);
        if (result.errors.empty()) {
            Model model;
            model.root_process_ids = compute_roots();
            model.processes = std::move(processes_);
            result.model = std::move(model);
        }
        return result;
    }

private:
    void error(BuildErrorKind kind, std::string id, std::string message) {
        errors_.push_back({kind, std::move(id), {}, std::move(message)});
    }

    void register_id(const std::string& id, const std::string& what) {
        if (id.empty()) {
            error(BuildErrorKind::EmptyIdentifier, id,
                  what + " has an empty identifier");
            return;
        }
        if (!seen_ids_.insert(id).second) {
            // Report each duplicate value once.
            if (reported_duplicates_.insert(id).second) {
                error(BuildErrorKind::DuplicateId, id,
                      "identifier '" + id + "' is declared more than once");
            }
        }
    }

    void register_characteristics(const std::vector<Characteristic>& chars,
                                  const std::string& owner) {
        for (const auto& ch : chars) {
            register_id(ch.identification.unique_ident,
                        "characteristic of " + owner);
            register_characteristics(ch.children, owner);
        }
    }

    void collect_ids() {
        for (const auto& process : processes_) {
            const std::string& pid = process.identification.unique_ident;
            register_id(pid, "process");
            // An absent boundary id is a rule violation (R11), not a
            // construction error; only non-empty ids enter the id space.
            if (!process.system_boundary_id.empty())
                register_id(process.system_boundary_id, "system boundary");
            for (const auto& state : process.states) {
                register_id(state.identification.unique_ident, "state");
                register_characteristics(state.characteristics, "state");
            }
            for (const auto& op : process.operators) {
                register_id(op.identification.unique_ident, "process operator");
                register_characteristics(op.characteristics,
                                         "process operator");
            }
            for (const auto& res : process.resources) {
                register_id(res.identification.unique_ident,
                            "technical resource");
                register_characteristics(res.characteristics,
                                         "technical resource");
            }
            for (const auto& conn : process.connectors)
                register_id(conn.identification.unique_ident, "connector");
            for (const auto& flow : process.flows)
                register_id(flow.id, "flow");
            for (const auto& usage : process.usages)
                register_id(usage.id, "usage");
        }
    }

    // True when the id names a state, operator or connector of the process.
    static bool is_flow_endpoint(const Process& process,
                                 const std::string& id) {
        return process.find_state(id) || process.find_operator(id) ||
               process.find_connector(id);
    }

    // Usage endpoints may name any node of the process; rule R8 checks
    // that the kinds are operator and resource.
    static bool is_usage_endpoint(const Process& process,
                                  const std::string& id) {
        return process.find_state(id) || process.find_operator(id) ||
               process.find_resource(id) || process.find_connector(id);
    }

    void check_references() {
        std::unordered_set<std::string> process_ids;
        std::unordered_set<std::string> state_ids;
        for (const auto& process : processes_) {
            process_ids.insert(process.identification.unique_ident);
            for (const auto& state : process.states)
                state_ids.insert(state.identification.unique_ident);
        }

        for (const auto& process : processes_) {
            for (const auto& flow : process.flows) {
                if (!is_flow_endpoint(process, flow.source)) {
                    error(BuildErrorKind::DanglingReference, flow.source,
                          "flow '" + flow.id + "' source '" + flow.source +
                              "' does not name a state, operator or "
                              "connector of the process");
                }
                if (!is_flow_endpoint(process, flow.target)) {
                    error(BuildErrorKind::DanglingReference, flow.target,
                          "flow '" + flow.id + "' target '" + flow.target +
                              "' does not name a state, operator or "
                              "connector of the process");
                }
                if (!flow.source.empty() && flow.source == flow.target) {
                    error(BuildErrorKind::InvalidReference, flow.source,
                          "flow '" + flow.id +
                              "' connects an element to itself");
                }
            }
            for (const auto& usage : process.usages) {
                if (!is_usage_endpoint(process, usage.operator_id)) {
                    error(BuildErrorKind::DanglingReference, usage.operator_id,
                          "usage '" + usage.id + "' endpoint '" +
                              usage.operator_id +
                              "' does not name an element of the process");
                }
                if (!is_usage_endpoint(process, usage.resource_id)) {
                    error(BuildErrorKind::DanglingReference, usage.resource_id,
                          "usage '" + usage.id + "' endpoint '" +
                              usage.resource_id +
                              "' does not name an element of the process");
                }
            }
            for (const auto& op : process.operators) {
                if (op.decomposition && !process_ids.count(*op.decomposition)) {
                    error(BuildErrorKind::DanglingReference, *op.decomposition,
                          "operator '" + op.identification.unique_ident +
                              "' decomposes to unknown process '" +
                              *op.decomposition + "'");
                }
            }
            for (const auto& state : process.states) {
                if (state.refines && !state_ids.count(*state.refines)) {
                    error(BuildErrorKind::DanglingReference, *state.refines,
                          "state '" + state.identification.unique_ident +
                              "' refines unknown state '" + *state.refines +
                              "'");
                }
            }
        }
    }

    void check_decomposition_graph() {
        // Process-level graph: edge P -> Q when an operator of P
        // decomposes to Q.
        std::unordered_map<std::string, std::vector<std::string>> edges;
        for (const auto& process : processes_) {
            auto& out = edges[process.identification.unique_ident];
            for (const auto& op : process.operators) {
                if (op.decomposition) out.push_back(*op.decomposition);
            }
        }

        enum class Mark { None, Active, Done };
        std::unordered_map<std::string, Mark> marks;
        std::vector<std::string> stack;
        bool cycle_reported = false;

        auto visit = [&](auto&& self, const std::string& id) -> void {
            if (cycle_reported) return;
            Mark& mark = marks[id];
            if (mark == Mark::Done) return;
            if (mark == Mark::Active) {
                auto begin =
                    std::find(stack.begin(), stack.end(), id);
                std::vector<std::string> cycle(begin, stack.end());
                cycle.push_back(id);
                errors_.push_back({BuildErrorKind::DecompositionCycle, id,
                                   cycle,
                                   "decomposition cycle: " + join(cycle)});
                cycle_reported = true;
                return;
            }
            mark = Mark::Active;
            stack.push_back(id);
            auto it = edges.find(id);
            if (it != edges.end()) {
                for (const auto& next : it->second) {
                    if (edges.count(next)) self(self, next);
                }
            }
            stack.pop_back();
            marks[id] = Mark::Done;
        };
        for (const auto& process : processes_)
            visit(visit, process.identification.unique_ident);
    }

    static std::string join(const std::vector<std::string>& ids) {
        std::string out;
        for (size_t i = 0; i < ids.size(); ++i) {
            if (i) out += " -> ";
            out += ids[i];
        }
        return out;
    }

    std::vector<std::string> compute_roots() const {
        std::unordered_set<std::string> targets;
        for (const auto& process : processes_) {
            for (const auto& op : process.operators) {
                if (op.decomposition) targets.insert(*op.decomposition);
            }
        }
        std::vector<std::string> roots;
        for (const auto& process : processes_) {
            const std::string& pid = process.identification.unique_ident;
            if (!targets.count(pid)) roots.push_back(pid);
        }
        return roots;
    }

    std::vector<Process> processes_;
    std::vector<BuildError> errors_;
    std::unordered_set<std::string> seen_ids_;
    std::unordered_set<std::string> reported_duplicates_;
};

}  // namespace

BuildResult build_model(std::vector<Process> processes) {
    return Builder(std::move(processes)).run();
}

std::string_view to_string(BuildErrorKind kind) {
    switch (kind) {
        case BuildErrorKind::DuplicateId: return "duplicate-id";
        case BuildErrorKind::DanglingReference: return "dangling-reference";
        case BuildErrorKind::DecompositionCycle: return "decomposition-cycle";
        case BuildErrorKind::EmptyIdentifier: return "empty-identifier";
        case BuildErrorKind::InvalidReference: return "invalid-reference";
    }
    return "duplicate-id";
}

}  // namespace fpd
