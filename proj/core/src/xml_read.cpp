#include <initializer_list>
#include <string>
#include <unordered_set>

#include "fpd/build.hpp"
#include "fpd/queries.hpp"
#include "fpd/xml.hpp"
#include "xml_tree.hpp"

namespace fpd::xml {

namespace {

using xmltree::Node;

class ModelReader {
public:
    ModelReader(ReadOptions options, ReadResult& result)
        : options_(options), result_(result) {}

    void run(const Node& root) {
        std::vector<Process> processes;
        if (root.name == "process") {
            // Bare single-process document.
            processes.push_back(read_process(root, "/process"));
        } else if (root.name == "fpd") {
            check_attributes(root, "/fpd", {});
            int index = 0;
            for (const auto& child : root.children) {
                std::string path = "/fpd/process[" + std::to_string(index) + "]";
                if (!expect_element(child, "process", path)) continue;
                processes.push_back(read_process(child, path));
                ++index;
            }
        } else {
            schema_error("/", "root element must be 'fpd' or 'process', got '" +
                                  root.name + "'");
            return;
        }
        if (!result_.errors.empty()) return;

        auto built = build_model(std::move(processes));
        for (const auto& error : built.errors) {
            if (error.kind == BuildErrorKind::DanglingReference) {
                result_.errors.push_back({XmlErrorKind::DanglingReference,
                                          error.message, 0, 0, "", error.id});
            } else {
                schema_error("/", error.message);
            }
        }
        if (!built.model) return;
        verify_derived_sections(*built.model);
        if (result_.errors.empty()) result_.model = std::move(built.model);
    }

private:
    void schema_error(const std::string& path, const std::string& reason) {
        result_.errors.push_back(
            {XmlErrorKind::Schema, reason, 0, 0, path, ""});
    }

    // Unknown content is an error in strict mode and a warning in
    // lenient mode; either way it never reaches the model.
    void unknown(const std::string& path, const std::string& what) {
        if (options_.lenient)
            result_.warnings.push_back("ignored unknown " + what + " at " +
                                       path);
        else
            schema_error(path, "unknown " + what);
    }

    bool expect_element(const Node& node, std::string_view name,
                        const std::string& path) {
        if (node.is_text()) {
            unknown(path, "character data");
            return false;
        }
        if (node.name != name) {
            unknown(path + "/" + node.name, "element '" + node.name + "'");
            return false;
        }
        return true;
    }

    void check_attributes(const Node& node, const std::string& path,
                          std::initializer_list<std::string_view> allowed) {
        for (const auto& [name, value] : node.attributes) {
            bool known = false;
            for (auto candidate : allowed) {
                if (name == candidate) {
                    known = true;
                    break;
                }
            }
            if (!known)
                unknown(path + "/@" + name, "attribute '" + name + "'");
        }
    }

    void check_children(const Node& node, const std::string& path,
                        std::initializer_list<std::string_view> allowed) {
        for (const auto& child : node.children) {
            if (child.is_text()) {
                unknown(path, "character data");
                continue;
            }
            bool known = false;
            for (auto candidate : allowed) {
                if (child.name == candidate) {
                    known = true;
                    break;
                }
            }
            if (!known)
                unknown(path + "/" + child.name,
                        "element '" + child.name + "'");
        }
    }

    // Sections that hold the element at most once (states, systemLimit,
    // identification, ...) reject duplicates; picking one silently would
    // drop content.
    void check_singular(const Node& node, const std::string& path,
                        std::initializer_list<std::string_view> names) {
        for (auto name : names) {
            if (node.children_named(name).size() > 1)
                schema_error(path + "/" + std::string(name),
                             "element '" + std::string(name) +
                                 "' may appear at most once here");
        }
    }

    std::string require_attr(const Node& node, std::string_view name,
                             const std::string& path) {
        if (const std::string* value = node.attribute(name)) return *value;
        schema_error(path, "missing required attribute '" +
                               std::string(name) + "'");
        return {};
    }

    std::string attr_or_empty(const Node& node, std::string_view name) {
        const std::string* value = node.attribute(name);
        return value ? *value : std::string();
    }

    Identification read_identification(const Node& parent,
                                       const std::string& parent_path) {
        Identification ident;
        const Node* node = parent.child("identification");
        if (!node) {
            schema_error(parent_path, "missing 'identification' element");
            return ident;
        }
        std::string path = parent_path + "/identification";
        check_attributes(*node, path,
                         {"uniqueIdent", "shortName", "longName",
                          "versionNumber", "revisionNumber"});
        check_children(*node, path, {"references"});
        check_singular(*node, path, {"references"});
        ident.unique_ident = require_attr(*node, "uniqueIdent", path);
        ident.short_name = attr_or_empty(*node, "shortName");
        ident.long_name = attr_or_empty(*node, "longName");
        ident.version_number = attr_or_empty(*node, "versionNumber");
        ident.revision_number = attr_or_empty(*node, "revisionNumber");
        if (const Node* references = node->child("references")) {
            std::string refs_path = path + "/references";
            check_attributes(*references, refs_path, {});
            check_children(*references, refs_path, {"reference"});
            for (const auto* reference :
                 references->children_named("reference")) {
                check_attributes(*reference, refs_path + "/reference", {"id"});
                ident.references.push_back(
                    require_attr(*reference, "id", refs_path + "/reference"));
            }
        }
        return ident;
    }

    std::vector<Characteristic> read_characteristics(
        const Node& parent, const std::string& parent_path) {
        std::vector<Characteristic> result;
        const Node* node = parent.child("characteristics");
        if (!node) return result;
        std::string path = parent_path + "/characteristics";
        check_attributes(*node, path, {});
        check_children(*node, path, {"characteristic"});
        int index = 0;
        for (const auto* child : node->children_named("characteristic")) {
            std::string child_path =
                path + "/characteristic[" + std::to_string(index++) + "]";
            check_attributes(*child, child_path, {"value", "unit"});
            check_children(*child, child_path,
                           {"identification", "characteristics"});
            check_singular(*child, child_path,
                           {"identification", "characteristics"});
            Characteristic ch;
            ch.value = attr_or_empty(*child, "value");
            ch.unit = attr_or_empty(*child, "unit");
            ch.identification = read_identification(*child, child_path);
            ch.children = read_characteristics(*child, child_path);
            result.push_back(std::move(ch));
        }
        return result;
    }

    StateNode read_state(const Node& node, const std::string& path) {
        StateNode state;
        check_attributes(node, path, {"stateType", "placement", "refines"});
        check_children(node, path,
                       {"identification", "characteristics", "assignments",
                        "flows"});
        check_singular(node, path,
                       {"identification", "characteristics", "assignments",
                        "flows"});
        std::string kind_text = require_attr(node, "stateType", path);
        if (auto kind = state_kind_from(kind_text)) {
            state.kind = *kind;
        } else if (node.attribute("stateType")) {
            schema_error(path, "invalid stateType '" + kind_text + "'");
        }
        if (const std::string* placement = node.attribute("placement")) {
            if (auto parsed = placement_from(*placement))
                state.placement = *parsed;
            else
                schema_error(path, "invalid placement '" + *placement + "'");
        }
        if (const std::string* refines = node.attribute("refines"))
            state.refines = *refines;
        state.identification = read_identification(node, path);
        state.characteristics = read_characteristics(node, path);
        return state;
    }

    // Declared derived sections (assignments and per-state flows) are
    // collected so they can be checked against the recomputed values
    // once the model is built.
    struct DeclaredDerived {
        std::string process_id;
        std::string state_id;
        std::string state_path;
        std::vector<std::string> assigned;
        // (is_exit, flow id) in document order; the canonical form lists
        // exits before entries.
        std::vector<std::pair<bool, std::string>> flow_refs;
        bool has_assignments = false;
        bool has_flows = false;
    };

    void read_state_derived(const Node& node, const std::string& path,
                            DeclaredDerived& derived) {
        if (const Node* assignments = node.child("assignments")) {
            derived.has_assignments = true;
            std::string apath = path + "/assignments";
            check_attributes(*assignments, apath, {});
            check_children(*assignments, apath, {"assigned"});
            for (const auto* assigned :
                 assignments->children_named("assigned")) {
                check_attributes(*assigned, apath + "/assigned", {"id"});
                derived.assigned.push_back(
                    require_attr(*assigned, "id", apath + "/assigned"));
            }
        }
        if (const Node* flows = node.child("flows")) {
            derived.has_flows = true;
            std::string fpath = path + "/flows";
            check_attributes(*flows, fpath, {});
            check_children(*flows, fpath, {"flow"});
            for (const auto* flow : flows->children_named("flow")) {
                std::string flow_path = fpath + "/flow";
                check_attributes(*flow, flow_path, {});
                check_children(*flow, flow_path, {"exit", "entry"});
                for (const auto& ref : flow->children) {
                    if (ref.is_text()) continue;
                    bool is_exit = ref.name == "exit";
                    if (!is_exit && ref.name != "entry") continue;
                    std::string ref_path = flow_path + "/" + ref.name;
                    check_attributes(ref, ref_path, {"id"});
                    derived.flow_refs.emplace_back(
                        is_exit, require_attr(ref, "id", ref_path));
                }
            }
        }
    }

    Process read_process(const Node& node, const std::string& path) {
        Process process;
        check_attributes(node, path, {"id"});
        check_children(node, path,
                       {"systemLimit", "states", "processOperators",
                        "technicalResources", "connectors", "flows",
                        "usages"});
        check_singular(node, path,
                       {"systemLimit", "states", "processOperators",
                        "technicalResources", "connectors", "flows",
                        "usages"});
        process.identification.unique_ident = require_attr(node, "id", path);

        if (const Node* limit = node.child("systemLimit")) {
            std::string limit_path = path + "/systemLimit";
            check_attributes(*limit, limit_path, {"id", "shortName"});
            check_children(*limit, limit_path, {});
            process.system_boundary_id = attr_or_empty(*limit, "id");
            process.identification.short_name =
                attr_or_empty(*limit, "shortName");
        }

        if (const Node* states = node.child("states")) {
            std::string states_path = path + "/states";
            check_attributes(*states, states_path, {});
            check_children(*states, states_path, {"state"});
            int index = 0;
            for (const auto* state : states->children_named("state")) {
                std::string state_path =
                    states_path + "/state[" + std::to_string(index++) + "]";
                process.states.push_back(read_state(*state, state_path));
                DeclaredDerived derived;
                derived.process_id = process.identification.unique_ident;
                derived.state_id =
                    process.states.back().identification.unique_ident;
                derived.state_path = state_path;
                read_state_derived(*state, state_path, derived);
                declared_.push_back(std::move(derived));
            }
        }

        if (const Node* operators = node.child("processOperators")) {
            std::string ops_path = path + "/processOperators";
            check_attributes(*operators, ops_path, {});
            check_children(*operators, ops_path, {"processOperator"});
            int index = 0;
            for (const auto* op_node :
                 operators->children_named("processOperator")) {
                std::string op_path = ops_path + "/processOperator[" +
                                      std::to_string(index++) + "]";
                check_attributes(*op_node, op_path, {"decompositionRef"});
                check_children(*op_node, op_path,
                               {"identification", "characteristics"});
                check_singular(*op_node, op_path,
                               {"identification", "characteristics"});
                ProcessOperator op;
                if (const std::string* ref =
                        op_node->attribute("decompositionRef"))
                    op.decomposition = *ref;
                op.identification = read_identification(*op_node, op_path);
                op.characteristics = read_characteristics(*op_node, op_path);
                process.operators.push_back(std::move(op));
            }
        }

        if (const Node* resources = node.child("technicalResources")) {
            std::string res_path = path + "/technicalResources";
            check_attributes(*resources, res_path, {});
            check_children(*resources, res_path, {"technicalResource"});
            int index = 0;
            for (const auto* res_node :
                 resources->children_named("technicalResource")) {
                std::string item_path = res_path + "/technicalResource[" +
                                        std::to_string(index++) + "]";
                check_attributes(*res_node, item_path, {});
                check_children(*res_node, item_path,
                               {"identification", "characteristics"});
                check_singular(*res_node, item_path,
                               {"identification", "characteristics"});
                TechnicalResource resource;
                resource.identification =
                    read_identification(*res_node, item_path);
                resource.characteristics =
                    read_characteristics(*res_node, item_path);
                process.resources.push_back(std::move(resource));
            }
        }

        if (const Node* connectors = node.child("connectors")) {
            std::string conn_path = path + "/connectors";
            check_attributes(*connectors, conn_path, {});
            check_children(*connectors, conn_path, {"connector"});
            int index = 0;
            for (const auto* conn_node :
                 connectors->children_named("connector")) {
                std::string item_path =
                    conn_path + "/connector[" + std::to_string(index++) + "]";
                check_attributes(*conn_node, item_path, {"kind"});
                check_children(*conn_node, item_path, {"identification"});
                check_singular(*conn_node, item_path, {"identification"});
                ConnectorNode connector;
                std::string kind_text =
                    require_attr(*conn_node, "kind", item_path);
                if (auto kind = connector_kind_from(kind_text))
                    connector.kind = *kind;
                else if (conn_node->attribute("kind"))
                    schema_error(item_path,
                                 "invalid connector kind '" + kind_text + "'");
                connector.identification =
                    read_identification(*conn_node, item_path);
                process.connectors.push_back(std::move(connector));
            }
        }

        if (const Node* flows = node.child("flows")) {
            std::string flows_path = path + "/flows";
            check_attributes(*flows, flows_path, {});
            check_children(*flows, flows_path, {"flow"});
            int index = 0;
            for (const auto* flow_node : flows->children_named("flow")) {
                std::string item_path =
                    flows_path + "/flow[" + std::to_string(index++) + "]";
                check_attributes(*flow_node, item_path,
                                 {"id", "sourceRef", "targetRef"});
                check_children(*flow_node, item_path, {});
                Flow flow;
                flow.id = require_attr(*flow_node, "id", item_path);
                flow.source = require_attr(*flow_node, "sourceRef", item_path);
                flow.target = require_attr(*flow_node, "targetRef", item_path);
                process.flows.push_back(std::move(flow));
            }
        }

        if (const Node* usages = node.child("usages")) {
            std::string usages_path = path + "/usages";
            check_attributes(*usages, usages_path, {});
            check_children(*usages, usages_path, {"usage"});
            int index = 0;
            for (const auto* usage_node : usages->children_named("usage")) {
                std::string item_path =
                    usages_path + "/usage[" + std::to_string(index++) + "]";
                check_attributes(*usage_node, item_path,
                                 {"id", "operatorRef", "resourceRef"});
                check_children(*usage_node, item_path, {});
                Usage usage;
                usage.id = require_attr(*usage_node, "id", item_path);
                usage.operator_id =
                    require_attr(*usage_node, "operatorRef", item_path);
                usage.resource_id =
                    require_attr(*usage_node, "resourceRef", item_path);
                process.usages.push_back(std::move(usage));
            }
        }

        return process;
    }

    void verify_derived_sections(const Model& model) {
        for (const auto& declared : declared_) {
            const Process* process = model.find_process(declared.process_id);
            if (!process) continue;
            const StateNode* state = process->find_state(declared.state_id);
            if (!state) continue;

            if (declared.has_assignments) {
                std::vector<std::string> expected;
                for (const auto* op : assigned_operators(*state, *process))
                    expected.push_back(op->identification.unique_ident);
                if (declared.assigned != expected)
                    derived_mismatch(declared.state_path + "/assignments",
                                     "assignments do not match the flows");
            }
            if (declared.has_flows) {
                std::vector<std::pair<bool, std::string>> expected;
                for (const auto& flow : process->flows) {
                    if (flow.source == declared.state_id)
                        expected.emplace_back(true, flow.id);
                }
                for (const auto& flow : process->flows) {
                    if (flow.target == declared.state_id)
                        expected.emplace_back(false, flow.id);
                }
                if (declared.flow_refs != expected)
                    derived_mismatch(
                        declared.state_path + "/flows",
                        "exit/entry references do not match the flows "
                        "section");
            }
        }
    }

    void derived_mismatch(const std::string& path, const std::string& reason) {
        if (options_.lenient)
            result_.warnings.push_back(reason + " at " + path +
                                       "; recomputed values win");
        else
            schema_error(path, reason);
    }

    ReadOptions options_;
    ReadResult& result_;
    std::vector<DeclaredDerived> declared_;
};

}  // namespace

ReadResult deserialize(std::string_view document, ReadOptions options) {
    ReadResult result;
    xmltree::ReadError error;
    auto root = xmltree::read(document, error);
    if (!root) {
        result.errors.push_back({XmlErrorKind::Markup, error.message,
                                 error.line, error.col, "", ""});
        return result;
    }
    ModelReader(options, result).run(*root);
    return result;
}

}  // namespace fpd::xml
