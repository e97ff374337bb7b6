#include <string>

#include "fpd/queries.hpp"
#include "fpd/xml.hpp"
#include "xml_tree.hpp"

namespace fpd::xml {

namespace {

using xmltree::Node;

Node element(std::string name) {
    Node node;
    node.name = std::move(name);
    return node;
}

void set_attr(Node& node, std::string_view name, std::string value) {
    node.attributes.emplace_back(std::string(name), std::move(value));
}

Node identification_node(const Identification& ident) {
    Node node = element("identification");
    set_attr(node, "uniqueIdent", ident.unique_ident);
    set_attr(node, "shortName", ident.short_name);
    set_attr(node, "longName", ident.long_name);
    set_attr(node, "versionNumber", ident.version_number);
    set_attr(node, "revisionNumber", ident.revision_number);
    Node references = element("references");
    for (const auto& ref : ident.references) {
        Node reference = element("reference");
        set_attr(reference, "id", ref);
        references.children.push_back(std::move(reference));
    }
    node.children.push_back(std::move(references));
    return node;
}

Node characteristics_node(const std::vector<Characteristic>& characteristics) {
    Node node = element("characteristics");
    for (const auto& ch : characteristics) {
        Node child = element("characteristic");
        set_attr(child, "value", ch.value);
        set_attr(child, "unit", ch.unit);
        child.children.push_back(identification_node(ch.identification));
        child.children.push_back(characteristics_node(ch.children));
        node.children.push_back(std::move(child));
    }
    return node;
}

Node state_node(const StateNode& state, const Process& process) {
    Node node = element("state");
    set_attr(node, "stateType", std::string(to_string(state.kind)));
    // The placement attribute is a format extension; boundary is the
    // default and stays implicit.
    if (state.placement == Placement::Intermediate)
        set_attr(node, "placement", "intermediate");
    if (state.refines) set_attr(node, "refines", *state.refines);
    node.children.push_back(identification_node(state.identification));
    node.children.push_back(characteristics_node(state.characteristics));

    Node assignments = element("assignments");
    for (const auto* op : assigned_operators(state, process)) {
        Node assigned = element("assigned");
        set_attr(assigned, "id", op->identification.unique_ident);
        assignments.children.push_back(std::move(assigned));
    }
    node.children.push_back(std::move(assignments));

    // Outgoing flows first, then incoming, both in declaration order.
    Node flows = element("flows");
    const std::string& state_id = state.identification.unique_ident;
    for (const auto& flow : process.flows) {
        if (flow.source != state_id) continue;
        Node wrapper = element("flow");
        Node exit = element("exit");
        set_attr(exit, "id", flow.id);
        wrapper.children.push_back(std::move(exit));
        flows.children.push_back(std::move(wrapper));
    }
    for (const auto& flow : process.flows) {
        if (flow.target != state_id) continue;
        Node wrapper = element("flow");
        Node entry = element("entry");
        set_attr(entry, "id", flow.id);
        wrapper.children.push_back(std::move(entry));
        flows.children.push_back(std::move(wrapper));
    }
    node.children.push_back(std::move(flows));
    return node;
}

Node process_node(const Process& process) {
    Node node = element("process");
    set_attr(node, "id", process.identification.unique_ident);

    Node limit = element("systemLimit");
    set_attr(limit, "id", process.system_boundary_id);
    set_attr(limit, "shortName", process.identification.short_name);
    node.children.push_back(std::move(limit));

    Node states = element("states");
    for (const auto& state : process.states)
        states.children.push_back(state_node(state, process));
    node.children.push_back(std::move(states));

    Node operators = element("processOperators");
    for (const auto& op : process.operators) {
        Node op_node = element("processOperator");
        if (op.decomposition)
            set_attr(op_node, "decompositionRef", *op.decomposition);
        op_node.children.push_back(identification_node(op.identification));
        op_node.children.push_back(characteristics_node(op.characteristics));
        operators.children.push_back(std::move(op_node));
    }
    node.children.push_back(std::move(operators));

    Node resources = element("technicalResources");
    for (const auto& resource : process.resources) {
        Node res_node = element("technicalResource");
        res_node.children.push_back(
            identification_node(resource.identification));
        res_node.children.push_back(
            characteristics_node(resource.characteristics));
        resources.children.push_back(std::move(res_node));
    }
    node.children.push_back(std::move(resources));

    Node connectors = element("connectors");
    for (const auto& conn : process.connectors) {
        Node conn_node = element("connector");
        set_attr(conn_node, "kind", std::string(to_string(conn.kind)));
        conn_node.children.push_back(identification_node(conn.identification));
        connectors.children.push_back(std::move(conn_node));
    }
    node.children.push_back(std::move(connectors));

    Node flows = element("flows");
    for (const auto& flow : process.flows) {
        Node flow_node = element("flow");
        set_attr(flow_node, "id", flow.id);
        set_attr(flow_node, "sourceRef", flow.source);
        set_attr(flow_node, "targetRef", flow.target);
        flows.children.push_back(std::move(flow_node));
    }
    node.children.push_back(std::move(flows));

    Node usages = element("usages");
    for (const auto& usage : process.usages) {
        Node usage_node = element("usage");
        set_attr(usage_node, "id", usage.id);
        set_attr(usage_node, "operatorRef", usage.operator_id);
        set_attr(usage_node, "resourceRef", usage.resource_id);
        usages.children.push_back(std::move(usage_node));
    }
    node.children.push_back(std::move(usages));

    return node;
}

}  // namespace

std::string serialize(const Model& model) {
    Node root = element("fpd");
    for (const auto& process : model.processes)
        root.children.push_back(process_node(process));
    return xmltree::write(root);
}

CanonicalizeResult canonicalize(std::string_view document) {
    CanonicalizeResult result;
    xmltree::ReadError error;
    auto root = xmltree::read(document, error);
    if (!root) {
        result.errors.push_back({XmlErrorKind::Markup, error.message,
                                 error.line, error.col, "", ""});
        return result;
    }
    result.text = xmltree::write(*root);
    return result;
}

std::string_view to_string(XmlErrorKind kind) {
    switch (kind) {
        case XmlErrorKind::Markup: return "markup";
        case XmlErrorKind::Schema: return "schema";
        case XmlErrorKind::DanglingReference: return "dangling-reference";
    }
    return "markup";
}

}  // namespace fpd::xml
