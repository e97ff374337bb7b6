#include "fpd/model.hpp"

namespace fpd {

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
    for (const auto& item : items) {
        if (item.identification.unique_ident == id) return &item;
    }
    return nullptr;
}

}  // namespace

const StateNode* Process::find_state(std::string_view id) const {
    return find_by_id(states, id);
}

const ProcessOperator* Process::find_operator(std::string_view id) const {
    return find_by_id(operators, id);
}

const TechnicalResource* Process::find_resource(std::string_view id) const {
    return find_by_id(resources, id);
}

const ConnectorNode* Process::find_connector(std::string_view id) const {
    return find_by_id(connectors, id);
}

const Flow* Process::find_flow(std::string_view id) const {
    for (const auto& flow : flows) {
        if (flow.id == id) return &flow;
    }
    return nullptr;
}

const Usage* Process::find_usage(std::string_view id) const {
    for (const auto& usage : usages) {
        if (usage.id == id) return &usage;
    }
    return nullptr;
}

std::optional<ElementKind> Process::kind_of(std::string_view id) const {
    if (find_state(id)) return ElementKind::State;
    if (find_operator(id)) return ElementKind::Operator;
    if (find_resource(id)) return ElementKind::Resource;
    if (find_connector(id)) return ElementKind::Connector;
    if (find_flow(id)) return ElementKind::Flow;
    if (find_usage(id)) return ElementKind::Usage;
    if (!system_boundary_id.empty() && system_boundary_id == id)
        return ElementKind::Boundary;
    return std::nullopt;
}

const Process* Model::find_process(std::string_view id) const {
    for (const auto& process : processes) {
        if (process.identification.unique_ident == id) return &process;
    }
    return nullptr;
}

const Process* Model::process_of(std::string_view element_id) const {
    for (const auto& process : processes) {
        if (process.kind_of(element_id)) return &process;
    }
    return nullptr;
}

std::string_view to_string(StateKind kind) {
    switch (kind) {
        case StateKind::Product: return "Product";
        case StateKind::Energy: return "Energy";
        case StateKind::Information: return "Information";
    }
    return "Product";
}

std::string_view to_string(Placement placement) {
    return placement == Placement::Boundary ? "boundary" : "intermediate";
}

std::string_view to_string(ConnectorKind kind) {
    switch (kind) {
        case ConnectorKind::Fork: return "Fork";
        case ConnectorKind::Join: return "Join";
        case ConnectorKind::Decision: return "Decision";
        case ConnectorKind::Merge: return "Merge";
    }
    return "Fork";
}

std::optional<StateKind> state_kind_from(std::string_view text) {
    if (text == "Product") return StateKind::Product;
    if (text == "Energy") return StateKind::Energy;
    if (text == "Information") return StateKind::Information;
    return std::nullopt;
}

std::optional<Placement> placement_from(std::string_view text) {
    if (text == "boundary") return Placement::Boundary;
    if (text == "intermediate") return Placement::Intermediate;
    return std::nullopt;
}

std::optional<ConnectorKind> connector_kind_from(std::string_view text) {
    if (text == "Fork") return ConnectorKind::Fork;
    if (text == "Join") return ConnectorKind::Join;
    if (text == "Decision") return ConnectorKind::Decision;
    if (text == "Merge") return ConnectorKind::Merge;
    return std::nullopt;
}

}  // namespace fpd
