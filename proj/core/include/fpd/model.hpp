#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpd {

// Common identification block carried by every named element.
struct Identification {
    std::string unique_ident;
    std::string short_name;
    std::string long_name;
    std::string version_number;
    std::string revision_number;
    std::vector<std::string> references;

    bool operator==(const Identification&) const = default;
};

// Nested feature description. Children ids are unique among siblings;
// all ids share the model-wide id space.
struct Characteristic {
    Identification identification;
    std::string value;
    std::string unit;
    std::vector<Characteristic> children;

    bool operator==(const Characteristic&) const = default;
};

enum class StateKind { Product, Energy, Information };

// Boundary states sit on the system boundary and act as process inputs or
// outputs; intermediate states live inside it and need flows in both
// directions. The flag records authorial intent; the rules check it
// against the actual flow directions.
enum class Placement { Boundary, Intermediate };

struct StateNode {
    Identification identification;
    StateKind kind = StateKind::Product;
    Placement placement = Placement::Boundary;
    std::vector<Characteristic> characteristics;
    // Id of the state in the parent process this one mirrors across a
    // decomposition link. Empty when unset.
    std::optional<std::string> refines;

    bool operator==(const StateNode&) const = default;
};

struct ProcessOperator {
    Identification identification;
    std::vector<Characteristic> characteristics;
    // Id of the sub-process refining this operator.
    std::optional<std::string> decomposition;

    bool operator==(const ProcessOperator&) const = default;
};

struct TechnicalResource {
    Identification identification;
    std::vector<Characteristic> characteristics;

    bool operator==(const TechnicalResource&) const = default;
};

// Fork/Join route parallel flows, Decision/Merge alternative flows.
enum class ConnectorKind { Fork, Join, Decision, Merge };

struct ConnectorNode {
    Identification identification;
    ConnectorKind kind = ConnectorKind::Fork;

    bool operator==(const ConnectorNode&) const = default;
};

// Directed edge between states, operators and connector nodes.
struct Flow {
    std::string id;
    std::string source;
    std::string target;

    bool operator==(const Flow&) const = default;
};

// Undirected link between a process operator and the technical resource
// realizing it. Endpoints are stored as declared; rule R8 checks kinds.
struct Usage {
    std::string id;
    std::string operator_id;
    std::string resource_id;

    bool operator==(const Usage&) const = default;
};

// The kind of element an id resolves to within a process.
enum class ElementKind {
    State,
    Operator,
    Resource,
    Connector,
    Flow,
    Usage,
    Boundary,
};

struct Process {
    Identification identification;
    std::string system_boundary_id;
    std::vector<StateNode> states;
    std::vector<ProcessOperator> operators;
    std::vector<TechnicalResource> resources;
    std::vector<ConnectorNode> connectors;
    std::vector<Flow> flows;
    std::vector<Usage> usages;

    bool operator==(const Process&) const = default;

    const StateNode* find_state(std::string_view id) const;
    const ProcessOperator* find_operator(std::string_view id) const;
    const TechnicalResource* find_resource(std::string_view id) const;
    const ConnectorNode* find_connector(std::string_view id) const;
    const Flow* find_flow(std::string_view id) const;
    const Usage* find_usage(std::string_view id) const;
    std::optional<ElementKind> kind_of(std::string_view id) const;
};

// Document container. Immutable once built; all queries are read-only.
struct Model {
    std::vector<Process> processes;
    // Processes not referenced by any operator decomposition, in
    // declaration order.
    std::vector<std::string> root_process_ids;

    bool operator==(const Model&) const = default;

    const Process* find_process(std::string_view id) const;
    // Process containing the element with this id, if any.
    const Process* process_of(std::string_view element_id) const;
};

std::string_view to_string(StateKind kind);
std::string_view to_string(Placement placement);
std::string_view to_string(ConnectorKind kind);

std::optional<StateKind> state_kind_from(std::string_view text);
std::optional<Placement> placement_from(std::string_view text);
std::optional<ConnectorKind> connector_kind_from(std::string_view text);

}  // namespace fpd
