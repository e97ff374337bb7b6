#pragma once

#include <string>
#include <vector>

#include "fpd/model.hpp"

namespace fpd {

struct BoundaryStates {
    std::vector<const StateNode*> inputs;
    std::vector<const StateNode*> outputs;
};

// Classifies boundary states by flow direction: inputs have only outgoing
// flows, outputs only incoming ones. Boundary states whose flows violate
// the direction rule (none, or both directions) appear in neither list.
BoundaryStates boundary_states(const Process& process);

struct OperatorIo {
    std::vector<const StateNode*> inputs;
    std::vector<const StateNode*> outputs;
};

// States feeding and fed by the operator, reached transitively through
// connector nodes. Results are deduplicated and in declaration order.
OperatorIo operator_io(const ProcessOperator& op, const Process& process);

// Resources linked to the operator by a usage, in usage declaration order.
std::vector<const TechnicalResource*> resources_of(const ProcessOperator& op,
                                                   const Process& process);

// The sub-process the operator decomposes into, or null.
const Process* decomposition_of(const ProcessOperator& op, const Model& model);

// One maximal directed path whose interior nodes are all connectors.
// Origin and terminus are states or operators; a connector appears as an
// endpoint only when the path dead-ends at it (no incoming flows on the
// origin side, no usable continuation on the terminus side).
struct FlowPath {
    std::string origin;
    std::vector<std::string> connectors;
    std::string terminus;

    auto operator<=>(const FlowPath&) const = default;
};

std::vector<FlowPath> flow_paths(const Process& process);

// Operators connected to the state through flow paths, in either
// direction, in declaration order.
std::vector<const ProcessOperator*> assigned_operators(const StateNode& state,
                                                       const Process& process);

// Length of the longest decomposition chain starting at the process
// (a process without decomposed operators has depth 1).
int decomposition_depth(const Process& process, const Model& model);

}  // namespace fpd
