#pragma once

// Deterministic random models for property tests. Engine draws are used
// directly (no std distributions) so sequences are identical across
// platforms and standard library versions.

#include <cassert>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fpd/build.hpp"
#include "fpd/model.hpp"

namespace testsupport {

class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    // Inclusive range.
    int range(int lo, int hi) {
        return lo + static_cast<int>(engine_() %
                                     static_cast<uint64_t>(hi - lo + 1));
    }
    bool chance(int percent) { return range(1, 100) <= percent; }

private:
    std::mt19937_64 engine_;
};

struct GenOptions {
    // Restrict generated content to what the text DSL can express:
    // identifications carry only id and short name, and usage endpoints
    // are never written resource-first (the parser normalizes endpoint
    // order, so a reversed pair cannot survive a parse/print cycle).
    bool script_expressible = true;
};

namespace detail {

inline const char* kNames[] = {
    "Collar",        "Rivet Position", "Sheet Metal",   "Weld Seam",
    "Control Data",  "Hydraulic Oil",  "Thermal Energy", "Torque",
    "Station 7",     "A&B <Check>",    "Quote \" Name", "päck",
    "Screwing Robot", "Feed Rate",     "internal",      "x",
};

inline std::string pick_name(Rng& rng) {
    return kNames[rng.range(0, static_cast<int>(std::size(kNames)) - 1)];
}

inline std::string make_id(Rng& rng, const char* prefix, int& counter) {
    ++counter;
    switch (rng.range(0, 9)) {
        case 8:
            return std::string("id ") + prefix + " &\"<" +
                   std::to_string(counter) + ">";
        case 9: return std::string("Ref_") + std::to_string(counter);
        default: return prefix + std::to_string(counter);
    }
}

inline fpd::Identification make_identification(Rng& rng, const char* prefix,
                                               int& counter,
                                               const GenOptions& options) {
    fpd::Identification ident;
    ident.unique_ident = make_id(rng, prefix, counter);
    ident.short_name = pick_name(rng);
    if (!options.script_expressible) {
        if (rng.chance(40)) ident.long_name = pick_name(rng);
        if (rng.chance(30)) ident.version_number = std::to_string(rng.range(1, 9));
        if (rng.chance(20)) ident.revision_number = std::to_string(rng.range(1, 99));
        if (rng.chance(20)) {
            int refs = rng.range(1, 2);
            for (int i = 0; i < refs; ++i)
                ident.references.push_back("ref-" + std::to_string(rng.range(1, 999)));
        }
    }
    return ident;
}

inline std::vector<fpd::Characteristic> make_characteristics(
    Rng& rng, int& counter, const GenOptions& options, int depth) {
    std::vector<fpd::Characteristic> result;
    if (depth > 2 || !rng.chance(depth == 0 ? 35 : 25)) return result;
    int count = rng.range(1, 2);
    for (int i = 0; i < count; ++i) {
        fpd::Characteristic ch;
        ch.identification = make_identification(rng, "ch", counter, options);
        ch.value = pick_name(rng);
        if (rng.chance(30)) ch.unit = rng.chance(50) ? "mm" : "N/m²";
        ch.children = make_characteristics(rng, counter, options, depth + 1);
        result.push_back(std::move(ch));
    }
    return result;
}

}  // namespace detail

inline fpd::Model random_model(uint64_t seed, GenOptions options = {}) {
    using namespace detail;
    Rng rng(seed);
    int counter = 0;

    int process_count = rng.range(1, 3);
    std::vector<std::string> process_ids;
    for (int p = 0; p < process_count; ++p)
        process_ids.push_back(make_id(rng, "p", counter));

    std::vector<std::string> earlier_state_ids;
    std::vector<fpd::Process> processes;
    for (int p = 0; p < process_count; ++p) {
        fpd::Process process;
        process.identification.unique_ident = process_ids[p];
        process.identification.short_name = pick_name(rng);
        process.system_boundary_id = make_id(rng, "b", counter);

        int states = rng.range(0, 5);
        std::vector<std::string> flow_nodes;
        std::vector<std::string> state_ids;
        for (int i = 0; i < states; ++i) {
            fpd::StateNode state;
            state.identification =
                make_identification(rng, "s", counter, options);
            state.kind = static_cast<fpd::StateKind>(rng.range(0, 2));
            state.placement = rng.chance(70) ? fpd::Placement::Boundary
                                             : fpd::Placement::Intermediate;
            if (p > 0 && !earlier_state_ids.empty() && rng.chance(20))
                state.refines = earlier_state_ids[rng.range(
                    0, static_cast<int>(earlier_state_ids.size()) - 1)];
            state.characteristics =
                make_characteristics(rng, counter, options, 0);
            flow_nodes.push_back(state.identification.unique_ident);
            state_ids.push_back(state.identification.unique_ident);
            process.states.push_back(std::move(state));
        }

        int operators = rng.range(0, 3);
        std::vector<std::string> operator_ids;
        for (int i = 0; i < operators; ++i) {
            fpd::ProcessOperator op;
            op.identification =
                make_identification(rng, "op", counter, options);
            if (p + 1 < process_count && rng.chance(30))
                op.decomposition = process_ids[rng.range(p + 1,
                                                         process_count - 1)];
            op.characteristics =
                make_characteristics(rng, counter, options, 0);
            flow_nodes.push_back(op.identification.unique_ident);
            operator_ids.push_back(op.identification.unique_ident);
            process.operators.push_back(std::move(op));
        }

        int resources = rng.range(0, 2);
        std::vector<std::string> resource_ids;
        for (int i = 0; i < resources; ++i) {
            fpd::TechnicalResource resource;
            resource.identification =
                make_identification(rng, "r", counter, options);
            resource.characteristics =
                make_characteristics(rng, counter, options, 0);
            resource_ids.push_back(resource.identification.unique_ident);
            process.resources.push_back(std::move(resource));
        }

        int connectors = rng.range(0, 2);
        for (int i = 0; i < connectors; ++i) {
            fpd::ConnectorNode connector;
            connector.identification =
                make_identification(rng, "c", counter, options);
            connector.kind = static_cast<fpd::ConnectorKind>(rng.range(0, 3));
            flow_nodes.push_back(connector.identification.unique_ident);
            process.connectors.push_back(std::move(connector));
        }

        if (flow_nodes.size() >= 2) {
            int flows = rng.range(0, 8);
            for (int i = 0; i < flows; ++i) {
                fpd::Flow flow;
                flow.id = make_id(rng, "f", counter);
                int max = static_cast<int>(flow_nodes.size()) - 1;
                flow.source = flow_nodes[rng.range(0, max)];
                do {
                    flow.target = flow_nodes[rng.range(0, max)];
                } while (flow.target == flow.source);
                process.flows.push_back(std::move(flow));
            }
        }

        int usages = rng.range(0, 3);
        std::vector<std::string> usage_pool = flow_nodes;
        usage_pool.insert(usage_pool.end(), resource_ids.begin(),
                          resource_ids.end());
        for (int i = 0; i < usages; ++i) {
            fpd::Usage usage;
            usage.id = make_id(rng, "u", counter);
            if (!operator_ids.empty() && !resource_ids.empty() &&
                rng.chance(80)) {
                usage.operator_id = operator_ids[rng.range(
                    0, static_cast<int>(operator_ids.size()) - 1)];
                usage.resource_id = resource_ids[rng.range(
                    0, static_cast<int>(resource_ids.size()) - 1)];
            } else if (!usage_pool.empty()) {
                int max = static_cast<int>(usage_pool.size()) - 1;
                usage.operator_id = usage_pool[rng.range(0, max)];
                usage.resource_id = usage_pool[rng.range(0, max)];
                // A resource-first operator pair would be normalized by
                // the DSL parser; skip that one combination.
                bool reversed =
                    std::find(resource_ids.begin(), resource_ids.end(),
                              usage.operator_id) != resource_ids.end() &&
                    std::find(operator_ids.begin(), operator_ids.end(),
                              usage.resource_id) != operator_ids.end();
                if (reversed) std::swap(usage.operator_id, usage.resource_id);
            } else {
                continue;
            }
            process.usages.push_back(std::move(usage));
        }

        earlier_state_ids.insert(earlier_state_ids.end(), state_ids.begin(),
                                 state_ids.end());
        processes.push_back(std::move(process));
    }

    auto built = fpd::build_model(std::move(processes));
    assert(built.ok());
    return std::move(*built.model);
}

}  // namespace testsupport
