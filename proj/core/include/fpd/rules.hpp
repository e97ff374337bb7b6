#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpd/model.hpp"

namespace fpd {

// Stable rule identifiers. Never renumbered; new rules append.
enum class RuleId {
    R1FlowStateToState,
    R2ProcHasOperator,
    R3StateAssigned,
    R4ProcMinStates,
    R5BoundaryStateDirection,
    R6IntermediateStateBoth,
    R7OperatorIo,
    R8UsageEndpoints,
    R9DecompConsistency,
    R10FlowAlternation,
    R11ProcHasBoundary,
    R12ConnectorArity,
    R13ResourceUsed,
};

inline constexpr int kRuleCount = 13;

enum class Severity { Error, Warning };

struct Diagnostic {
    RuleId rule = RuleId::R1FlowStateToState;
    Severity severity = Severity::Error;
    std::string message;
    // Offending element ids. Never empty; every id resolves in the model.
    std::vector<std::string> elements;
    std::string process_id;

    bool operator==(const Diagnostic&) const = default;
};

struct RuleInfo {
    RuleId id;
    std::string_view code;  // "R1".."R13"
    std::string_view name;  // stable slug
    std::string_view description;
    Severity default_severity;
};

// The static catalog, in rule order.
std::span<const RuleInfo> list_rules();

const RuleInfo& rule_info(RuleId id);
std::optional<RuleId> rule_from_code(std::string_view code);

struct RuleConfig {
    std::array<bool, kRuleCount> enabled;
    std::array<std::optional<Severity>, kRuleCount> severity_override;

    RuleConfig() { enabled.fill(true); }

    bool is_enabled(RuleId id) const {
        return enabled[static_cast<size_t>(id)];
    }
    void set_enabled(RuleId id, bool value) {
        enabled[static_cast<size_t>(id)] = value;
    }
    Severity severity_of(RuleId id) const {
        const auto& override_ = severity_override[static_cast<size_t>(id)];
        return override_ ? *override_ : rule_info(id).default_severity;
    }
    void set_severity(RuleId id, Severity severity) {
        severity_override[static_cast<size_t>(id)] = severity;
    }
};

// Evaluates every enabled rule over the model. Diagnostics are ordered by
// (process id, rule, element ids); the list is empty iff the model is
// compliant under the given configuration.
std::vector<Diagnostic> validate(const Model& model,
                                 const RuleConfig& config = RuleConfig());

// Diagnostics of a single rule at its default severity.
std::vector<Diagnostic> check_rule(const Model& model, RuleId rule);

std::string_view to_string(Severity severity);

}  // namespace fpd
