#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpd/model.hpp"

namespace fpd {

// Structural construction failures. These are distinct from rule
// violations: a model that builds may still be non-compliant, but a model
// that does not build cannot be queried at all.
enum class BuildErrorKind {
    DuplicateId,
    DanglingReference,
    DecompositionCycle,
    EmptyIdentifier,
    InvalidReference,
};

struct BuildError {
    BuildErrorKind kind = BuildErrorKind::DuplicateId;
    // Offending id for DuplicateId/DanglingReference/EmptyIdentifier/
    // InvalidReference; empty for cycles.
    std::string id;
    // Process ids along the cycle, first repeated at the end.
    std::vector<std::string> cycle;
    std::string message;

    bool operator==(const BuildError&) const = default;
};

struct BuildResult {
    // Engaged iff errors is empty.
    std::optional<Model> model;
    std::vector<BuildError> errors;

    bool ok() const { return errors.empty(); }
};

// Resolves every reference, computes root processes and rejects
// structurally broken input. Rule compliance is not required here.
BuildResult build_model(std::vector<Process> processes);

std::string_view to_string(BuildErrorKind kind);

}  // namespace fpd
