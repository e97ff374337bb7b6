#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpd/model.hpp"

namespace fpd::xml {

enum class XmlErrorKind {
    // Not well-formed markup; line/col point at the defect.
    Markup,
    // Well-formed but outside the interchange grammar; path names the
    // offending location.
    Schema,
    // A reference that does not resolve after reading; id names it.
    DanglingReference,
};

struct XmlError {
    XmlErrorKind kind = XmlErrorKind::Markup;
    std::string message;
    int line = 0;
    int col = 0;
    std::string path;
    std::string id;

    bool operator==(const XmlError&) const = default;
};

// Exports the model as an interchange document. Works on rule-violating
// models too; only a built model is required. Output is canonical and
// byte-deterministic: UTF-8, LF, 4-space indentation, fixed attribute
// order, sections in declaration order.
std::string serialize(const Model& model);

struct ReadOptions {
    // Lenient mode reports unknown elements/attributes and inconsistent
    // derived sections as warnings instead of rejecting the document.
    bool lenient = false;
};

struct ReadResult {
    // Engaged iff errors is empty.
    std::optional<Model> model;
    std::vector<XmlError> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

// Reads an interchange document back into a model. Accepts a bare
// <process> root as well as the <fpd> wrapper. The state-level
// assignments/flows sections are derived data: they are checked against
// the recomputed values (strict) or reported as warnings (lenient).
ReadResult deserialize(std::string_view document, ReadOptions options = {});

struct CanonicalizeResult {
    std::optional<std::string> text;
    std::vector<XmlError> errors;

    bool ok() const { return errors.empty(); }
};

// Reformats any well-formed document into the serializer's conventions
// without interpreting it. Idempotent; comments are dropped.
CanonicalizeResult canonicalize(std::string_view document);

std::string_view to_string(XmlErrorKind kind);

}  // namespace fpd::xml
