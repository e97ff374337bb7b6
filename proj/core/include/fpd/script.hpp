#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpd/model.hpp"

namespace fpd::script {

// 1-based, end-inclusive source range.
struct SourceSpan {
    std::string file;
    int start_line = 1;
    int start_col = 1;
    int end_line = 1;
    int end_col = 1;

    bool operator==(const SourceSpan&) const = default;
};

struct ParseError {
    SourceSpan span;
    std::vector<std::string> expected;  // never empty
    std::string found;
    std::optional<std::string> hint;

    std::string to_string() const;
};

struct ParseResult {
    // Engaged iff errors is empty; always a built model.
    std::optional<Model> model;
    std::vector<ParseError> errors;
    // Declaration span per element id, for diagnostics rendering.
    std::map<std::string, SourceSpan> spans;

    bool ok() const { return errors.empty(); }
};

// Parses source text into a built model. Omitted ids are generated from
// per-category counters (p1, s1, op1, ...), skipping every id written
// explicitly anywhere in the document. Recovers at statement boundaries
// and reports every error it can find.
ParseResult parse(std::string_view text, std::string_view file = "<input>");

// Canonical form: grouped declarations, explicit ids, 4-space indents,
// one statement per line. parse(print(m)) reproduces m, and a second
// print round leaves the text unchanged.
std::string print(const Model& model);

}  // namespace fpd::script
