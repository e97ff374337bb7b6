#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Minimal markup tree shared by the serializer, the deserializer and the
// canonicalizer. Covers the subset of XML the interchange format uses:
// elements, attributes, character data, comments and the declaration.
// A single writer keeps the output byte-deterministic.

namespace fpd::xmltree {

struct Node {
    // Empty name marks a text node; `text` holds its content.
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Node> children;
    std::string text;

    bool is_text() const { return name.empty(); }

    const Node* child(std::string_view element_name) const;
    std::vector<const Node*> children_named(std::string_view element_name) const;
    const std::string* attribute(std::string_view attr_name) const;
};

struct ReadError {
    int line = 0;
    int col = 0;
    std::string message;
};

// Parses one document; returns its root element. Whitespace-only text is
// dropped, adjacent text runs are merged, comments and the declaration
// are skipped.
std::optional<Node> read(std::string_view input, ReadError& error);

// Canonical form: XML declaration, LF newlines, 4-space indentation,
// table-driven attribute order, double quotes. Elements with attributes
// and no children self-close; attribute-less empty elements render as an
// open/close pair. Idempotent through read().
std::string write(const Node& root);

}  // namespace fpd::xmltree
