#include "xml_tree.hpp"

#include <array>
#include <cctype>

namespace fpd::xmltree {

const Node* Node::child(std::string_view element_name) const {
    for (const auto& node : children) {
        if (node.name == element_name) return &node;
    }
    return nullptr;
}

std::vector<const Node*> Node::children_named(
    std::string_view element_name) const {
    std::vector<const Node*> result;
    for (const auto& node : children) {
        if (node.name == element_name) result.push_back(&node);
    }
    return result;
}

const std::string* Node::attribute(std::string_view attr_name) const {
    for (const auto& [name, value] : attributes) {
        if (name == attr_name) return &value;
    }
    return nullptr;
}

namespace {

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
           c == '-' || c == '.';
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

class Reader {
public:
    Reader(std::string_view input, ReadError& error)
        : input_(input), error_(error) {}

    std::optional<Node> run() {
        skip_prolog();
        if (at_end()) return fail("expected a root element");
        if (peek() != '<') return fail("expected '<' before the root element");
        auto root = read_element();
        if (!root) return std::nullopt;
        skip_misc();
        if (!error_.message.empty()) return std::nullopt;
        if (!at_end()) return fail("content after the root element");
        return root;
    }

private:
    bool at_end() const { return pos_ >= input_.size(); }
    char peek(size_t ahead = 0) const {
        return pos_ + ahead < input_.size() ? input_[pos_ + ahead] : '\0';
    }
    void advance() {
        if (input_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    bool consume(std::string_view text) {
        if (input_.substr(pos_, text.size()) != text) return false;
        for (size_t i = 0; i < text.size(); ++i) advance();
        return true;
    }
    std::nullopt_t fail(std::string message) {
        if (error_.message.empty())
            error_ = {line_, col_, std::move(message)};
        return std::nullopt;
    }

    void skip_spaces() {
        while (!at_end() && is_space(peek())) advance();
    }

    bool skip_comment() {
        if (!consume("<!--")) return false;
        while (!at_end()) {
            if (consume("-->")) return true;
            advance();
        }
        fail("unterminated comment");
        return true;
    }

    bool skip_instruction() {
        if (peek() != '<' || peek(1) != '?') return false;
        advance();
        advance();
        while (!at_end()) {
            if (consume("?>")) return true;
            advance();
        }
        fail("unterminated processing instruction");
        return true;
    }

    void skip_prolog() {
        for (;;) {
            skip_spaces();
            if (skip_instruction() || skip_comment()) continue;
            if (peek() == '<' && peek(1) == '!')
                fail("doctype and CDATA markup are not supported");
            return;
        }
    }

    void skip_misc() {
        for (;;) {
            skip_spaces();
            if (skip_comment() || skip_instruction()) continue;
            return;
        }
    }

    std::string read_name() {
        std::string name;
        if (at_end() || !is_name_start(peek())) return name;
        while (!at_end() && is_name_char(peek())) {
            name += peek();
            advance();
        }
        return name;
    }

    bool read_reference(std::string& out) {
        // Positioned at '&'.
        advance();
        std::string entity;
        while (!at_end() && peek() != ';') {
            entity += peek();
            advance();
            if (entity.size() > 10) break;
        }
        if (at_end() || peek() != ';') {
            fail("unterminated entity reference");
            return false;
        }
        advance();
        if (entity == "amp") out += '&';
        else if (entity == "lt") out += '<';
        else if (entity == "gt") out += '>';
        else if (entity == "quot") out += '"';
        else if (entity == "apos") out += '\'';
        else if (entity.size() > 1 && entity[0] == '#') {
            int code = 0;
            bool ok = false;
            size_t i = 1;
            int base = 10;
            if (entity.size() > 2 && (entity[1] == 'x' || entity[1] == 'X')) {
                base = 16;
                i = 2;
            }
            for (; i < entity.size(); ++i) {
                int digit;
                char c = entity[i];
                if (c >= '0' && c <= '9') digit = c - '0';
                else if (base == 16 && c >= 'a' && c <= 'f') digit = c - 'a' + 10;
                else if (base == 16 && c >= 'A' && c <= 'F') digit = c - 'A' + 10;
                else { ok = false; break; }
                code = code * base + digit;
                ok = true;
                if (code > 0x10FFFF) { ok = false; break; }
            }
            if (!ok) {
                fail("invalid character reference '&" + entity + ";'");
                return false;
            }
            append_utf8(out, code);
        } else {
            fail("unknown entity '&" + entity + ";'");
            return false;
        }
        return true;
    }

    static void append_utf8(std::string& out, int code) {
        if (code < 0x80) {
            out += static_cast<char>(code);
        } else if (code < 0x800) {
            out += static_cast<char>(0xC0 | (code >> 6));
            out += static_cast<char>(0x80 | (code & 0x3F));
        } else if (code < 0x10000) {
            out += static_cast<char>(0xE0 | (code >> 12));
            out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (code & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (code >> 18));
            out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (code & 0x3F));
        }
    }

    bool read_attribute(Node& node) {
        std::string name = read_name();
        if (name.empty()) {
            fail("expected an attribute name");
            return false;
        }
        skip_spaces();
        if (at_end() || peek() != '=') {
            fail("expected '=' after attribute '" + name + "'");
            return false;
        }
        advance();
        skip_spaces();
        char quote = peek();
        if (quote != '"' && quote != '\'') {
            fail("expected a quoted value for attribute '" + name + "'");
            return false;
        }
        advance();
        std::string value;
        while (!at_end() && peek() != quote) {
            if (peek() == '<') {
                fail("'<' is not allowed in attribute values");
                return false;
            }
            if (peek() == '&') {
                if (!read_reference(value)) return false;
            } else {
                value += peek();
                advance();
            }
        }
        if (at_end()) {
            fail("unterminated attribute value");
            return false;
        }
        advance();
        for (const auto& [existing, _] : node.attributes) {
            if (existing == name) {
                fail("duplicate attribute '" + name + "'");
                return false;
            }
        }
        node.attributes.emplace_back(std::move(name), std::move(value));
        return true;
    }

    std::optional<Node> read_element() {
        // Positioned at '<'.
        if (++depth_ > 200) return fail("markup nests too deeply");
        struct DepthGuard {
            int& depth;
            ~DepthGuard() { --depth; }
        } guard{depth_};
        advance();
        Node node;
        node.name = read_name();
        if (node.name.empty()) return fail("expected an element name");
        for (;;) {
            skip_spaces();
            if (at_end()) return fail("unterminated start tag");
            if (peek() == '/') {
                advance();
                if (peek() != '>') return fail("expected '>' after '/'");
                advance();
                return node;
            }
            if (peek() == '>') {
                advance();
                break;
            }
            if (!read_attribute(node)) return std::nullopt;
        }
        if (!read_content(node)) return std::nullopt;
        return node;
    }

    bool read_content(Node& node) {
        std::string text;
        auto flush_text = [&] {
            bool all_space = true;
            for (char c : text) {
                if (!is_space(c)) {
                    all_space = false;
                    break;
                }
            }
            if (!all_space) {
                if (!node.children.empty() && node.children.back().is_text())
                    node.children.back().text += text;
                else {
                    Node text_node;
                    text_node.text = std::move(text);
                    node.children.push_back(std::move(text_node));
                }
            }
            text.clear();
        };
        for (;;) {
            if (at_end()) {
                fail("unterminated element '" + node.name + "'");
                return false;
            }
            if (peek() == '<') {
                if (peek(1) == '/') {
                    flush_text();
                    advance();
                    advance();
                    std::string closing = read_name();
                    if (closing != node.name) {
                        fail("mismatched closing tag '</" + closing +
                             ">' for element '" + node.name + "'");
                        return false;
                    }
                    skip_spaces();
                    if (at_end() || peek() != '>') {
                        fail("expected '>' in closing tag");
                        return false;
                    }
                    advance();
                    return true;
                }
                if (peek(1) == '!') {
                    if (skip_comment()) {
                        if (!error_.message.empty()) return false;
                        continue;
                    }
                    fail("doctype and CDATA markup are not supported");
                    return false;
                }
                if (peek(1) == '?') {
                    if (skip_instruction()) {
                        if (!error_.message.empty()) return false;
                        continue;
                    }
                }
                flush_text();
                auto element = read_element();
                if (!element) return false;
                node.children.push_back(std::move(*element));
                continue;
            }
            if (peek() == '&') {
                if (!read_reference(text)) return false;
                continue;
            }
            text += peek();
            advance();
        }
    }

    std::string_view input_;
    ReadError& error_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int depth_ = 0;
};

struct AttributeOrder {
    std::string_view element;
    std::array<std::string_view, 5> attrs;
};

// Canonical attribute order per element. Unknown attributes keep their
// source order after the known ones.
constexpr AttributeOrder kAttributeOrders[] = {
    {"identification",
     {"uniqueIdent", "shortName", "longName", "versionNumber",
      "revisionNumber"}},
    {"systemLimit", {"id", "shortName", "", "", ""}},
    {"state", {"stateType", "placement", "refines", "", ""}},
    {"process", {"id", "", "", "", ""}},
    {"flow", {"id", "sourceRef", "targetRef", "", ""}},
    {"usage", {"id", "operatorRef", "resourceRef", "", ""}},
    {"processOperator", {"decompositionRef", "", "", "", ""}},
    {"connector", {"kind", "", "", "", ""}},
    {"characteristic", {"value", "unit", "", "", ""}},
    {"assigned", {"id", "", "", "", ""}},
    {"exit", {"id", "", "", "", ""}},
    {"entry", {"id", "", "", "", ""}},
    {"reference", {"id", "", "", "", ""}},
};

std::vector<std::pair<std::string, std::string>> ordered_attributes(
    const Node& node) {
    std::vector<std::pair<std::string, std::string>> result;
    result.reserve(node.attributes.size());
    const AttributeOrder* order = nullptr;
    for (const auto& entry : kAttributeOrders) {
        if (entry.element == node.name) {
            order = &entry;
            break;
        }
    }
    std::vector<bool> taken(node.attributes.size(), false);
    if (order) {
        for (const auto& known : order->attrs) {
            if (known.empty()) break;
            for (size_t i = 0; i < node.attributes.size(); ++i) {
                if (!taken[i] && node.attributes[i].first == known) {
                    result.push_back(node.attributes[i]);
                    taken[i] = true;
                    break;
                }
            }
        }
    }
    for (size_t i = 0; i < node.attributes.size(); ++i) {
        if (!taken[i]) result.push_back(node.attributes[i]);
    }
    return result;
}

void escape_attribute(const std::string& value, std::string& out) {
    for (unsigned char c : value) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default:
                if (c < 0x20) {
                    out += "&#";
                    out += std::to_string(static_cast<int>(c));
                    out += ';';
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
}

void escape_text(const std::string& value, std::string& out) {
    for (unsigned char c : value) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '\r': out += "&#13;"; break;
            default: out += static_cast<char>(c);
        }
    }
}

bool has_text_child(const Node& node) {
    for (const auto& child : node.children) {
        if (child.is_text()) return true;
    }
    return false;
}

void write_start_tag(const Node& node, bool self_close, std::string& out) {
    out += '<';
    out += node.name;
    for (const auto& [name, value] : ordered_attributes(node)) {
        out += ' ';
        out += name;
        out += "=\"";
        escape_attribute(value, out);
        out += '"';
    }
    out += self_close ? " />" : ">";
}

void write_inline(const Node& node, std::string& out);

void write_node(const Node& node, int depth, std::string& out) {
    out.append(static_cast<size_t>(depth) * 4, ' ');
    if (node.is_text()) {
        escape_text(node.text, out);
        out += '\n';
        return;
    }
    if (node.children.empty()) {
        if (node.attributes.empty()) {
            out += '<';
            out += node.name;
            out += "></";
            out += node.name;
            out += '>';
        } else {
            write_start_tag(node, true, out);
        }
        out += '\n';
        return;
    }
    if (has_text_child(node)) {
        // Mixed or text content renders inline so no layout whitespace
        // leaks into the character data.
        write_inline(node, out);
        out += '\n';
        return;
    }
    write_start_tag(node, false, out);
    out += '\n';
    for (const auto& child : node.children)
        write_node(child, depth + 1, out);
    out.append(static_cast<size_t>(depth) * 4, ' ');
    out += "</";
    out += node.name;
    out += ">\n";
}

void write_inline(const Node& node, std::string& out) {
    if (node.is_text()) {
        escape_text(node.text, out);
        return;
    }
    if (node.children.empty() && !node.attributes.empty()) {
        write_start_tag(node, true, out);
        return;
    }
    write_start_tag(node, false, out);
    for (const auto& child : node.children) write_inline(child, out);
    out += "</";
    out += node.name;
    out += '>';
}

}  // namespace

std::optional<Node> read(std::string_view input, ReadError& error) {
    error = {};
    return Reader(input, error).run();
}

std::string write(const Node& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_node(root, 0, out);
    return out;
}

}  // namespace fpd::xmltree
