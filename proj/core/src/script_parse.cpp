#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>
#include <variant>

#include "fpd/build.hpp"
#include "fpd/script.hpp"

namespace fpd::script {

namespace {

enum class TokenKind {
    Ident,
    String,
    Equals,
    Arrow,     // ->
    Link,      // --
    LBrace,
    RBrace,
    Newline,
    Semicolon,
    End,
    Bad,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    SourceSpan span;
};

std::string describe(const Token& token) {
    switch (token.kind) {
        case TokenKind::Ident: return "'" + token.text + "'";
        case TokenKind::String: return "string \"" + token.text + "\"";
        case TokenKind::Equals: return "'='";
        case TokenKind::Arrow: return "'->'";
        case TokenKind::Link: return "'--'";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::Newline: return "end of line";
        case TokenKind::Semicolon: return "';'";
        case TokenKind::End: return "end of input";
        case TokenKind::Bad: return "'" + token.text + "'";
    }
    return "?";
}

class Lexer {
public:
    Lexer(std::string_view text, std::string_view file)
        : text_(text), file_(file) {}

    std::vector<Token> run(std::vector<ParseError>& errors) {
        std::vector<Token> tokens;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
                continue;
            }
            int line = line_, col = col_;
            if (c == '\n') {
                advance();
                push(tokens, TokenKind::Newline, "\n", line, col, line, col);
                continue;
            }
            if (c == '{') { single(tokens, TokenKind::LBrace, "{"); continue; }
            if (c == '}') { single(tokens, TokenKind::RBrace, "}"); continue; }
            if (c == ';') { single(tokens, TokenKind::Semicolon, ";"); continue; }
            if (c == '=') { single(tokens, TokenKind::Equals, "="); continue; }
            if (c == '-') {
                char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
                if (next == '>') {
                    advance();
                    advance();
                    push(tokens, TokenKind::Arrow, "->", line, col, line,
                         col + 1);
                    continue;
                }
                if (next == '-') {
                    advance();
                    advance();
                    push(tokens, TokenKind::Link, "--", line, col, line,
                         col + 1);
                    continue;
                }
                advance();
                push(tokens, TokenKind::Bad, "-", line, col, line, col);
                errors.push_back({span(line, col, line, col),
                                  {"'->'", "'--'"},
                                  "'-'",
                                  std::nullopt});
                continue;
            }
            if (c == '"') {
                lex_string(tokens, errors);
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string word;
                while (pos_ < text_.size()) {
                    char w = text_[pos_];
                    if (!std::isalnum(static_cast<unsigned char>(w)) &&
                        w != '_')
                        break;
                    word += w;
                    advance();
                }
                push(tokens, TokenKind::Ident, word, line, col, line,
                     col + static_cast<int>(word.size()) - 1);
                continue;
            }
            advance();
            std::string bad(1, c);
            push(tokens, TokenKind::Bad, bad, line, col, line, col);
            errors.push_back({span(line, col, line, col),
                              {"a declaration"},
                              "'" + bad + "'",
                              std::nullopt});
        }
        push(tokens, TokenKind::End, "", line_, col_, line_, col_);
        return tokens;
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    SourceSpan span(int l1, int c1, int l2, int c2) const {
        return {std::string(file_), l1, c1, l2, c2};
    }

    void push(std::vector<Token>& tokens, TokenKind kind, std::string text,
              int l1, int c1, int l2, int c2) {
        tokens.push_back({kind, std::move(text), span(l1, c1, l2, c2)});
    }

    void single(std::vector<Token>& tokens, TokenKind kind, std::string text) {
        int line = line_, col = col_;
        advance();
        push(tokens, kind, std::move(text), line, col, line, col);
    }

    void lex_string(std::vector<Token>& tokens,
                    std::vector<ParseError>& errors) {
        int line = line_, col = col_;
        advance();  // opening quote
        std::string value;
        for (;;) {
            if (pos_ >= text_.size() || text_[pos_] == '\n') {
                errors.push_back({span(line, col, line_, col_),
                                  {"closing '\"'"},
                                  pos_ >= text_.size() ? "end of input"
                                                       : "end of line",
                                  std::nullopt});
                push(tokens, TokenKind::Bad, value, line, col, line_, col_);
                return;
            }
            char c = text_[pos_];
            if (c == '"') {
                int end_line = line_, end_col = col_;
                advance();
                push(tokens, TokenKind::String, value, line, col, end_line,
                     end_col);
                return;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size()) continue;
                char esc = text_[pos_];
                switch (esc) {
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case 'r': value += '\r'; break;
                    default:
                        errors.push_back(
                            {span(line_, col_ - 1, line_, col_),
                             {"'\\\"'", "'\\\\'", "'\\n'", "'\\t'", "'\\r'"},
                             std::string("'\\") + esc + "'",
                             std::nullopt});
                        value += esc;
                }
                advance();
                continue;
            }
            value += c;
            advance();
        }
    }

    std::string_view text_;
    std::string_view file_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// Raw declarations straight from the grammar, before id allocation and
// reference resolution.
struct RawName {
    std::string text;
    SourceSpan span;
};

struct RawCharacteristic {
    RawName name;
    std::optional<RawName> id;
    std::string value;
    std::string unit;
    std::vector<RawCharacteristic> children;
};

enum class Direction { In, Out, Internal };

struct RawState {
    RawName name;
    std::optional<RawName> id;
    StateKind kind = StateKind::Product;
    Direction direction = Direction::In;
    std::optional<RawName> refines;
    std::vector<RawCharacteristic> characteristics;
};

struct RawOperator {
    RawName name;
    std::optional<RawName> id;
    std::optional<RawName> decompose;
    std::vector<RawCharacteristic> characteristics;
};

struct RawResource {
    RawName name;
    std::optional<RawName> id;
    std::vector<RawCharacteristic> characteristics;
};

struct RawConnector {
    RawName name;
    std::optional<RawName> id;
    ConnectorKind kind = ConnectorKind::Fork;
};

struct RawFlow {
    RawName source;
    RawName target;
    std::optional<RawName> id;
    SourceSpan span;
};

struct RawUsage {
    RawName first;
    RawName second;
    std::optional<RawName> id;
    SourceSpan span;
};

struct RawProcess {
    RawName name;
    std::optional<RawName> id;
    std::optional<RawName> boundary;
    std::vector<RawState> states;
    std::vector<RawOperator> operators;
    std::vector<RawResource> resources;
    std::vector<RawConnector> connectors;
    std::vector<RawFlow> flows;
    std::vector<RawUsage> usages;
};

const std::unordered_set<std::string_view> kKeywords = {
    "process", "product",  "energy", "information", "operator",
    "resource", "fork",    "join",   "decision",    "merge",
    "flow",     "usage",   "char",   "unit",        "in",
    "out",      "internal", "refines", "decompose", "id",
    "boundary",
};

bool is_keyword(std::string_view word) { return kKeywords.count(word) > 0; }

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<ParseError>& errors)
        : tokens_(std::move(tokens)), errors_(errors) {}

    std::vector<RawProcess> run() {
        std::vector<RawProcess> processes;
        skip_blank();
        if (at(TokenKind::End)) {
            error({"'process'"}, std::nullopt);
            return processes;
        }
        while (!at(TokenKind::End)) {
            if (at_word("process")) {
                if (auto process = parse_process())
                    processes.push_back(std::move(*process));
            } else {
                error({"'process'"}, std::nullopt);
                recover_to_process();
            }
            skip_blank();
        }
        return processes;
    }

private:
    const Token& peek(size_t ahead = 0) const {
        size_t index = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[index];
    }
    const Token& take() {
        const Token& token = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return token;
    }
    bool at(TokenKind kind) const { return peek().kind == kind; }
    bool at_word(std::string_view word) const {
        return peek().kind == TokenKind::Ident && peek().text == word;
    }
    bool at_name() const {
        return peek().kind == TokenKind::String ||
               (peek().kind == TokenKind::Ident && !is_keyword(peek().text));
    }

    void error(std::vector<std::string> expected,
               std::optional<std::string> hint,
               const Token* at_token = nullptr) {
        const Token& token = at_token ? *at_token : peek();
        errors_.push_back(
            {token.span, std::move(expected), describe(token), std::move(hint)});
    }

    void skip_blank() {
        while (at(TokenKind::Newline) || at(TokenKind::Semicolon)) take();
    }

    void recover_to_process() {
        while (!at(TokenKind::End) && !at_word("process")) take();
    }

    // Skips to the end of the current statement. Never consumes the
    // closing brace and always makes progress.
    void recover_statement() {
        if (at(TokenKind::RBrace) || at(TokenKind::End)) return;
        while (!at(TokenKind::End)) {
            TokenKind kind = peek().kind;
            if (kind == TokenKind::Newline || kind == TokenKind::Semicolon) {
                take();
                return;
            }
            if (kind == TokenKind::RBrace) return;
            take();
        }
    }

    bool expect_statement_end() {
        if (at(TokenKind::RBrace) || at(TokenKind::End)) return true;
        if (at(TokenKind::Newline) || at(TokenKind::Semicolon)) {
            skip_blank();
            return true;
        }
        error({"end of statement"}, std::nullopt);
        recover_statement();
        return false;
    }

    std::optional<RawName> parse_name(std::string_view what) {
        if (at_name()) {
            const Token& token = take();
            return RawName{token.text, token.span};
        }
        if (peek().kind == TokenKind::Ident) {
            error({std::string(what)},
                  "'" + peek().text +
                      "' is a keyword; quote the name to use it");
        } else {
            error({std::string(what)}, std::nullopt);
        }
        return std::nullopt;
    }

    // id=<ident|string>
    std::optional<RawName> parse_id_value() {
        take();  // 'id'
        if (!at(TokenKind::Equals)) {
            error({"'='"}, std::nullopt);
            recover_statement();
            return std::nullopt;
        }
        take();
        if (peek().kind == TokenKind::Ident && is_keyword(peek().text)) {
            error({"an identifier"},
                  "'" + peek().text +
                      "' is a keyword; quote the id to use it");
            recover_statement();
            return std::nullopt;
        }
        if (peek().kind == TokenKind::Ident ||
            peek().kind == TokenKind::String) {
            const Token& token = take();
            if (token.text.empty()) {
                error({"a non-empty identifier"}, std::nullopt, &token);
                return std::nullopt;
            }
            return RawName{token.text, token.span};
        }
        error({"an identifier"}, std::nullopt);
        recover_statement();
        return std::nullopt;
    }

    std::optional<RawName> parse_ref(std::string_view what) {
        if (peek().kind == TokenKind::Ident && !is_keyword(peek().text)) {
            const Token& token = take();
            return RawName{token.text, token.span};
        }
        if (peek().kind == TokenKind::String) {
            const Token& token = take();
            return RawName{token.text, token.span};
        }
        error({std::string(what)}, std::nullopt);
        return std::nullopt;
    }

    std::vector<RawCharacteristic> parse_characteristic_block() {
        std::vector<RawCharacteristic> result;
        take();  // '{'
        if (++char_depth_ > 64) {
            error({"a flatter structure"},
                  "characteristics nest too deeply");
            skip_balanced_braces();
            --char_depth_;
            return result;
        }
        skip_blank();
        while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
            if (at_word("char")) {
                if (auto ch = parse_characteristic())
                    result.push_back(std::move(*ch));
            } else {
                error({"'char'", "'}'"}, std::nullopt);
                recover_statement();
            }
            skip_blank();
        }
        if (at(TokenKind::RBrace)) take();
        else error({"'}'"}, std::nullopt);
        --char_depth_;
        return result;
    }

    // Consumes the remainder of an already-entered block.
    void skip_balanced_braces() {
        int depth = 1;
        while (!at(TokenKind::End) && depth > 0) {
            if (at(TokenKind::LBrace)) ++depth;
            if (at(TokenKind::RBrace)) --depth;
            take();
        }
    }

    std::optional<RawCharacteristic> parse_characteristic() {
        take();  // 'char'
        RawCharacteristic ch;
        auto name = parse_name("a characteristic name");
        if (!name) {
            recover_statement();
            return std::nullopt;
        }
        ch.name = std::move(*name);
        if (at_word("id")) {
            auto id = parse_id_value();
            if (!id) return std::nullopt;
            ch.id = std::move(*id);
        }
        if (!at(TokenKind::Equals)) {
            error({"'='"}, std::nullopt);
            recover_statement();
            return std::nullopt;
        }
        take();
        if (!at(TokenKind::String)) {
            error({"a quoted value"}, std::nullopt);
            recover_statement();
            return std::nullopt;
        }
        ch.value = take().text;
        if (at_word("unit")) {
            take();
            if (!at(TokenKind::String)) {
                error({"a quoted unit"}, std::nullopt);
                recover_statement();
                return std::nullopt;
            }
            ch.unit = take().text;
        }
        if (at(TokenKind::LBrace))
            ch.children = parse_characteristic_block();
        expect_statement_end();
        return ch;
    }

    std::optional<RawProcess> parse_process() {
        take();  // 'process'
        RawProcess process;
        auto name = parse_name("a process name");
        if (!name) {
            recover_to_process();
            return std::nullopt;
        }
        process.name = std::move(*name);
        while (at_word("id") || at_word("boundary")) {
            bool is_id = peek().text == "id";
            if (is_id && process.id) error({"'boundary'", "'{'"}, std::nullopt);
            if (!is_id && process.boundary) error({"'{'"}, std::nullopt);
            if (is_id) {
                auto value = parse_id_value();
                if (value) process.id = std::move(*value);
            } else {
                auto value = parse_id_value();
                if (value) process.boundary = std::move(*value);
            }
        }
        skip_blank();
        if (!at(TokenKind::LBrace)) {
            error({"'{'"}, std::nullopt);
            recover_to_process();
            return process;
        }
        take();
        skip_blank();
        while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
            parse_decl(process);
            skip_blank();
        }
        if (at(TokenKind::RBrace)) take();
        else error({"'}'"}, std::nullopt);
        return process;
    }

    void parse_decl(RawProcess& process) {
        if (peek().kind != TokenKind::Ident) {
            error({"a declaration"}, std::nullopt);
            recover_statement();
            return;
        }
        const std::string& word = peek().text;
        if (word == "product" || word == "energy" || word == "information") {
            parse_state(process);
        } else if (word == "operator") {
            parse_operator(process);
        } else if (word == "resource") {
            parse_resource(process);
        } else if (word == "fork" || word == "join" || word == "decision" ||
                   word == "merge") {
            parse_connector(process);
        } else if (word == "flow") {
            parse_flow(process);
        } else if (word == "usage") {
            parse_usage(process);
        } else {
            error({"'product'", "'energy'", "'information'", "'operator'",
                   "'resource'", "'fork'", "'join'", "'decision'", "'merge'",
                   "'flow'", "'usage'"},
                  word == "char" ? std::optional<std::string>(
                                       "characteristics belong inside an "
                                       "element's '{ ... }' block")
                                 : std::nullopt);
            recover_statement();
        }
    }

    void parse_state(RawProcess& process) {
        RawState state;
        const std::string& kind_word = take().text;
        if (kind_word == "product") state.kind = StateKind::Product;
        else if (kind_word == "energy") state.kind = StateKind::Energy;
        else state.kind = StateKind::Information;
        auto name = parse_name("a state name");
        if (!name) {
            recover_statement();
            return;
        }
        state.name = std::move(*name);
        if (at_word("id")) {
            auto id = parse_id_value();
            if (!id) return;
            state.id = std::move(*id);
        }
        if (at_word("in")) { take(); state.direction = Direction::In; }
        else if (at_word("out")) { take(); state.direction = Direction::Out; }
        else if (at_word("internal")) {
            take();
            state.direction = Direction::Internal;
        } else {
            error({"'in'", "'out'", "'internal'"}, std::nullopt);
            recover_statement();
            return;
        }
        if (at_word("refines")) {
            take();
            auto target = parse_ref("a state id");
            if (!target) {
                recover_statement();
                return;
            }
            state.refines = std::move(*target);
        }
        if (at(TokenKind::LBrace))
            state.characteristics = parse_characteristic_block();
        expect_statement_end();
        process.states.push_back(std::move(state));
    }

    void parse_operator(RawProcess& process) {
        take();
        RawOperator op;
        auto name = parse_name("an operator name");
        if (!name) {
            recover_statement();
            return;
        }
        op.name = std::move(*name);
        if (at_word("id")) {
            auto id = parse_id_value();
            if (!id) return;
            op.id = std::move(*id);
        }
        if (at_word("decompose")) {
            take();
            auto target = parse_ref("a process id");
            if (!target) {
                recover_statement();
                return;
            }
            op.decompose = std::move(*target);
        }
        if (at(TokenKind::LBrace))
            op.characteristics = parse_characteristic_block();
        expect_statement_end();
        process.operators.push_back(std::move(op));
    }

    void parse_resource(RawProcess& process) {
        take();
        RawResource resource;
        auto name = parse_name("a resource name");
        if (!name) {
            recover_statement();
            return;
        }
        resource.name = std::move(*name);
        if (at_word("id")) {
            auto id = parse_id_value();
            if (!id) return;
            resource.id = std::move(*id);
        }
        if (at(TokenKind::LBrace))
            resource.characteristics = parse_characteristic_block();
        expect_statement_end();
        process.resources.push_back(std::move(resource));
    }

    void parse_connector(RawProcess& process) {
        RawConnector connector;
        const std::string& word = take().text;
        if (word == "fork") connector.kind = ConnectorKind::Fork;
        else if (word == "join") connector.kind = ConnectorKind::Join;
        else if (word == "decision") connector.kind = ConnectorKind::Decision;
        else connector.kind = ConnectorKind::Merge;
        auto name = parse_name("a connector name");
        if (!name) {
            recover_statement();
            return;
        }
        connector.name = std::move(*name);
        if (at_word("id")) {
            auto id = parse_id_value();
            if (!id) return;
            connector.id = std::move(*id);
        }
        expect_statement_end();
        process.connectors.push_back(std::move(connector));
    }

    void parse_flow(RawProcess& process) {
        SourceSpan start = peek().span;
        take();
        RawFlow flow;
        auto source = parse_ref("a flow source");
        if (!source) {
            recover_statement();
            return;
        }
        flow.source = std::move(*source);
        if (!at(TokenKind::Arrow)) {
            error({"'->'"}, std::nullopt);
            recover_statement();
            return;
        }
        take();
        auto target = parse_ref("a flow target");
        if (!target) {
            recover_statement();
            return;
        }
        flow.target = std::move(*target);
        if (at_word("id")) {
            auto id = parse_id_value();
            if (!id) return;
            flow.id = std::move(*id);
        }
        flow.span = merge(start, tokens_[pos_ - 1].span);
        expect_statement_end();
        process.flows.push_back(std::move(flow));
    }

    void parse_usage(RawProcess& process) {
        SourceSpan start = peek().span;
        take();
        RawUsage usage;
        auto first = parse_ref("a usage endpoint");
        if (!first) {
            recover_statement();
            return;
        }
        usage.first = std::move(*first);
        if (!at(TokenKind::Link)) {
            error({"'--'"}, std::nullopt);
            recover_statement();
            return;
        }
        take();
        auto second = parse_ref("a usage endpoint");
        if (!second) {
            recover_statement();
            return;
        }
        usage.second = std::move(*second);
        if (at_word("id")) {
            auto id = parse_id_value();
            if (!id) return;
            usage.id = std::move(*id);
        }
        usage.span = merge(start, tokens_[pos_ - 1].span);
        expect_statement_end();
        process.usages.push_back(std::move(usage));
    }

    static SourceSpan merge(const SourceSpan& a, const SourceSpan& b) {
        SourceSpan merged = a;
        merged.end_line = b.end_line;
        merged.end_col = b.end_col;
        return merged;
    }

    std::vector<Token> tokens_;
    std::vector<ParseError>& errors_;
    size_t pos_ = 0;
    int char_depth_ = 0;
};

// Allocates ids and resolves references over the raw document, then
// assembles the model.
class Resolver {
public:
    Resolver(std::vector<RawProcess> processes,
             std::vector<ParseError>& errors, ParseResult& result)
        : raw_(std::move(processes)), errors_(errors), result_(result) {}

    void run() {
        collect_explicit_ids();
        if (!errors_.empty()) return;
        allocate_ids();
        resolve_and_assemble();
    }

private:
    struct Element {
        std::string id;
        std::string name;
        ElementKind kind = ElementKind::State;
    };

    void semantic_error(const SourceSpan& span, std::string expected,
                        std::string found, std::string hint) {
        errors_.push_back(
            {span, {std::move(expected)}, std::move(found), std::move(hint)});
    }

    void claim_explicit(const RawName& id) {
        if (!explicit_ids_.insert(id.text).second) {
            semantic_error(id.span, "a unique identifier",
                           "'" + id.text + "'",
                           "identifier is already declared");
        }
    }

    void collect_explicit_chars(const std::vector<RawCharacteristic>& chars) {
        for (const auto& ch : chars) {
            if (ch.id) claim_explicit(*ch.id);
            collect_explicit_chars(ch.children);
        }
    }

    void collect_explicit_ids() {
        for (const auto& process : raw_) {
            if (process.id) claim_explicit(*process.id);
            if (process.boundary) claim_explicit(*process.boundary);
            for (const auto& state : process.states) {
                if (state.id) claim_explicit(*state.id);
                collect_explicit_chars(state.characteristics);
            }
            for (const auto& op : process.operators) {
                if (op.id) claim_explicit(*op.id);
                collect_explicit_chars(op.characteristics);
            }
            for (const auto& resource : process.resources) {
                if (resource.id) claim_explicit(*resource.id);
                collect_explicit_chars(resource.characteristics);
            }
            for (const auto& connector : process.connectors)
                if (connector.id) claim_explicit(*connector.id);
            for (const auto& flow : process.flows)
                if (flow.id) claim_explicit(*flow.id);
            for (const auto& usage : process.usages)
                if (usage.id) claim_explicit(*usage.id);
        }
    }

    std::string next_id(std::string_view prefix) {
        int& counter = counters_[std::string(prefix)];
        std::string candidate;
        do {
            candidate = std::string(prefix) + std::to_string(++counter);
        } while (explicit_ids_.count(candidate));
        return candidate;
    }

    std::string id_for(const std::optional<RawName>& id,
                       std::string_view prefix) {
        return id ? id->text : next_id(prefix);
    }

    std::vector<Characteristic> assemble_chars(
        std::vector<RawCharacteristic>& chars) {
        std::vector<Characteristic> result;
        for (auto& raw : chars) {
            Characteristic ch;
            ch.identification.unique_ident = id_for(raw.id, "ch");
            ch.identification.short_name = raw.name.text;
            ch.value = std::move(raw.value);
            ch.unit = std::move(raw.unit);
            record_span(ch.identification.unique_ident, raw.name.span);
            ch.children = assemble_chars(raw.children);
            result.push_back(std::move(ch));
        }
        return result;
    }

    void record_span(const std::string& id, const SourceSpan& span) {
        result_.spans.emplace(id, span);
    }

    void allocate_ids() {
        // Ids are assigned per category in document order; explicitly
        // written ids are skipped by the counters.
        model_.processes.reserve(raw_.size());
        for (auto& raw : raw_) {
            Process process;
            process.identification.unique_ident = id_for(raw.id, "p");
            process.identification.short_name = raw.name.text;
            process.system_boundary_id = id_for(raw.boundary, "b");
            record_span(process.identification.unique_ident, raw.name.span);
            for (auto& state : raw.states) {
                StateNode node;
                node.identification.unique_ident = id_for(state.id, "s");
                node.identification.short_name = state.name.text;
                node.kind = state.kind;
                node.placement = state.direction == Direction::Internal
                                     ? Placement::Intermediate
                                     : Placement::Boundary;
                node.characteristics = assemble_chars(state.characteristics);
                record_span(node.identification.unique_ident, state.name.span);
                process.states.push_back(std::move(node));
            }
            for (auto& op : raw.operators) {
                ProcessOperator node;
                node.identification.unique_ident = id_for(op.id, "op");
                node.identification.short_name = op.name.text;
                node.characteristics = assemble_chars(op.characteristics);
                record_span(node.identification.unique_ident, op.name.span);
                process.operators.push_back(std::move(node));
            }
            for (auto& resource : raw.resources) {
                TechnicalResource node;
                node.identification.unique_ident = id_for(resource.id, "r");
                node.identification.short_name = resource.name.text;
                node.characteristics =
                    assemble_chars(resource.characteristics);
                record_span(node.identification.unique_ident,
                            resource.name.span);
                process.resources.push_back(std::move(node));
            }
            for (auto& connector : raw.connectors) {
                ConnectorNode node;
                node.identification.unique_ident = id_for(connector.id, "c");
                node.identification.short_name = connector.name.text;
                node.kind = connector.kind;
                record_span(node.identification.unique_ident,
                            connector.name.span);
                process.connectors.push_back(std::move(node));
            }
            for (auto& flow : raw.flows) {
                Flow node;
                node.id = id_for(flow.id, "f");
                record_span(node.id, flow.span);
                process.flows.push_back(std::move(node));
            }
            for (auto& usage : raw.usages) {
                Usage node;
                node.id = id_for(usage.id, "u");
                record_span(node.id, usage.span);
                process.usages.push_back(std::move(node));
            }
            model_.processes.push_back(std::move(process));
        }
    }

    // Resolves a reference within one process: exact id first, then a
    // unique short name among the process's nodes.
    const Element* resolve(const std::vector<Element>& elements,
                           const RawName& ref) {
        for (const auto& element : elements) {
            if (element.id == ref.text) return &element;
        }
        const Element* match = nullptr;
        bool ambiguous = false;
        for (const auto& element : elements) {
            if (element.name != ref.text) continue;
            if (match) {
                ambiguous = true;
                break;
            }
            match = &element;
        }
        if (ambiguous) {
            semantic_error(ref.span, "an unambiguous element reference",
                           "'" + ref.text + "'",
                           "several elements share this name; refer to one "
                           "by id");
            return nullptr;
        }
        if (!match) {
            semantic_error(ref.span, "a declared element", "'" + ref.text + "'",
                           "undeclared element");
            return nullptr;
        }
        return match;
    }

    void resolve_and_assemble() {
        // Per-process node tables for flow/usage resolution.
        for (size_t p = 0; p < raw_.size(); ++p) {
            Process& process = model_.processes[p];
            std::vector<Element> elements;
            for (const auto& state : process.states)
                elements.push_back({state.identification.unique_ident,
                                    state.identification.short_name,
                                    ElementKind::State});
            for (const auto& op : process.operators)
                elements.push_back({op.identification.unique_ident,
                                    op.identification.short_name,
                                    ElementKind::Operator});
            for (const auto& resource : process.resources)
                elements.push_back({resource.identification.unique_ident,
                                    resource.identification.short_name,
                                    ElementKind::Resource});
            for (const auto& connector : process.connectors)
                elements.push_back({connector.identification.unique_ident,
                                    connector.identification.short_name,
                                    ElementKind::Connector});

            for (size_t i = 0; i < raw_[p].flows.size(); ++i) {
                const RawFlow& raw_flow = raw_[p].flows[i];
                Flow& flow = process.flows[i];
                const Element* source = resolve(elements, raw_flow.source);
                const Element* target = resolve(elements, raw_flow.target);
                if (source && source->kind == ElementKind::Resource) {
                    semantic_error(raw_flow.source.span,
                                   "a state, operator or connector",
                                   "'" + raw_flow.source.text + "'",
                                   "flows cannot connect technical "
                                   "resources; use 'usage'");
                    source = nullptr;
                }
                if (target && target->kind == ElementKind::Resource) {
                    semantic_error(raw_flow.target.span,
                                   "a state, operator or connector",
                                   "'" + raw_flow.target.text + "'",
                                   "flows cannot connect technical "
                                   "resources; use 'usage'");
                    target = nullptr;
                }
                if (source && target && source->id == target->id) {
                    semantic_error(raw_flow.span,
                                   "two distinct elements",
                                   "'" + raw_flow.source.text + "'",
                                   "a flow cannot connect an element to "
                                   "itself");
                    continue;
                }
                if (source) flow.source = source->id;
                if (target) flow.target = target->id;
            }

            for (size_t i = 0; i < raw_[p].usages.size(); ++i) {
                const RawUsage& raw_usage = raw_[p].usages[i];
                Usage& usage = process.usages[i];
                const Element* first = resolve(elements, raw_usage.first);
                const Element* second = resolve(elements, raw_usage.second);
                if (!first || !second) continue;
                // The link is undirected in source form; store the
                // operator first whenever the kinds identify one.
                if (first->kind == ElementKind::Resource &&
                    second->kind == ElementKind::Operator)
                    std::swap(first, second);
                usage.operator_id = first->id;
                usage.resource_id = second->id;
            }
        }

        // Cross-process references: decomposition targets and refines.
        std::unordered_map<std::string, size_t> process_ids;
        std::unordered_set<std::string> state_ids;
        for (size_t p = 0; p < model_.processes.size(); ++p) {
            process_ids.emplace(
                model_.processes[p].identification.unique_ident, p);
            for (const auto& state : model_.processes[p].states)
                state_ids.insert(state.identification.unique_ident);
        }
        for (size_t p = 0; p < raw_.size(); ++p) {
            for (size_t i = 0; i < raw_[p].operators.size(); ++i) {
                const auto& raw_op = raw_[p].operators[i];
                if (!raw_op.decompose) continue;
                if (!process_ids.count(raw_op.decompose->text)) {
                    semantic_error(raw_op.decompose->span, "a process id",
                                   "'" + raw_op.decompose->text + "'",
                                   "undeclared element");
                    continue;
                }
                model_.processes[p].operators[i].decomposition =
                    raw_op.decompose->text;
            }
            for (size_t i = 0; i < raw_[p].states.size(); ++i) {
                const auto& raw_state = raw_[p].states[i];
                if (!raw_state.refines) continue;
                if (!state_ids.count(raw_state.refines->text)) {
                    semantic_error(raw_state.refines->span, "a state id",
                                   "'" + raw_state.refines->text + "'",
                                   "undeclared element");
                    continue;
                }
                model_.processes[p].states[i].refines =
                    raw_state.refines->text;
            }
        }
        check_decomposition_cycles();
        if (!errors_.empty()) return;

        auto built = build_model(std::move(model_.processes));
        if (!built.ok()) {
            // The resolver checks everything the builder checks, so this
            // path only triggers on internal inconsistencies. Surface
            // them as errors rather than crashing.
            for (const auto& error : built.errors) {
                errors_.push_back({SourceSpan{}, {"a well-formed document"},
                                   "'" + error.id + "'", error.message});
            }
            return;
        }
        result_.model = std::move(built.model);
    }

    void check_decomposition_cycles() {
        struct Edge {
            std::string target;
            const SourceSpan* span;
        };
        std::unordered_map<std::string, std::vector<Edge>> edges;
        std::unordered_map<std::string, size_t> index;
        for (size_t p = 0; p < model_.processes.size(); ++p) {
            const std::string& pid =
                model_.processes[p].identification.unique_ident;
            index.emplace(pid, p);
            auto& out = edges[pid];
            for (size_t i = 0; i < raw_[p].operators.size(); ++i) {
                const auto& op = model_.processes[p].operators[i];
                if (op.decomposition && raw_[p].operators[i].decompose)
                    out.push_back({*op.decomposition,
                                   &raw_[p].operators[i].decompose->span});
            }
        }
        enum class Mark { None, Active, Done };
        std::unordered_map<std::string, Mark> marks;
        auto visit = [&](auto&& self, const std::string& id) -> void {
            Mark& mark = marks[id];
            if (mark != Mark::None) return;
            mark = Mark::Active;
            for (const auto& edge : edges[id]) {
                auto it = marks.find(edge.target);
                if (it != marks.end() && it->second == Mark::Active) {
                    semantic_error(*edge.span, "an acyclic decomposition",
                                   "'" + edge.target + "'",
                                   "decomposition cycle");
                    continue;
                }
                if (index.count(edge.target)) self(self, edge.target);
            }
            marks[id] = Mark::Done;
        };
        for (const auto& process : model_.processes)
            visit(visit, process.identification.unique_ident);
    }

    std::vector<RawProcess> raw_;
    std::vector<ParseError>& errors_;
    ParseResult& result_;
    Model model_;
    std::unordered_set<std::string> explicit_ids_;
    std::unordered_map<std::string, int> counters_;
};

}  // namespace

std::string ParseError::to_string() const {
    std::string out = span.file + ":" + std::to_string(span.start_line) + ":" +
                      std::to_string(span.start_col) + ": expected ";
    for (size_t i = 0; i < expected.size(); ++i) {
        if (i) out += i + 1 == expected.size() ? " or " : ", ";
        out += expected[i];
    }
    out += ", found " + found;
    if (hint) out += " (" + *hint + ")";
    return out;
}

ParseResult parse(std::string_view text, std::string_view file) {
    ParseResult result;
    auto tokens = Lexer(text, file).run(result.errors);
    auto raw = Parser(std::move(tokens), result.errors).run();
    if (result.errors.empty()) {
        Resolver(std::move(raw), result.errors, result).run();
    }
    if (!result.errors.empty()) result.model.reset();
    return result;
}

}  // namespace fpd::script
