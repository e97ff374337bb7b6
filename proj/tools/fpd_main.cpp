#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpd/build.hpp"
#include "fpd/queries.hpp"
#include "fpd/rules.hpp"
#include "fpd/script.hpp"
#include "fpd/xml.hpp"

namespace {

// 0 = success/compliant, 1 = rule violations, 2 = parse/schema/IO error.
constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kFailure = 2;

enum class Format { Fpd, Xml };

bool use_color() {
    const char* setting = std::getenv("FPD_COLOR");
    std::string value = setting ? setting : "auto";
    if (value == "always") return true;
    if (value == "never") return false;
    return isatty(fileno(stdout));
}

std::string severity_tag(fpd::Severity severity, bool color) {
    std::string name(fpd::to_string(severity));
    if (!color) return name;
    const char* code = severity == fpd::Severity::Error ? "\033[31m"
                                                        : "\033[33m";
    return code + name + "\033[0m";
}

std::optional<Format> detect_format(const std::string& path,
                                    const std::string& from) {
    if (from == "fpd") return Format::Fpd;
    if (from == "xml") return Format::Xml;
    if (path.size() > 4 && path.substr(path.size() - 4) == ".fpd")
        return Format::Fpd;
    if (path.size() > 4 && path.substr(path.size() - 4) == ".xml")
        return Format::Xml;
    return std::nullopt;
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) return std::nullopt;
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

void print_xml_error(const std::string& path, const fpd::xml::XmlError& error) {
    std::cerr << path;
    if (error.kind == fpd::xml::XmlErrorKind::Markup)
        std::cerr << ":" << error.line << ":" << error.col;
    std::cerr << ": error: " << error.message;
    if (!error.path.empty()) std::cerr << " (at " << error.path << ")";
    if (!error.id.empty()) std::cerr << " (id '" << error.id << "')";
    std::cerr << "\n";
}

struct LoadedModel {
    fpd::Model model;
    // Declaration spans, only available for .fpd sources.
    std::map<std::string, fpd::script::SourceSpan> spans;
};

// Reads and parses one input file; diagnost~s go to stderr and a missing
// result means exit code 2.
std::optional<LoadedModel> load(const std::string& path,
                                const std::string& from, bool lenient) {
    auto format = detect_format(path, from);
    if (!format) {
        std::cerr << path
                  << ": cannot detect format from extension; pass --from "
                     "fpd|xml\n";
        return std::nullopt;
    }
    auto text = read_file(path);
    if (!text) {
        std::cerr << path << ": cannot read file\n";
        return std::nullopt;
    }
    if (*format == Format::Fpd) {
        auto parsed = fpd::script::parse(*text, path);
        if (!parsed.ok()) {
            for (const auto& error : parsed.errors)
                std::cerr << error.to_string() << "\n";
            return std::nullopt;
        }
        return LoadedModel{std::move(*parsed.model),
                           std::move(parsed.spans)};
    }
    auto result = fpd::xml::deserialize(*text, {lenient});
    for (const auto& warning : result.warnings)
        std::cerr << path << ": warning: " << warning << "\n";
    if (!result.ok()) {
        for (const auto& error : result.errors) print_xml_error(path, error);
        return std::nullopt;
    }
    return LoadedModel{std::move(*result.model), {}};
}

std::string join_elements(const std::vector<std::string>& elements) {
    std::string out;
    for (size_t i = 0; i < elements.size(); ++i) {
        if (i) out += ", ";
        out += elements[i];
    }
    return out;
}

// Machine records are tab-separated lines; ids may contain anything.
std::string machine_field(const std::string& value) {
    std::string out;
    for (char c : value) {
        switch (c) {
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\\': out += "\\\\"; break;
            default: out += c;
        }
    }
    return out;
}

struct ValidateOptions {
    std::string format = "text";
    std::string rules;
    std::string severity_overrides;
    std::string from;
    bool lenient = false;
};

bool parse_rule_list(const std::string& text, fpd::RuleConfig& config,
                     std::string& error) {
    if (text.empty()) return true;
    config.enabled.fill(false);
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        auto rule = fpd::rule_from_code(item);
        if (!rule) {
            error = "unknown rule '" + item + "'";
            return false;
        }
        config.set_enabled(*rule, true);
    }
    return true;
}

bool parse_severity_overrides(const std::string& text, fpd::RuleConfig& config,
                              std::string& error) {
    if (text.empty()) return true;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            error = "override '" + item + "' is not of the form RULE=SEVERITY";
            return false;
        }
        auto rule = fpd::rule_from_code(item.substr(0, eq));
        if (!rule) {
            error = "unknown rule '" + item.substr(0, eq) + "'";
            return false;
        }
        std::string severity = item.substr(eq + 1);
        if (severity == "error") {
            config.set_severity(*rule, fpd::Severity::Error);
        } else if (severity == "warning") {
            config.set_severity(*rule, fpd::Severity::Warning);
        } else {
            error = "unknown severity '" + severity + "'";
            return false;
        }
    }
    return true;
}

int run_validate(const std::vector<std::string>& paths,
                 const ValidateOptions& options) {
    fpd::RuleConfig config;
    std::string error;
    if (!parse_rule_list(options.rules, config, error) ||
        !parse_severity_overrides(options.severity_overrides, config, error)) {
        std::cerr << "fpd validate: " << error << "\n";
        return kFailure;
    }
    bool machine = options.format == "machine";
    bool color = use_color();
    int status = kOk;
    for (const auto& path : paths) {
        auto loaded = load(path, options.from, options.lenient);
        if (!loaded) {
            status = kFailure;
            continue;
        }
        auto diagnostics = fpd::validate(loaded->model, config);
        int errors = 0, warnings = 0;
        for (const auto& diag : diagnostics) {
            if (diag.severity == fpd::Severity::Error) ++errors;
            else ++warnings;
            if (machine) {
                std::cout << fpd::rule_info(diag.rule).code << "\t"
                          << fpd::to_string(diag.severity) << "\t"
                          << machine_field(diag.process_id) << "\t"
                          << machine_field(join_elements(diag.elements))
                          << "\t" << diag.message << "\n";
                continue;
            }
            std::cout << path;
            if (!diag.elements.empty()) {
                auto span = loaded->spans.find(diag.elements.front());
                if (span != loaded->spans.end())
                    std::cout << ":" << span->second.start_line << ":"
                              << span->second.start_col;
            }
            std::cout << ": " << severity_tag(diag.severity, color) << ": ["
                      << fpd::rule_info(diag.rule).code << "] "
                      << diag.message << " (process " << diag.process_id
                      << ": " << join_elements(diag.elements) << ")\n";
        }
        if (!machine) {
            std::cout << path << ": " << errors << " error"
                      << (errors == 1 ? "" : "s") << ", " << warnings
                      << " warning" << (warnings == 1 ? "" : "s") << "\n";
        }
        if (errors > 0 && status == kOk) status = kViolations;
    }
    return status;
}

int run_convert(const std::string& path, const std::string& to,
                const std::string& out_path, const std::string& from,
                bool lenient) {
    auto loaded = load(path, from, lenient);
    if (!loaded) return kFailure;

    auto diagnostics = fpd::validate(loaded->model);
    if (!diagnostics.empty()) {
        int errors = 0;
        for (const auto& diag : diagnostics)
            if (diag.severity == fpd::Severity::Error) ++errors;
        std::cerr << path << ": warning: model has " << errors << " error(s), "
                  << diagnostics.size() - errors
                  << " warning(s); converting anyway\n";
    }

    std::string output = to == "xml" ? fpd::xml::serialize(loaded->model)
                                     : fpd::script::print(loaded->model);
    if (out_path.empty()) {
        std::cout << output;
        return kOk;
    }
    std::ofstream stream(out_path, std::ios::binary);
    if (!stream) {
        std::cerr << out_path << ": cannot write file\n";
        return kFailure;
    }
    stream << output;
    return kOk;
}

int run_fmt(const std::vector<std::string>& paths, bool check) {
    int status = kOk;
    for (const auto& path : paths) {
        auto format = detect_format(path, "");
        if (format != Format::Fpd) {
            std::cerr << path << ": fmt formats .fpd sources only\n";
            status = kFailure;
            continue;
        }
        auto text = read_file(path);
        if (!text) {
            std::cerr << path << ": cannot read file\n";
            status = kFailure;
            continue;
        }
        auto parsed = fpd::script::parse(*text, path);
        if (!parsed.ok()) {
            for (const auto& error : parsed.errors)
                std::cerr << error.to_string() << "\n";
            status = kFailure;
            continue;
        }
        std::string formatted = fpd::script::print(*parsed.model);
        if (formatted == *text) continue;
        if (check) {
            std::cout << path << ": needs formatting\n";
            if (status == kOk) status = kViolations;
            continue;
        }
        std::ofstream stream(path, std::ios::binary);
        if (!stream) {
            std::cerr << path << ": cannot write file\n";
            status = kFailure;
            continue;
        }
        stream << formatted;
    }
    return status;
}

int run_report(const std::string& path, const std::string& from,
               bool lenient) {
    auto loaded = load(path, from, lenient);
    if (!loaded) return kFailure;
    const fpd::Model& model = loaded->model;
    for (size_t i = 0; i < model.processes.size(); ++i) {
        const fpd::Process& process = model.processes[i];
        if (i) std::cout << "\n";
        int product = 0, energy = 0, information = 0, boundary = 0,
            intermediate = 0;
        for (const auto& state : process.states) {
            switch (state.kind) {
                case fpd::StateKind::Product: ++product; break;
                case fpd::StateKind::Energy: ++energy; break;
                case fpd::StateKind::Information: ++information; break;
            }
            if (state.placement == fpd::Placement::Boundary) ++boundary;
            else ++intermediate;
        }
        std::cout << "process \"" << process.identification.short_name
                  << "\" id=" << process.identification.unique_ident << "\n"
                  << "    states: " << process.states.size() << " (product "
                  << product << ", energy " << energy << ", information "
                  << information << "; boundary " << boundary
                  << ", intermediate " << intermediate << ")\n"
                  << "    operators: " << process.operators.size() << "\n"
                  << "    resources: " << process.resources.size() << "\n"
                  << "    connectors: " << process.connectors.size() << "\n"
                  << "    flows: " << process.flows.size() << "\n"
                  << "    usages: " << process.usages.size() << "\n"
                  << "    decomposition depth: "
                  << fpd::decomposition_depth(process, model) << "\n";
    }
    return kOk;
}

int run_rules() {
    for (const auto& info : fpd::list_rules()) {
        std::string code(info.code);
        std::string severity(fpd::to_string(info.default_severity));
        std::string name(info.name);
        std::cout << code << std::string(5 - code.size(), ' ') << severity
                  << std::string(9 - severity.size(), ' ') << name
                  << std::string(name.size() < 26 ? 26 - name.size() : 1, ' ')
                  << info.description << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Formalised process description toolkit"};
    app.require_subcommand(1);

    auto* validate = app.add_subcommand(
        "validate", "Check a model against the well-formedness rules");
    std::vector<std::string> validate_paths;
    ValidateOptions validate_options;
    validate->add_option("paths", validate_paths, "Input files (.fpd or .xml)")
        ->required();
    validate->add_option("--format", validate_options.format,
                         "Report format: text or machine")
        ->check(CLI::IsMember({"text", "machine"}));
    validate->add_option("--rules", validate_options.rules,
                         "Comma-separated rules to check (default: all)");
    validate->add_option("--severity-overrides",
                         validate_options.severity_overrides,
                         "Comma-separated RULE=error|warning overrides");
    validate->add_option("--from", validate_options.from,
                         "Input format override: fpd or xml")
        ->check(CLI::IsMember({"fpd", "xml"}));
    validate->add_flag("--lenient", validate_options.lenient,
                       "Tolerate unknown XML content");

    auto* convert = app.add_subcommand(
        "convert", "Convert between the text and XML formats");
    std::string convert_path, convert_to, convert_out, convert_from;
    bool convert_lenient = false;
    convert->add_option("path", convert_path, "Input file")->required();
    convert->add_option("--to", convert_to, "Target format: xml or fpd")
        ->required()
        ->check(CLI::IsMember({"xml", "fpd"}));
    convert->add_option("--out", convert_out,
                        "Output file (default: standard output)");
    convert->add_option("--from", convert_from,
                        "Input format override: fpd or xml")
        ->check(CLI::IsMember({"fpd", "xml"}));
    convert->add_flag("--lenient", convert_lenient,
                      "Tolerate unknown XML content");

    auto* fmt = app.add_subcommand("fmt", "Rewrite .fpd sources canonically");
    std::vector<std::string> fmt_paths;
    bool fmt_check = false;
    fmt->add_option("paths", fmt_paths, "Input files (.fpd)")->required();
    fmt->add_flag("--check", fmt_check,
                  "Report files that need formatting without writing");

    auto* report = app.add_subcommand("report", "Print per-process statistics");
    std::string report_path, report_from;
    bool report_lenient = false;
    report->add_option("path", report_path, "Input file")->required();
    report->add_option("--from", report_from,
                       "Input format override: fpd or xml")
        ->check(CLI::IsMember({"fpd", "xml"}));
    report->add_flag("--lenient", report_lenient,
                     "Tolerate unknown XML content");

    auto* rules =
        app.add_subcommand("rules", "Print the well-formedness rule catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kFailure;
    }

    if (validate->parsed()) return run_validate(validate_paths, validate_options);
    if (convert->parsed())
        return run_convert(convert_path, convert_to, convert_out, convert_from,
                           convert_lenient);
    if (fmt->parsed()) return run_fmt(fmt_paths, fmt_check);
    if (report->parsed())
        return run_report(report_path, report_from, report_lenient);
    if (rules->parsed()) return run_rules();
    return kFailure;
}
