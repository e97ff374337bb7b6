#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CommandResult {
    int status = -1;
    std::string output;
};

// Runs the installed binary through the shell with stdout captured;
// stderr is dropped unless merged.
CommandResult run(const std::string& args, bool merge_stderr = false) {
    std::string command = std::string("FPD_COLOR=never ") + FPD_CLI_PATH +
                          " " + args +
                          (merge_stderr ? " 2>&1" : " 2>/dev/null");
    CommandResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    size_t n;
    while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0)
        result.output.append(buffer, n);
    int raw = pclose(pipe);
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return result;
}

std::string fixture(const char* name) {
    return std::string(FPD_FIXTURE_DIR) + "/" + name;
}

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "fpd_cli_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_temp(const char* name, const std::string& content) {
    auto path = temp_dir() / name;
    std::ofstream stream(path, std::ios::binary);
    stream << content;
    return path;
}

std::string read_all(const fs::path& path) {
    std::ifstream stream(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

std::string mutant_source() {
    std::string text = read_all(fixture("collar.fpd"));
    auto pos = text.rfind("}");
    REQUIRE(pos != std::string::npos);
    text.insert(pos, "    flow \"Screwed Collar\" -> \"Thermal Energy\"\n");
    return text;
}

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    return lines;
}

}  // namespace

TEST_CASE("validate exits 0 on the compliant fixture") {
    auto result = run("validate " + fixture("collar.fpd"));
    CHECK(result.status == 0);
    CHECK(result.output.find("0 errors, 0 warnings") != std::string::npos);
}

TEST_CASE("validate accepts xml input") {
    auto result = run("validate " + fixture("collar.xml"));
    CHECK(result.status == 0);
}

TEST_CASE("validate exits 1 with the exact R1 record on the mutant") {
    auto path = write_temp("mutant.fpd", mutant_source());
    auto result = run("validate --format machine " + path.string());
    CHECK(result.status == 1);
    int r1 = 0;
    std::istringstream lines(result.output);
    std::string line;
    while (std::getline(lines, line)) {
        // Every stdout line in machine mode is a record.
        int tabs = 0;
        for (char c : line)
            if (c == '\t') ++tabs;
        CHECK(tabs == 4);
        if (line.rfind("R1\t", 0) == 0) {
            ++r1;
            CHECK(line.find(
                      "A state must always be assigned a process operator. "
                      "Linking two states is not permitted.") !=
                  std::string::npos);
            CHECK(line.find("\terror\t") != std::string::npos);
        }
    }
    CHECK(r1 == 1);
}

TEST_CASE("validate renders source spans in text mode") {
    auto path = write_temp("mutant.fpd", mutant_source());
    auto result = run("validate " + path.string());
    CHECK(result.status == 1);
    CHECK(result.output.find(path.string() + ":15:5: error: [R1]") !=
          std::string::npos);
}

TEST_CASE("validate exits 2 on a missing file") {
    auto result = run("validate does/not/exist.fpd", true);
    CHECK(result.status == 2);
    CHECK(result.output.find("cannot read file") != std::string::npos);
}

TEST_CASE("validate exits 2 on unparseable input") {
    auto path = write_temp("broken.fpd", "process {{{");
    auto result = run("validate " + path.string(), true);
    CHECK(result.status == 2);
    CHECK(result.output.find("expected") != std::string::npos);
}

TEST_CASE("validate exits 2 on an unknown extension without --from") {
    auto path = write_temp("model.txt", "process P {}");
    auto result = run("validate " + path.string(), true);
    CHECK(result.status == 2);
    CHECK(result.output.find("--from") != std::string::npos);

    auto forced = run("validate --from fpd " + path.string());
    CHECK(forced.status == 1);  // empty process violates rules
}

TEST_CASE("rule subsets and severity overrides shape the exit code") {
    auto path = write_temp("mutant.fpd", mutant_source());
    auto subset = run("validate --rules R13 " + path.string());
    CHECK(subset.status == 0);
    auto downgraded = run(
        "validate --severity-overrides R1=warning,R5=warning,R10=warning " +
        path.string());
    CHECK(downgraded.status == 0);
    CHECK(downgraded.output.find("0 errors, 3 warnings") !=
          std::string::npos);
    auto unknown = run("validate --rules R99 " + path.string(), true);
    CHECK(unknown.status == 2);
}

TEST_CASE("warnings alone keep exit status 0") {
    auto path = write_temp("unused_resource.fpd", R"(process P {
    product A in
    product B out
    operator O
    resource Idle
    flow A -> O
    flow O -> B
})");
    auto result = run("validate " + path.string());
    CHECK(result.status == 0);
    CHECK(result.output.find("[R13]") != std::string::npos);
    CHECK(result.output.find("0 errors, 1 warning") != std::string::npos);
}

TEST_CASE("convert emits listing-shaped xml on stdout") {
    auto result = run("convert --to xml " + fixture("collar.fpd"));
    CHECK(result.status == 0);
    CHECK(result.output.find("<state stateType=\"Energy\">") !=
          std::string::npos);
    CHECK(result.output.find("shortName=\"Electrical Energy Supply\"") !=
          std::string::npos);
}

TEST_CASE("convert round trip through both formats is byte-stable") {
    auto dir = temp_dir();
    auto xml1 = dir / "collar1.xml";
    auto fpd2 = dir / "collar2.fpd";
    auto xml2 = dir / "collar2.xml";
    CHECK(run("convert --to xml --out " + xml1.string() + " " +
              fixture("collar.fpd"))
              .status == 0);
    CHECK(run("convert --to fpd --out " + fpd2.string() + " " + xml1.string())
              .status == 0);
    CHECK(run("convert --to xml --out " + xml2.string() + " " + fpd2.string())
              .status == 0);
    CHECK(read_all(xml1) == read_all(xml2));
}

TEST_CASE("convert to fpd on fpd input canonicalizes") {
    auto messy = write_temp("messy.fpd",
                            "process  P {  product A in;operator O\n"
                            "product B out;flow A -> O; flow O -> B }");
    auto result = run("convert --to fpd " + messy.string());
    CHECK(result.status == 0);
    CHECK(result.output.find("process P id=p1 boundary=b1 {\n") !=
          std::string::npos);
}

TEST_CASE("convert reports violations but still converts") {
    auto path = write_temp("mutant.fpd", mutant_source());
    auto result = run("convert --to xml " + path.string(), true);
    CHECK(result.status == 0);
    CHECK(result.output.find("converting anyway") != std::string::npos);
}

TEST_CASE("fmt --check distinguishes canonical from messy sources") {
    auto canonical = run("convert --to fpd " + fixture("collar.fpd"));
    auto clean = write_temp("clean.fpd", canonical.output);
    CHECK(run("fmt --check " + clean.string()).status == 0);

    auto messy = write_temp("needs_fmt.fpd",
                            "process P { product A in; operator O\n"
                            "product B out; flow A->O; flow O->B }");
    auto check = run("fmt --check " + messy.string());
    CHECK(check.status == 1);
    CHECK(check.output.find("needs formatting") != std::string::npos);
}

TEST_CASE("fmt rewrites files in place and is idempotent") {
    auto path = write_temp("rewrite.fpd",
                           "process P { product A in; operator O\n"
                           "product B out; flow A -> O; flow O -> B }");
    CHECK(run("fmt " + path.string()).status == 0);
    std::string formatted = read_all(path);
    CHECK(formatted.find("    product A id=s1 in\n") != std::string::npos);
    CHECK(run("fmt --check " + path.string()).status == 0);
    CHECK(run("fmt " + path.string()).status == 0);
    CHECK(read_all(path) == formatted);
}

TEST_CASE("fmt refuses xml input") {
    auto result = run("fmt " + fixture("collar.xml"), true);
    CHECK(result.status == 2);
}

TEST_CASE("report prints the collar statistics") {
    auto result = run("report " + fixture("collar.fpd"));
    CHECK(result.status == 0);
    CHECK(result.output.find("states: 5 (product 2, energy 2, information 1; "
                             "boundary 5, intermediate 0)") !=
          std::string::npos);
    CHECK(result.output.find("operators: 1") != std::string::npos);
    CHECK(result.output.find("decomposition depth: 1") != std::string::npos);
}

TEST_CASE("report shows decomposition depth per process") {
    auto result = run("report " + fixture("collar_decomposed.fpd"));
    CHECK(result.status == 0);
    CHECK(result.output.find("decomposition depth: 2") != std::string::npos);
    CHECK(result.output.find("decomposition depth: 1") != std::string::npos);
}

TEST_CASE("report prints zero counts for an empty process") {
    auto path = write_temp("empty.fpd", "process Empty {\n}\n");
    auto result = run("report " + path.string());
    CHECK(result.status == 0);
    CHECK(result.output.find("states: 0 (product 0, energy 0, information 0; "
                             "boundary 0, intermediate 0)") !=
          std::string::npos);
    CHECK(result.output.find("operators: 0") != std::string::npos);
    CHECK(result.output.find("flows: 0") != std::string::npos);
}

TEST_CASE("rules prints the full catalog") {
    auto result = run("rules");
    CHECK(result.status == 0);
    CHECK(count_lines(result.output) == 13);
    CHECK(result.output.rfind("R1   error", 0) == 0);
    CHECK(result.output.find("R13  warning  RESOURCE_USED") !=
          std::string::npos);
}

TEST_CASE("FPD_COLOR controls ansi escapes") {
    auto path = write_temp("mutant.fpd", mutant_source());
    auto plain = run("validate " + path.string());
    CHECK(plain.output.find("\033[") == std::string::npos);
    std::string command = std::string("FPD_COLOR=always ") + FPD_CLI_PATH +
                          " validate " + path.string() + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buffer[4096];
    size_t n;
    while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0)
        output.append(buffer, n);
    pclose(pipe);
    CHECK(output.find("\033[31merror\033[0m") != std::string::npos);
}

TEST_CASE("lenient mode admits unknown xml content") {
    std::string doc = read_all(fixture("collar.xml"));
    auto pos = doc.find("<process id=\"p1\">");
    REQUIRE(pos != std::string::npos);
    doc.insert(pos + std::string("<process id=\"p1\">").size(),
               "<vendorData tool=\"acme\"></vendorData>");
    auto path = write_temp("extended.xml", doc);
    CHECK(run("validate " + path.string()).status == 2);
    auto lenient = run("validate --lenient " + path.string(), true);
    CHECK(lenient.status == 0);
    CHECK(lenient.output.find("ignored unknown") != std::string::npos);
}

TEST_CASE("multiple inputs validate independently") {
    auto good = fixture("collar.fpd");
    auto bad = write_temp("mutant.fpd", mutant_source());
    auto result = run("validate " + good + " " + bad.string());
    CHECK(result.status == 1);
    CHECK(result.output.find("collar.fpd: 0 errors") != std::string::npos);
    CHECK(result.output.find("mutant.fpd: 3 errors") != std::string::npos);
}
