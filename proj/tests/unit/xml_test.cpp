#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fpd/build.hpp"
#include "fpd/script.hpp"
#include "fpd/xml.hpp"
#include "generators.hpp"
#include "xml_shape.hpp"

using namespace fpd;

namespace {

std::string fixture(const char* name) {
    std::ifstream stream(std::string(FPD_FIXTURE_DIR) + "/" + name,
                         std::ios::binary);
    REQUIRE(stream);
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

Model collar() {
    auto parsed = script::parse(fixture("collar.fpd"), "collar.fpd");
    REQUIRE(parsed.ok());
    return *parsed.model;
}

bool has_error(const xml::ReadResult& result, xml::XmlErrorKind kind) {
    for (const auto& error : result.errors)
        if (error.kind == kind) return true;
    return false;
}

}  // namespace

TEST_CASE("the collar export carries the full interchange vocabulary") {
    std::string doc = xml::serialize(collar());
    auto problems = testsupport::check_interchange_shape(doc);
    for (const auto& problem : problems) FAIL_CHECK(problem);
    CHECK(problems.empty());
}

TEST_CASE("serialization is byte-deterministic") {
    Model model = collar();
    CHECK(xml::serialize(model) == xml::serialize(model));
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        Model random = testsupport::random_model(seed, {false});
        CHECK(xml::serialize(random) == xml::serialize(random));
    }
}

TEST_CASE("the collar export matches the frozen fixture bytes") {
    CHECK(xml::serialize(collar()) == fixture("collar.xml"));
}

TEST_CASE("empty processes serialize with empty sections") {
    auto built = build_model([] {
        Process p;
        p.identification.unique_ident = "p1";
        p.system_boundary_id = "b1";
        return std::vector<Process>{p};
    }());
    REQUIRE(built.ok());
    std::string doc = xml::serialize(*built.model);
    CHECK(doc.find("<process id=\"p1\">") != std::string::npos);
    CHECK(doc.find("<states></states>") != std::string::npos);
    auto result = xml::deserialize(doc);
    REQUIRE(result.ok());
    CHECK(*result.model == *built.model);
}

TEST_CASE("exit entries precede entry entries in state flows") {
    Process p;
    p.identification.unique_ident = "p1";
    p.system_boundary_id = "b1";
    StateNode s;
    s.identification.unique_ident = "s1";
    s.placement = Placement::Intermediate;
    p.states.push_back(s);
    ProcessOperator o1, o2;
    o1.identification.unique_ident = "o1";
    o2.identification.unique_ident = "o2";
    p.operators.push_back(o1);
    p.operators.push_back(o2);
    // Incoming flow declared before the outgoing one.
    p.flows.push_back({"fin", "o1", "s1"});
    p.flows.push_back({"fout", "s1", "o2"});
    auto built = build_model({p});
    REQUIRE(built.ok());
    std::string doc = xml::serialize(*built.model);
    auto exit_pos = doc.find("<exit id=\"fout\" />");
    auto entry_pos = doc.find("<entry id=\"fin\" />");
    REQUIRE(exit_pos != std::string::npos);
    REQUIRE(entry_pos != std::string::npos);
    CHECK(exit_pos < entry_pos);
}

TEST_CASE("round trip: deserialize after serialize is the identity") {
    for (uint64_t seed = 100; seed < 200; ++seed) {
        // Full identifications, characteristics and references.
        Model model = testsupport::random_model(seed, {false});
        auto result = xml::deserialize(xml::serialize(model));
        REQUIRE(result.ok());
        CHECK(result.warnings.empty());
        CHECK(*result.model == model);
    }
}

TEST_CASE("escaping survives hostile names and control characters") {
    Process p;
    p.identification.unique_ident = "p<&>1";
    p.identification.short_name = "a \"quoted\" <name> & more";
    p.system_boundary_id = "b\t1";
    StateNode s;
    s.identification.unique_ident = "s1";
    s.identification.short_name = "line\nbreak";
    s.identification.long_name = "tab\tand\rreturn";
    p.states.push_back(s);
    auto built = build_model({p});
    REQUIRE(built.ok());
    auto result = xml::deserialize(xml::serialize(*built.model));
    REQUIRE(result.ok());
    CHECK(*result.model == *built.model);
}

TEST_CASE("a bare process root deserializes as a single-process model") {
    std::string doc = R"(<process id="p1">
        <systemLimit id="b1" shortName="Bare" />
    </process>)";
    auto result = xml::deserialize(doc);
    REQUIRE(result.ok());
    REQUIRE(result.model->processes.size() == 1);
    CHECK(result.model->processes[0].identification.short_name == "Bare");
    CHECK(result.model->root_process_ids ==
          std::vector<std::string>{"p1"});
}

TEST_CASE("markup errors carry line and column") {
    auto result = xml::deserialize("<fpd>\n  <process id=\"p1\">\n</fpd>");
    REQUIRE_FALSE(result.ok());
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].kind == xml::XmlErrorKind::Markup);
    CHECK(result.errors[0].line == 3);
}

TEST_CASE("a state without uniqueIdent is a schema error") {
    std::string doc = R"(<process id="p1">
        <systemLimit id="b1" shortName="X" />
        <states>
            <state stateType="Product">
                <identification shortName="Collar" longName=""
                                versionNumber="" revisionNumber="">
                    <references></references>
                </identification>
            </state>
        </states>
    </process>)";
    auto result = xml::deserialize(doc);
    REQUIRE_FALSE(result.ok());
    CHECK(has_error(result, xml::XmlErrorKind::Schema));
    CHECK(result.errors[0].message.find("uniqueIdent") != std::string::npos);
}

TEST_CASE("invalid enumeration values are schema errors") {
    std::string doc = R"(<process id="p1">
        <states>
            <state stateType="Liquid">
                <identification uniqueIdent="s1" shortName="" longName=""
                                versionNumber="" revisionNumber="">
                    <references></references>
                </identification>
            </state>
        </states>
    </process>)";
    auto result = xml::deserialize(doc);
    REQUIRE_FALSE(result.ok());
    CHECK(has_error(result, xml::XmlErrorKind::Schema));
}

TEST_CASE("dangling flow references are reported with the id") {
    std::string doc = R"(<process id="p1">
        <flows>
            <flow id="f1" sourceRef="ghost" targetRef="wraith" />
        </flows>
    </process>)";
    auto result = xml::deserialize(doc);
    REQUIRE_FALSE(result.ok());
    REQUIRE(has_error(result, xml::XmlErrorKind::DanglingReference));
    CHECK(result.errors[0].id == "ghost");
}

TEST_CASE("repeated singleton sections are schema errors") {
    std::string doc = R"(<process id="p1">
        <systemLimit id="b1" shortName="X" />
        <states></states>
        <states></states>
    </process>)";
    auto result = xml::deserialize(doc);
    REQUIRE_FALSE(result.ok());
    CHECK(has_error(result, xml::XmlErrorKind::Schema));
    CHECK(result.errors[0].message.find("at most once") != std::string::npos);
}

TEST_CASE("duplicate ids across processes are schema errors") {
    std::string doc = R"(<fpd>
        <process id="p1"></process>
        <process id="p1"></process>
    </fpd>)";
    auto result = xml::deserialize(doc);
    REQUIRE_FALSE(result.ok());
    CHECK(has_error(result, xml::XmlErrorKind::Schema));
}

TEST_CASE("unknown content is rejected in strict mode and kept out in lenient mode") {
    std::string doc = R"(<process id="p1" vendor="acme">
        <systemLimit id="b1" shortName="X" />
        <simulation speed="fast"></simulation>
    </process>)";
    auto strict = xml::deserialize(doc);
    REQUIRE_FALSE(strict.ok());
    CHECK(strict.errors.size() == 2);
    CHECK(strict.errors[0].path.find("@vendor") != std::string::npos);

    auto lenient = xml::deserialize(doc, {true});
    REQUIRE(lenient.ok());
    CHECK(lenient.warnings.size() == 2);
    CHECK(lenient.model->processes.size() == 1);
}

TEST_CASE("derived sections must match the flows") {
    std::string doc = R"(<process id="p1">
        <systemLimit id="b1" shortName="X" />
        <states>
            <state stateType="Product">
                <identification uniqueIdent="s1" shortName="S" longName=""
                                versionNumber="" revisionNumber="">
                    <references></references>
                </identification>
                <characteristics></characteristics>
                <assignments>
                    <assigned id="o_wrong" />
                </assignments>
                <flows>
                    <flow><exit id="f1" /></flow>
                </flows>
            </state>
        </states>
        <processOperators>
            <processOperator>
                <identification uniqueIdent="o1" shortName="Op" longName=""
                                versionNumber="" revisionNumber="">
                    <references></references>
                </identification>
                <characteristics></characteristics>
            </processOperator>
        </processOperators>
        <flows>
            <flow id="f1" sourceRef="s1" targetRef="o1" />
        </flows>
    </process>)";
    auto strict = xml::deserialize(doc);
    REQUIRE_FALSE(strict.ok());
    CHECK(has_error(strict, xml::XmlErrorKind::Schema));
    CHECK(strict.errors[0].message.find("assignments") != std::string::npos);

    auto lenient = xml::deserialize(doc, {true});
    REQUIRE(lenient.ok());
    REQUIRE(lenient.warnings.size() == 1);
    // Recomputed values win: serialization emits the real assignment.
    std::string round = xml::serialize(*lenient.model);
    CHECK(round.find("<assigned id=\"o1\" />") != std::string::npos);
}

TEST_CASE("characteristics nest and round trip") {
    std::string doc = R"(<process id="p1">
        <systemLimit id="b1" shortName="X" />
        <technicalResources>
            <technicalResource>
                <identification uniqueIdent="r1" shortName="Robot" longName=""
                                versionNumber="" revisionNumber="">
                    <references><reference id="doc-7" /></references>
                </identification>
                <characteristics>
                    <characteristic value="12" unit="Nm">
                        <identification uniqueIdent="c1" shortName="Torque"
                                        longName="" versionNumber=""
                                        revisionNumber="">
                            <references></references>
                        </identification>
                        <characteristics>
                            <characteristic value="0.5" unit="">
                                <identification uniqueIdent="c2"
                                                shortName="Tolerance"
                                                longName="" versionNumber=""
                                                revisionNumber="">
                                    <references></references>
                                </identification>
                                <characteristics></characteristics>
                            </characteristic>
                        </characteristics>
                    </characteristic>
                </characteristics>
            </technicalResource>
        </technicalResources>
    </process>)";
    auto result = xml::deserialize(doc);
    REQUIRE(result.ok());
    const auto& resource = result.model->processes[0].resources[0];
    REQUIRE(resource.characteristics.size() == 1);
    CHECK(resource.characteristics[0].unit == "Nm");
    REQUIRE(resource.characteristics[0].children.size() == 1);
    CHECK(resource.characteristics[0].children[0].identification.short_name ==
          "Tolerance");
    CHECK(resource.identification.references ==
          std::vector<std::string>{"doc-7"});

    auto round = xml::deserialize(xml::serialize(*result.model));
    REQUIRE(round.ok());
    CHECK(*round.model == *result.model);
}

TEST_CASE("canonicalize is idempotent and fixes formatting") {
    SUBCASE("whitespace and attribute order") {
        std::string mangled =
            "<process    id=\"p1\"><systemLimit shortName=\"X\"  id=\"b1\"/>"
            "\n\n<states>\n</states></process>";
        auto canon = xml::canonicalize(mangled);
        REQUIRE(canon.ok());
        CHECK(canon.text->find("<systemLimit id=\"b1\" shortName=\"X\" />") !=
              std::string::npos);
        auto again = xml::canonicalize(*canon.text);
        REQUIRE(again.ok());
        CHECK(*again.text == *canon.text);
    }
    SUBCASE("identification attribute order is pinned") {
        std::string doc =
            "<identification revisionNumber=\"r\" shortName=\"s\" "
            "uniqueIdent=\"u\" versionNumber=\"v\" longName=\"l\">"
            "<references></references></identification>";
        auto canon = xml::canonicalize(doc);
        REQUIRE(canon.ok());
        CHECK(canon.text->find("uniqueIdent=\"u\" shortName=\"s\" "
                               "longName=\"l\" versionNumber=\"v\" "
                               "revisionNumber=\"r\"") != std::string::npos);
    }
    SUBCASE("serializer output is already canonical") {
        for (uint64_t seed = 300; seed < 320; ++seed) {
            std::string doc = xml::serialize(
                testsupport::random_model(seed, {false}));
            auto canon = xml::canonicalize(doc);
            REQUIRE(canon.ok());
            CHECK(*canon.text == doc);
        }
    }
    SUBCASE("text content is preserved inline") {
        std::string doc = "<a>some <b>mixed</b> text &amp; entities</a>";
        auto canon = xml::canonicalize(doc);
        REQUIRE(canon.ok());
        auto again = xml::canonicalize(*canon.text);
        REQUIRE(again.ok());
        CHECK(*again.text == *canon.text);
        CHECK(canon.text->find("some <b>mixed</b> text &amp; entities") !=
              std::string::npos);
    }
    SUBCASE("markup errors are reported") {
        auto canon = xml::canonicalize("<a><b></a>");
        REQUIRE_FALSE(canon.ok());
        CHECK(canon.errors[0].kind == xml::XmlErrorKind::Markup);
    }
}

TEST_CASE("reformatted output deserializes to the same model") {
    // Reindenting and attribute reordering must not change the content:
    // serialize(deserialize(doc)) equals canonicalize(doc) for documents
    // in canonical shape.
    Model model = collar();
    std::string doc = xml::serialize(model);
    std::string mangled;
    for (char c : doc) {
        if (c == '\n') mangled += "\n   ";
        else mangled += c;
    }
    auto canon = xml::canonicalize(mangled);
    REQUIRE(canon.ok());
    CHECK(*canon.text == doc);
    auto result = xml::deserialize(mangled);
    REQUIRE(result.ok());
    CHECK(xml::serialize(*result.model) == *canon.text);
}

TEST_CASE("canonicalization never changes what a document means") {
    for (uint64_t seed = 400; seed < 440; ++seed) {
        Model model = testsupport::random_model(seed, {false});
        auto canon = xml::canonicalize(xml::serialize(model));
        REQUIRE(canon.ok());
        auto result = xml::deserialize(*canon.text);
        REQUIRE(result.ok());
        CHECK(*result.model == model);
    }
}

TEST_CASE("a states-only excerpt loads leniently") {
    // Interchange documents produced by other tools may ship only the
    // states section; its assignment/flow references then point at
    // elements outside the excerpt.
    std::string doc = R"(<process id="p1">
    <systemLimit id="b1" shortName="Modeling Example" />
    <states>
        <state stateType="Energy">
            <identification uniqueIdent="s1" shortName="Electrical Energy Supply" longName="" versionNumber="" revisionNumber="">
                <references></references>
            </identification>
            <characteristics>
            </characteristics>
            <assignments>
                <assigned id="op77" />
            </assignments>
            <flows>
                <flow>
                    <exit id="f77" />
                </flow>
            </flows>
        </state>
    </states>
</process>)";
    auto strict = xml::deserialize(doc);
    REQUIRE_FALSE(strict.ok());

    auto lenient = xml::deserialize(doc, {true});
    REQUIRE(lenient.ok());
    CHECK(lenient.warnings.size() == 2);
    REQUIRE(lenient.model->processes.size() == 1);
    const auto& state = lenient.model->processes[0].states[0];
    CHECK(state.kind == StateKind::Energy);
    CHECK(state.identification.short_name == "Electrical Energy Supply");
}

TEST_CASE("the reader survives random document mutations") {
    std::string base = xml::serialize(collar());
    testsupport::Rng rng(20240811);
    for (int round = 0; round < 400; ++round) {
        std::string mutated = base;
        int edits = rng.range(1, 4);
        for (int e = 0; e < edits; ++e) {
            int pos = rng.range(0, static_cast<int>(mutated.size()) - 1);
            switch (rng.range(0, 3)) {
                case 0:
                    mutated[pos] = static_cast<char>(rng.range(1, 126));
                    break;
                case 1: mutated.erase(pos, rng.range(1, 5)); break;
                case 2: mutated.insert(pos, "<"); break;
                case 3: mutated.insert(pos, "&amp;"); break;
            }
        }
        // Must either load or report positioned errors; never crash.
        auto result = xml::deserialize(mutated, {true});
        if (!result.ok()) {
            for (const auto& error : result.errors) {
                if (error.kind == xml::XmlErrorKind::Markup) {
                    CHECK(error.line >= 1);
                    CHECK(error.col >= 1);
                }
            }
        }
        auto canon = xml::canonicalize(mutated);
        if (canon.ok()) {
            auto again = xml::canonicalize(*canon.text);
            REQUIRE(again.ok());
            CHECK(*again.text == *canon.text);
        }
    }
}

TEST_CASE("an empty wrapper document is an empty model") {
    auto result = xml::deserialize("<fpd></fpd>");
    REQUIRE(result.ok());
    CHECK(result.model->processes.empty());
    CHECK(xml::serialize(*result.model) ==
          "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<fpd></fpd>\n");
}
