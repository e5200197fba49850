#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "deltakit/report.hpp"
#include "deltakit/scenario.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

using namespace dk;
using json = nlohmann::ordered_json;

namespace {

const char* kCorpus[] = {"qp", "e2", "e2-q-case1", "e2-q-case2", "s-h3", "d1", "r1"};

std::string scenario_path(const std::string& name) {
    return std::string(DK_SCENARIO_DIR) + "/" + name + ".json";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json corpus_json(const std::string& name) { return json::parse(slurp(scenario_path(name))); }

}  // namespace

TEST_CASE("every bundled scenario parses and round-trips byte-identically") {
    for (const auto* name : kCorpus) {
        CAPTURE(name);
        Scenario sc = load_scenario(scenario_path(name));
        CHECK(sc.name == name);
        std::string once = serialize_scenario(sc);
        Scenario again = parse_scenario(once);
        std::string twice = serialize_scenario(again);
        CHECK(once == twice);
        CHECK(again.name == sc.name);
        CHECK(again.expected == sc.expected);
        CHECK(again.refinements.size() == sc.refinements.size());
    }
}

TEST_CASE("every bundled scenario runs clean with expected values matched") {
    for (const auto* name : kCorpus) {
        CAPTURE(name);
        Scenario sc = load_scenario(scenario_path(name));
        RunOptions opt;
        opt.check = true;
        Report rep = run(sc, opt);
        CHECK(rep.clean());
        CHECK(!rep.results.empty());
        for (const auto& tr : rep.results) {
            CAPTURE(tr.task);
            CHECK(tr.ok);
            CHECK(tr.matched);
            // The corpus pins an expected value for every task it declares.
            CHECK(tr.expected.has_value());
        }
        for (const auto& c : rep.checks) {
            CAPTURE(c.name);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("reports are deterministic byte for byte") {
    Scenario sc = load_scenario(scenario_path("qp"));
    RunOptions opt;
    opt.check = true;
    opt.oracle = true;
    opt.oracle_samples = 50;
    std::string a = report_json(run(sc, opt));
    std::string b = report_json(run(sc, opt));
    CHECK(a == b);
    std::string ma = report_markdown(run(sc, opt));
    std::string mb = report_markdown(run(sc, opt));
    CHECK(ma == mb);
    std::string ca = report_csv(run(sc, opt));
    CHECK(ca == report_csv(run(sc, opt)));
    CHECK(ca.rfind("refinement,u_lo,u_hi,v_lo,v_hi,support,n_coeffs,p_square,p_dot_c", 0) == 0);
}

TEST_CASE("task filtering runs only the requested tasks") {
    Scenario sc = load_scenario(scenario_path("r1"));
    RunOptions opt;
    opt.tasks = {"s_divisor", "s_curve:fR"};
    Report rep = run(sc, opt);
    REQUIRE(rep.results.size() == 2);
    CHECK(rep.results[0].task == "s_divisor");
    CHECK(*rep.results[0].value == Rational(63, 16));
    CHECK(rep.results[1].task == "s_curve:fR");
    CHECK(*rep.results[1].value == Rational(75, 112));
    CHECK(rep.clean());
    // Only the touched refinement contributes chamber rows.
    for (const auto& row : rep.cells) CHECK(row.refinement == "fR");
    CHECK(!rep.cells.empty());
}

TEST_CASE("expected-value mismatches are flagged, not hidden") {
    json j = corpus_json("qp");
    j["expected"]["s_divisor"] = "1/2";  // truth is 11/16
    Scenario sc = parse_scenario(j.dump());
    Report rep = run(sc, RunOptions{});
    CHECK(rep.any_mismatch);
    CHECK(!rep.clean());
    bool seen = false;
    for (const auto& tr : rep.results)
        if (tr.task == "s_divisor") {
            seen = true;
            CHECK(tr.ok);
            CHECK(!tr.matched);
            CHECK(*tr.value == Rational(11, 16));
            CHECK(*tr.expected == Rational(1, 2));
        }
    CHECK(seen);
}

TEST_CASE("unknown tasks and unknown names become task errors") {
    Scenario sc = load_scenario(scenario_path("qp"));
    RunOptions opt;
    opt.tasks = {"no_such_task", "s_curve:nope", "s_point:B:nope", "s_divisor"};
    Report rep = run(sc, opt);
    CHECK(rep.any_error);
    CHECK(!rep.results[0].ok);
    CHECK(!rep.results[1].ok);
    CHECK(!rep.results[2].ok);
    CHECK(rep.results[3].ok);
    CHECK(*rep.results[3].value == Rational(11, 16));
}

TEST_CASE("structural problems are rejected with InvalidScenario") {
    SUBCASE("not JSON at all") { CHECK_THROWS_AS(parse_scenario("not json"), InvalidScenario); }

    SUBCASE("asymmetric gram") {
        json j = corpus_json("qp");
        j["surface"]["gram"][0][1] = "5";
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("gram row length mismatch") {
        json j = corpus_json("qp");
        j["surface"]["gram"][0].erase(3);
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("malformed rational") {
        json j = corpus_json("qp");
        j["threefold"]["A"] = "3/";
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("zero denominator") {
        json j = corpus_json("qp");
        j["threefold"]["A"] = "1/0";
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("malformed polynomial") {
        json j = corpus_json("qp");
        j["surface"]["chambers"][0]["Q"][0] = "3 + * u";
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("gapped surface chambers") {
        json j = corpus_json("qp");
        j["surface"]["chambers"][1]["range"][0] = "3/2";
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("empty chamber range") {
        json j = corpus_json("qp");
        j["threefold"]["chambers"][0]["range"] = {"1", "1"};
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("dangling curve name in N") {
        json j = corpus_json("qp");
        j["surface"]["chambers"][1]["N"] = {{"ghost", "-1 + u"}};
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("dangling curve name in refinement class") {
        json j = corpus_json("qp");
        j["refinements"][0]["class"] = {{"ghost", "1"}};
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("dangling curve name in point mults") {
        json j = corpus_json("qp");
        j["refinements"][0]["points"][0]["mults"] = {{"ghost", "1"}};
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("refinement with both curve and class") {
        json j = corpus_json("e2");
        j["refinements"][0]["class"] = {{"s", "1"}};
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("refinement with neither curve nor class") {
        json j = corpus_json("e2");
        j["refinements"][0].erase("curve");
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("duplicate refinement names") {
        json j = corpus_json("e2");
        json dup = j["refinements"][0];
        j["refinements"].push_back(dup);
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("duplicate curve names") {
        json j = corpus_json("qp");
        j["surface"]["curves"][1]["name"] = "e0";
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("trilinear entry naming an unknown basis element") {
        json j = corpus_json("s-h3");
        j["threefold"]["trilinear"][0][0] = "H9";
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("threefold chamber with neither class nor vol") {
        json j = corpus_json("s-h3");
        j["threefold"]["chambers"][0].erase("class");
        CHECK_THROWS_AS(parse_scenario(j.dump()), InvalidScenario);
    }

    SUBCASE("missing file") { CHECK_THROWS_AS(load_scenario("/nonexistent/xx.json"), InvalidScenario); }
}

TEST_CASE("diagnostics carry the offending field path") {
    json j = corpus_json("qp");
    j["refinements"][0]["points"][0]["mults"] = {{"ghost", "1"}};
    try {
        parse_scenario(j.dump());
        FAIL("expected InvalidScenario");
    } catch (const InvalidScenario& e) {
        std::string msg = e.what();
        CHECK(msg.find("ghost") != std::string::npos);
    }
}

TEST_CASE("oracle audit is part of the report when requested") {
    Scenario sc = load_scenario(scenario_path("e2"));
    RunOptions opt;
    opt.check = true;
    opt.oracle = true;
    opt.oracle_samples = 100;
    Report rep = run(sc, opt);
    CHECK(rep.clean());
    int audits = 0;
    for (const auto& c : rep.checks)
        if (c.name.find(":oracle:") != std::string::npos) {
            ++audits;
            CHECK(c.pass);
            CHECK(c.detail.find(" 0 disagreements") != std::string::npos);
        }
    CHECK(audits > 0);
}

TEST_CASE("json report mirrors the run outcome") {
    Scenario sc = load_scenario(scenario_path("d1"));
    RunOptions opt;
    opt.check = true;
    Report rep = run(sc, opt);
    json j = json::parse(report_json(rep));
    CHECK(j["scenario"] == "d1");
    CHECK(j["ok"] == true);
    CHECK(j["results"].size() == rep.results.size());
    for (const auto& r : j["results"]) {
        CHECK(r["ok"] == true);
        CHECK(r["matched"] == true);
    }
    CHECK(j["cells"].size() == rep.cells.size());
}
