#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "conical/builders.hpp"
#include "conical/curve_json.hpp"
#include "support/curves.hpp"

using namespace conical;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(CLI_BIN) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = "/tmp/conical_cli_" + name;
    std::ofstream(path) << content;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

BinaryForm eq2_form() { return BinaryForm::from_classes({Int(2), Int(17), Int(34)}); }

std::string cf_curve_file() {
    return write_temp("cf.json", json_text(curve_to_json(build_Cf(eq2_form()))));
}

std::string d_curve_file() {
    FieldSpec F = FieldSpec::profiled(
        "F", 3, {{Place::real(), {1, 2}}, {Place::finite(23), {1, 2}}}, {23},
        Poly{Int(-1), Int(-1), Int(0), Int(1)});
    ConicalCurve D = build_D(eq2_form(), FieldSpec::quadratic(5), F);
    return write_temp("d.json", json_text(curve_to_json(D)));
}

}  // namespace

TEST_CASE("the bundled demos are byte stable and match their fixtures") {
    struct Demo {
        const char* name;
        const char* args;
        int exit_code;
    };
    for (const Demo& d : {Demo{"e1", "", 1}, Demo{"Cf", "", 0}, Demo{"D", " --n 2 --smax 50", 1}}) {
        CAPTURE(d.name);
        RunResult r = run_cli(std::string("paper-demo ") + d.name + d.args);
        CHECK(r.exit_code == d.exit_code);
        CHECK(r.out == slurp(std::string(FIXTURE_DIR) + "/demo_" + d.name + ".json"));
        RunResult again = run_cli(std::string("paper-demo ") + d.name + d.args);
        CHECK(again.out == r.out);
    }
    SUBCASE("the default window equals the documented one") {
        RunResult r = run_cli("paper-demo D");
        CHECK(r.exit_code == 1);
        CHECK(r.out == slurp(std::string(FIXTURE_DIR) + "/demo_D.json"));
    }
}

TEST_CASE("check-form decides forms from JSON") {
    std::string f = write_temp("form.json", "{\"classes\":[\"2\",\"17\",\"34\"]}\n");
    RunResult r = run_cli("check-form " + f);
    CHECK(r.exit_code == 1);
    json j = json::parse(r.out);
    CHECK(j["verdict"] == "counterexample");
    CHECK(j["globally_soluble"] == false);
    CHECK(j["locally_soluble_everywhere"] == true);

    std::string g = write_temp(
        "form2.json", "{\"factors\":[{\"kind\":\"linear\",\"root\":[\"1\",\"3\"]}]}\n");
    RunResult s = run_cli("check-form " + g);
    CHECK(s.exit_code == 0);
    json k = json::parse(s.out);
    CHECK(k["verdict"] == "soluble");
    CHECK(k["rational_root"][0] == "1");
    CHECK(k["rational_root"][1] == "3");
}

TEST_CASE("construct-form emits an analyzed counterexample") {
    RunResult r = run_cli("construct-form --a 2 --b 5");
    CHECK(r.exit_code == 1);
    json j = json::parse(r.out);
    CHECK(j["verdict"] == "counterexample");
    CHECK(j["form"]["degree"] == 8);
    CHECK(j["globally_soluble"] == false);
}

TEST_CASE("curve-validate and curve-graph work from curve JSON") {
    std::string cf = cf_curve_file();
    RunResult v = run_cli("curve-validate " + cf);
    CHECK(v.exit_code == 0);
    CHECK(json::parse(v.out)["valid"] == true);

    RunResult g = run_cli("curve-graph " + cf);
    CHECK(g.exit_code == 0);
    json gj = json::parse(g.out);
    CHECK(gj["is_tree"] == true);
    CHECK(gj["h1_rank"] == 0);
    CHECK(gj["connected"] == true);

    RunResult dot = run_cli("curve-graph " + cf + " --out dot");
    CHECK(dot.exit_code == 0);
    CHECK(dot.out.find("graph curve {") == 0);
    CHECK(dot.out.find("shape=box") != std::string::npos);

    SUBCASE("a conic that survives its branch fields fails validation") {
        json c = json::parse(slurp(cf));
        c["components"][0]["conic"] = {{"a", "-1"}, {"b", "-1"}};
        std::string bad = write_temp("cf_bad.json", c.dump(2) + "\n");
        RunResult b = run_cli("curve-validate " + bad);
        CHECK(b.exit_code == 1);
        CHECK(json::parse(b.out)["valid"] == false);
    }
}

TEST_CASE("curve-brauer reports the truncated quotient") {
    std::string d = d_curve_file();
    RunResult r = run_cli("curve-brauer " + d + " --window-n 2 --places-max 23");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["kernel_rank"] == 9);
    CHECK(j["quotient_dimension"] == 0);

    RunResult e = run_cli("curve-brauer " + d + " --n 2 --smax 23 --path eliminated");
    CHECK(e.exit_code == 0);
    CHECK(json::parse(e.out)["quotient_dimension"] == 0);

    std::string four = write_temp("four.json", json_text(curve_to_json(testgen::four_cycle())));
    RunResult f = run_cli("curve-brauer " + four + " --n 2 --smax 5");
    CHECK(f.exit_code == 1);
    CHECK(json::parse(f.out)["quotient_dimension"] == 2);
}

TEST_CASE("curve-hasse classifies curves end to end") {
    RunResult d = run_cli("curve-hasse " + d_curve_file() + " --n 2 --smax 23");
    CHECK(d.exit_code == 1);
    json dj = json::parse(d.out);
    CHECK(dj["classification"] == "counterexample_with_trivial_truncated_Brauer");
    CHECK(dj["quotient_dimension"] == 0);

    RunResult c = run_cli("curve-hasse " + cf_curve_file() + " --n 2 --smax 17");
    CHECK(c.exit_code == 0);
    json cj = json::parse(c.out);
    CHECK(cj["classification"] == "has_rational_points");
    CHECK(cj["tree"]["verified"] == true);
}

TEST_CASE("window flags, environment default, and error objects") {
    std::string d = d_curve_file();
    SUBCASE("a window missing a ramified prime is refused") {
        RunResult r = run_cli("curve-brauer " + d + " --smax 3");
        CHECK(r.exit_code == 2);
        CHECK(json::parse(r.out)["error"]["type"] == "invalid_input");
    }
    SUBCASE("the environment supplies the default window") {
        std::string cmd = "CONICAL_WINDOW=2:23 " + std::string(CLI_BIN) + " curve-brauer " + d;
        FILE* p = popen(cmd.c_str(), "r");
        REQUIRE(p != nullptr);
        std::string out;
        char buf[4096];
        size_t n;
        while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
        int st = pclose(p);
        CHECK(WEXITSTATUS(st) == 0);
        CHECK(json::parse(out)["kernel_rank"] == 9);
    }
    SUBCASE("a malformed environment window is an error") {
        std::string cmd = "CONICAL_WINDOW=zz " + std::string(CLI_BIN) + " curve-brauer " + d;
        FILE* p = popen(cmd.c_str(), "r");
        REQUIRE(p != nullptr);
        char buf[4096];
        while (fread(buf, 1, sizeof buf, p) > 0) {}
        CHECK(WEXITSTATUS(pclose(p)) == 2);
    }
    SUBCASE("parse failures and bad references are machine readable") {
        std::string junk = write_temp("junk.json", "not json\n");
        RunResult r = run_cli("curve-validate " + junk);
        CHECK(r.exit_code == 2);
        CHECK(json::parse(r.out)["error"]["type"] == "parse_error");

        RunResult u = run_cli("paper-demo nosuch");
        CHECK(u.exit_code == 2);
        CHECK(json::parse(u.out)["error"]["type"] == "invalid_input");

        RunResult m = run_cli("check-form /tmp/conical_cli_missing_input.json");
        CHECK(m.exit_code == 2);
        CHECK(json::parse(m.out)["error"]["type"] == "invalid_input");
    }
}
