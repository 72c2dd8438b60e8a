#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "hlcf/errors.hpp"
#include "hlcf/parse.hpp"
#include "spec_file.hpp"

using namespace hlcf;
using namespace hlcf::cli;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run hlcf_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_spec(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("hlcf_test_" + name + ".spec");
    std::ofstream(path) << text;
    return path.string();
}

std::string read(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const char* kClassical = R"(
[field]
p = 2
vars = t
prec = 12

[extension unramified]
kind = artin-schreier
a = 1

[extension wild]
kind = artin-schreier
a = t^-1

[extension trivial]
kind = artin-schreier
a = t^2 + t
)";

const char* kTwoDim = R"(
[field]
p = 2
vars = t, u
prec = 12
)";

const char* kTame = R"(
[field]
p = 2
f = 2
vars = t, u
prec = 10
)";

}  // namespace

TEST_CASE("spec file parsing") {
    SpecFile s = parse_spec(std::string(kClassical) + "\n[task]\ntype = verify\nsamples = 5 # few\n", "x.spec");
    CHECK(s.field.p == 2);
    CHECK(s.field.prec == std::vector<int>{12});
    REQUIRE(s.extensions.size() == 3);
    CHECK(s.extensions[1].name == "wild");
    CHECK(s.extensions[1].ell == 2);
    REQUIRE(s.tasks.size() == 1);
    CHECK(s.tasks[0].params.at("samples") == "5");

    auto fails_with = [](const std::string& text, const std::string& needle) {
        try {
            parse_spec(text, "bad.spec");
        } catch (const ParseError& e) {
            return std::string(e.what()).find(needle) != std::string::npos;
        }
        return false;
    };
    CHECK(fails_with("[field]\np = 2\n", "vars"));
    CHECK(fails_with("p = 2\n", "bad.spec:1: key outside"));
    CHECK(fails_with("[field]\np = 2\nvars = t\ncolour = red\n", "bad.spec:4: unknown field key"));
    CHECK(fails_with("[field]\np = two\nvars = t\n", "integer"));
    CHECK(fails_with("[field]\np = 4\nvars = t\n", "invalid field"));
    CHECK(fails_with("[field]\np = 2\nvars = t\n[extension e]\nkind = kummer\na = t\n", "needs 'ell'"));
    CHECK(fails_with("[field]\np = 2\nvars = t\n[task]\ntype = dance\n", "unknown or missing task type"));
    CHECK(fails_with("[field]\np = 2\nvars = t\n[extension e]\na = t^-1 + *\n", "bad.spec:5:"));
    // an expression must parse against the declared field
    CHECK(fails_with("[field]\np = 2\nvars = t\n[extension e]\na = u^-1\n", "bad.spec:5:"));
}

TEST_CASE("verify reports and exit codes") {
    const std::string path = write_spec("classical", kClassical);
    Run r = hlcf_run({"verify", "--spec", path, "unramified", "--json", "-"});
    CHECK(r.code == kOk);
    CHECK(r.err.empty());
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["tool"] == "hlcf");
    REQUIRE(j["results"].size() == 1);
    CHECK(j["results"][0]["task"] == "verify");
    CHECK(j["results"][0]["index"] == 2);
    CHECK(j["results"][0]["verdict"] == "isomorphism verified");
    CHECK(r.out.find("\"index\": 2") != std::string::npos);
    CHECK(j["field"]["q"] == 2);

    // M below break + 1 names the extension
    r = hlcf_run({"verify", "--spec", path, "wild", "--level", "1"});
    CHECK(r.code == kRefused);
    CHECK(r.err.find("'wild'") != std::string::npos);
    CHECK(r.out.empty());

    // a trivial datum is not an extension
    r = hlcf_run({"verify", "--spec", path, "trivial"});
    CHECK(r.code == kParseFailure);
    CHECK(r.err.find("'trivial'") != std::string::npos);

    // malformed expression: exit 2 with the position
    const std::string bad = write_spec("bad", "[field]\np = 2\nvars = t\n[extension e]\na = t^-1 + * t\n");
    r = hlcf_run({"verify", "--spec", bad});
    CHECK(r.code == kParseFailure);
    CHECK(r.err.find(":5:") != std::string::npos);
    CHECK(r.out.empty());

    CHECK(hlcf_run({"verify", "--spec", "/nonexistent/x.spec"}).code == kParseFailure);
    CHECK(hlcf_run({"verify"}).code == kParseFailure);
    CHECK(hlcf_run({"bogus", "--spec", path}).code == kParseFailure);
    CHECK(hlcf_run({"--help"}).code == kOk);
}

TEST_CASE("pair") {
    const std::string path = write_spec("pair", kClassical);
    Run r = hlcf_run({"pair", "--spec", path, "wild", "{1 + t}"});
    CHECK(r.code == kOk);
    CHECK(r.out == "pair wild {1 + 1*t^1}: 1/2 (M = 2)\n");
    // Schmid: Tr Res(t^-1 dlog(1 + c t)) = Tr(c), and c = 0 gives an invalid entry
    CHECK(hlcf_run({"pair", "--spec", path, "wild", "{1 + t^2}"}).out.find(": 0/2") != std::string::npos);
    CHECK(hlcf_run({"pair", "--spec", path, "unramified", "{t}"}).out.find(": 1/2 (M = 1)") != std::string::npos);
    CHECK(hlcf_run({"pair", "--spec", path, "trivial", "{1 + t}"}).out.find(": 0/2") != std::string::npos);
    CHECK(hlcf_run({"pair", "--spec", path, "trivial", "{t}"}).out.find(": 0/2") != std::string::npos);
    // filtration bound used is reported
    r = hlcf_run({"pair", "--spec", path, "wild", "{1 + t}", "--level", "5", "--json", "-"});
    CHECK(nlohmann::json::parse(r.out)["results"][0]["M"] == 5);
    CHECK(hlcf_run({"pair", "--spec", path, "wild", "{1 + t}", "--level", "1"}).code == kRefused);
    // a zero entry
    r = hlcf_run({"pair", "--spec", path, "wild", "{0, t}"});
    CHECK(r.code == kParseFailure);
    CHECK(r.err.find("zero") != std::string::npos);
    CHECK(hlcf_run({"pair", "--spec", path, "wild", "{1 + }"}).code == kParseFailure);
    CHECK(hlcf_run({"pair", "--spec", path, "nosuch", "{t}"}).code == kParseFailure);
    CHECK(hlcf_run({"pair", "--spec", path}).code == kParseFailure);
}

TEST_CASE("inv") {
    const std::string two = write_spec("two", kTwoDim);
    CHECK(hlcf_run({"inv", "--spec", two, "1 (x) t (x) u"}).out == "inv 1 (x) t (x) u: 1/2\n");
    // relation generators: c (x) b (x) b and (F - 1) terms
    CHECK(hlcf_run({"inv", "--spec", two, "t (x) t (x) u"}).out.find(": 0/2") != std::string::npos);
    CHECK(hlcf_run({"inv", "--spec", two, "1 (x) u (x) u"}).out.find(": 0/2") != std::string::npos);
    CHECK(hlcf_run({"inv", "--spec", two, "t^2*u^-2 + t*u^-1 (x) t (x) u"}).out.find(": 0/2") != std::string::npos);
    CHECK(hlcf_run({"inv", "--spec", two, "1 (x) t"}).code == kParseFailure);
    CHECK(hlcf_run({"inv", "--spec", two, "1 (x) t (x) 0"}).code == kParseFailure);
    CHECK(hlcf_run({"inv", "--spec", two, "1 (x) (x) u"}).code == kParseFailure);

    // tame: inv{c, t, u} = dlog(c)/3 (iterated tame symbol of a constant)
    const std::string tame = write_spec("tame", kTame);
    const Tower& K = Tower::get(parse_spec(kTame).field);
    for (int k = 0; k < 3; ++k) {
        const std::string cs = "z^" + std::to_string(k);
        Run r = hlcf_run({"inv", "--spec", tame, cs + " (x) t (x) u", "--ell", "3", "--json", "-"});
        REQUIRE(r.code == kOk);
        const FFElem c = parse_elem(K, cs, 2).leading_constant();
        const std::string expect = std::to_string(K.field().dlog(c) % 3) + "/3";
        CHECK(nlohmann::json::parse(r.out)["results"][0]["value"] == expect);
    }
    CHECK(hlcf_run({"inv", "--spec", two, "1 (x) t (x) u", "--ell", "3"}).code == kParseFailure);
}

TEST_CASE("classify, identity, divisibility") {
    const std::string path = write_spec("classify", kClassical);
    Run r = hlcf_run({"classify", "--spec", path, "wild", "--json", "-"});
    CHECK(r.code == kOk);
    auto j = nlohmann::json::parse(r.out)["results"][0];
    CHECK(j["ramification"] == "wild");
    CHECK(j["break"] == 1);
    CHECK(j["conductor"] == 2);
    CHECK(j["e"] == 2);

    const std::string two = write_spec("identity", std::string(kTwoDim) + R"(
[extension w1]
kind = as
a = u^-1
[extension w2]
kind = as
a = t*u^-2
[extension w3]
kind = as
a = t^-1*u^-3 + u^-1
[task]
type = identity
field_level = 1
samples = 10
M = 6
[task]
type = divisibility
field_level = 2
samples = 20
)");
    r = hlcf_run({"identity", "--spec", two, "--json", "-"});
    CHECK(r.code == kOk);
    j = nlohmann::json::parse(r.out)["results"][0];
    CHECK(j["pairings_vanish"] == 10);
    CHECK(j["passed"] == true);
    CHECK(j["inputs"]["probes"].size() == 3);
    CHECK(hlcf_run({"identity", "--spec", two, "--level", "1"}).code == kRefused);

    // K_2 of a one-dimensional field is 2-divisible, that of a two-dimensional one is not
    r = hlcf_run({"divisibility", "--spec", path, "--samples", "50", "--level", "8"});
    CHECK(r.code == kOk);
    r = hlcf_run({"divisibility", "--spec", two});
    CHECK(r.code == kVerificationFailed);
    CHECK(r.out.find("FAILED") != std::string::npos);
}

TEST_CASE("reports are byte-identical for a fixed seed") {
    const std::string path = write_spec("det", std::string(kClassical) + "[task]\ntype = verify\nextension = wild\n");
    const auto j1 = (std::filesystem::temp_directory_path() / "hlcf_det1.json").string();
    const auto j2 = (std::filesystem::temp_directory_path() / "hlcf_det2.json").string();
    REQUIRE(hlcf_run({"verify", "--spec", path, "--json", j1, "--seed", "0"}).code == kOk);
    REQUIRE(hlcf_run({"verify", "--spec", path, "--json", j2, "--seed", "0"}).code == kOk);
    CHECK(read(j1) == read(j2));
    CHECK(!read(j1).empty());
    // the seed is part of the inputs
    Run r = hlcf_run({"verify", "--spec", path, "--seed", "5", "--json", "-"});
    CHECK(nlohmann::json::parse(r.out)["results"][0]["inputs"]["seed"] == 5);
}

TEST_CASE("shipped spec files run clean") {
    for (const char* name : {"classical_f2.spec", "two_dim_f2.spec", "tame_f4.spec"}) {
        const std::string path = std::string(HLCF_SPEC_DIR) + "/" + name;
        for (const char* cmd : {"verify", "classify"}) {
            Run r = hlcf_run({cmd, "--spec", path});
            CHECK_MESSAGE(r.code == kOk, name, " ", cmd, " ", r.err);
        }
    }
}
