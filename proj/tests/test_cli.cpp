#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "coh/cli.hpp"
#include "coh/presentation.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cli = coh::cli;
namespace presentation = coh::presentation;

namespace {

std::string run_to_string(cli::RunConfig cfg, int* code = nullptr) {
    std::ostringstream out, diag;
    int c = cli::run(cfg, out, diag);
    if (code) *code = c;
    return out.str();
}

const char* kSplitPresentation = R"(cohopf 1
name split
p 3
D 10
gen tau0 1 2
gen tau1 5 2
delta tau0 =
delta tau1 =
quotient Sigma = kill tau1
)";

const char* kSteenrodPresentation = R"(cohopf 1
name dualA
p 3
D 12
gen xi1 4 inf
gen tau0 1 2
gen tau1 5 2
delta xi1 =
delta tau0 =
delta tau1 = 1 xi1 (x) tau0
quotient Sigma = kill xi1, tau1
)";

std::string temp_path(const std::string& name) {
    return std::string("cli_tmp_") + name;
}

}  // namespace

TEST_CASE("presentation round-trip is bit-exact") {
    auto pf = presentation::parse(kSteenrodPresentation);
    std::string once = presentation::serialize(pf);
    auto pf2 = presentation::parse(once);
    std::string twice = presentation::serialize(pf2);
    CHECK(once == twice);
    CHECK(pf2.build.gens.size() == 3);
    CHECK(pf2.quotients.size() == 1);
    CHECK(pf2.quotients[0].killed.size() == 2);
}

TEST_CASE("presentation rejects malformed input") {
    CHECK_THROWS(presentation::parse("not a presentation"));
    CHECK_THROWS(presentation::parse("cohopf 1\ngen x 1 2\ndelta y =\n"));
}

TEST_CASE("cotor command on the trunc-poly catalog entry") {
    cli::RunConfig cfg;
    cfg.command = "cotor";
    cfg.example_name = "trunc-poly";
    cfg.p = 3;
    cfg.max_degree = 28;
    cfg.s_max = 6;
    int code = -1;
    std::string tsv = run_to_string(cfg, &code);
    CHECK(code == 0);
    CHECK(tsv.find("1\t0\t4\t1\t-") != std::string::npos);
    CHECK(tsv.find("2\t0\t12\t1\t-") != std::string::npos);
}

TEST_CASE("determinism: identical bytes across runs and thread counts") {
    cli::RunConfig cfg;
    cfg.command = "compare-e1";
    cfg.example_name = "exterior-split";
    cfg.p = 3;
    cfg.gens = 1;
    cfg.max_degree = 8;
    cfg.s_max = 3;
    cfg.format = "json";
    int c1 = -1, c2 = -1, c3 = -1;
    std::string a = run_to_string(cfg, &c1);
    std::string b = run_to_string(cfg, &c2);
    cfg.threads = 4;
    std::string c = run_to_string(cfg, &c3);
    CHECK(c1 == 0);
    CHECK(c2 == 0);
    CHECK(c3 == 0);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(!a.empty());
}

TEST_CASE("chart round-trips a saved table byte-for-byte") {
    cli::RunConfig cfg;
    cfg.command = "cotor";
    cfg.example_name = "exterior-split";
    cfg.p = 3;
    cfg.gens = 1;
    cfg.max_degree = 8;
    cfg.s_max = 4;
    cfg.out = temp_path("table.tsv");
    int code = -1;
    run_to_string(cfg, &code);
    REQUIRE(code == 0);
    std::ifstream in(cfg.out, std::ios::binary);
    std::ostringstream orig;
    orig << in.rdbuf();

    cli::RunConfig chart;
    chart.command = "chart";
    chart.input = cfg.out;
    chart.format = "tsv";
    std::string reproduced = run_to_string(chart, &code);
    CHECK(code == 0);
    CHECK(reproduced == orig.str());

    chart.format = "svg";
    std::string svg = run_to_string(chart, &code);
    CHECK(code == 0);
    CHECK(svg.find("<svg") != std::string::npos);
    std::remove(cfg.out.c_str());
}

TEST_CASE("empty table renders as a header-only TSV") {
    coh::Table t;
    t.name = "empty";
    t.D = 5;
    t.certified_u = 5;
    std::string tsv = coh::to_tsv(t);
    CHECK(tsv == "# table empty D=5 certified=5\ns\tt\tu\tdim\tflags\n");
    auto back = coh::table_from_tsv(tsv);
    CHECK(back.rows.empty());
    CHECK(coh::to_tsv(back) == tsv);
}

TEST_CASE("presentation file drives the full pipeline") {
    std::string path = temp_path("split.hopf");
    {
        std::ofstream f(path, std::ios::binary);
        f << kSplitPresentation;
    }
    cli::RunConfig cfg;
    cfg.command = "validate";
    cfg.input = path;
    int code = -1;
    run_to_string(cfg, &code);
    CHECK(code == 0);

    cfg.command = "compare-e1";
    cfg.s_max = 3;
    std::ostringstream out, diag;
    code = cli::run(cfg, out, diag);
    CHECK(code == 0);
    CHECK(diag.str().find("all E1 tables equal; theta bijective") !=
          std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("exit-code contract") {
    SUBCASE("input error is 3") {
        cli::RunConfig cfg;
        cfg.command = "cotor";
        cfg.input = "no_such_file.hopf";
        int code = -1;
        run_to_string(cfg, &code);
        CHECK(code == 3);
    }
    SUBCASE("localizing at a nilpotent class is a math failure (2)") {
        cli::RunConfig cfg;
        cfg.command = "localize";
        cfg.example_name = "trunc-poly";
        cfg.p = 3;
        cfg.max_degree = 28;
        cfg.s_max = 6;
        cfg.localize = {{1, 4}};  // h is nilpotent: h^2 = 0
        int code = -1;
        run_to_string(cfg, &code);
        CHECK(code == 2);
    }
    SUBCASE("missing localization class is an input error") {
        cli::RunConfig cfg;
        cfg.command = "localize";
        cfg.example_name = "trunc-poly";
        cfg.p = 3;
        cfg.max_degree = 28;
        cfg.s_max = 6;
        cfg.localize = {{1, 3}};  // empty cell
        int code = -1;
        run_to_string(cfg, &code);
        CHECK(code == 3);
    }
}

TEST_CASE("localize on the split example emits certified rows") {
    cli::RunConfig cfg;
    cfg.command = "localize";
    cfg.example_name = "exterior-split";
    cfg.p = 3;
    cfg.gens = 1;
    cfg.max_degree = 8;
    cfg.s_max = 6;
    cfg.localize = {{1, 1}};  // a0
    int code = -1;
    std::string tsv = run_to_string(cfg, &code);
    CHECK(code == 0);
    CHECK(tsv.find("certified") != std::string::npos);
}
