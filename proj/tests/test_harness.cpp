#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "l42mu/eval.hpp"
#include "l42mu/harness.hpp"
#include "l42mu/parse.hpp"
#include "l42mu/print.hpp"
#include "l42mu/typecheck.hpp"
#include "l42mu/wf.hpp"

using namespace l42mu;
using testutil::analyze_corpus;
using testutil::corpus_text;

TEST_CASE("generated tables are deterministic per seed") {
    for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
        GenConfig cfg;
        cfg.seed = seed;
        DeclarationTable a = gen_table(cfg);
        DeclarationTable b = gen_table(cfg);
        CHECK(print_source(a, false) == print_source(b, false));
    }
    GenConfig c1, c2;
    c1.seed = 1;
    c2.seed = 2;
    CHECK(print_source(gen_table(c1), false) != print_source(gen_table(c2), false));
}

TEST_CASE("a zero-composition config yields literal-bodied tables") {
    GenConfig cfg;
    cfg.seed = 0;
    cfg.pct_composition = 0;
    cfg.max_depth = 0;
    DeclarationTable table = gen_table(cfg);
    CHECK(table_flattened(table));
}

TEST_CASE("every generated literal is well formed") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        GenConfig cfg;
        cfg.seed = seed;
        cfg.well_typed = seed % 2 == 0;
        DeclarationTable table = gen_table(cfg);
        CHECK(wf_program(table, false).empty());
    }
}

TEST_CASE("theorem a2 holds on the ordering walkthrough") {
    auto parsed = parse_program(corpus_text("ordering_ok.l42mu"));
    REQUIRE(parsed.ok());
    DeclarationTable table = qualify_names(parsed.value());
    Verdict v = check_theorem_a2(table, /*prelude=*/true);
    CHECK(v.pass);
    CHECK(v.cases > 0);
}

TEST_CASE("theorem a2 passes vacuously up to a composition abort") {
    auto parsed = parse_program(corpus_text("implements_clash.l42mu"));
    REQUIRE(parsed.ok());
    DeclarationTable table = qualify_names(parsed.value());
    Verdict v = check_theorem_a2(table, /*prelude=*/true);
    CHECK(v.pass);
}

TEST_CASE("theorem a2 sampled over random tables") {
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        GenConfig cfg;
        cfg.seed = seed;
        DeclarationTable table = gen_table(cfg);
        Verdict v = check_theorem_a2(table);
        CHECK_MESSAGE(v.pass, "seed ", seed, ": ", v.detail);
    }
}

TEST_CASE("theorem a1 sampled over well-typed tables") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        GenConfig cfg;
        cfg.seed = seed;
        cfg.well_typed = true;
        DeclarationTable table = gen_table(cfg);
        Verdict v = check_theorem_a1(table, 20, 50000, seed ^ 0xabcddcba);
        if (v.skipped) continue;
        ++checked;
        CHECK_MESSAGE(v.pass, "seed ", seed, ": ", v.detail);
    }
    CHECK(checked > 40);
}

TEST_CASE("theorem a1 on the point algebra corpus") {
    auto parsed = parse_program(corpus_text("point_algebra.l42mu"));
    REQUIRE(parsed.ok());
    DeclarationTable table =
        normalize_interface_imports(qualify_names(parsed.value()), true);
    Verdict v = check_theorem_a1(table, 50, 100000, 1234, /*prelude=*/true);
    CHECK(v.pass);
    CHECK(v.cases == 50);
}

TEST_CASE("theorem a1 is vacuous with an empty expression budget") {
    GenConfig cfg;
    cfg.seed = 3;
    cfg.well_typed = true;
    Verdict v = check_theorem_a1(gen_table(cfg), 0, 1000, 9);
    CHECK(v.pass);
    CHECK(v.cases == 0);
}

TEST_CASE("composition algebra laws hold on samples") {
    GenConfig cfg;
    cfg.seed = 5;
    Verdict v = check_algebra(cfg, 1000);
    CHECK_MESSAGE(v.pass, v.detail);
    CHECK(v.cases > 1000);
}

TEST_CASE("clash outcomes are symmetric") {
    Rng rng(17);
    GenConfig cfg;
    int clashes = 0;
    for (int i = 0; i < 600; ++i) {
        CodeLiteral l1 = gen_literal(rng, cfg);
        CodeLiteral l2 = gen_literal(rng, cfg);
        auto r12 = sum_literals(l1, l2);
        auto r21 = sum_literals(l2, l1);
        REQUIRE(r12.ok() == r21.ok());
        if (!r12.ok()) {
            ++clashes;
            CHECK(r12.error().code == r21.error().code);
        }
    }
    CHECK(clashes > 0);
}

TEST_CASE("getter and wither laws hold on random coherent factories") {
    Verdict v = check_state_laws(2024, 300);
    CHECK_MESSAGE(v.pass, v.detail);
    CHECK(v.cases > 0);
}

TEST_CASE("shrinking reduces failing tables greedily") {
    auto parsed = parse_program(
        "x= {method int keep(){return 1;}}\n"
        "y= {method int drop(){return 2;} method int other(){return 3;}}\n"
        "Z= {method int alsodrop(){return 4;}}\n");
    REQUIRE(parsed.ok());
    auto has_keep = [](const DeclarationTable& t) {
        return print_source(t, false).find("keep") != std::string::npos;
    };
    DeclarationTable small = shrink_table(parsed.value(), has_keep);
    CHECK(small.decls.size() == 1);
    CHECK(small.decls[0].name == "x");
    CHECK(print_source(small, false).find("drop") == std::string::npos);

    // Member-level shrinking: keep the declaration but drop extra members.
    auto has_other = [](const DeclarationTable& t) {
        return print_source(t, false).find("other") != std::string::npos;
    };
    DeclarationTable narrowed = shrink_table(parsed.value(), has_other);
    CHECK(narrowed.decls.size() == 1);
    CHECK(narrowed.decls[0].literal()->members.size() == 1);
}

TEST_CASE("fuzz campaigns are clean and deterministic") {
    FuzzSummary a = fuzz_a2(7, 150, "");
    CHECK(a.failures == 0);
    CHECK(a.divergence == 0);
    FuzzSummary b = fuzz_a2(7, 150, "");
    CHECK(a.detail == b.detail);

    FuzzSummary a1 = fuzz_a1(3, 40, 10, 50000, "");
    CHECK(a1.failures == 0);
    CHECK(a1.tables == 40);

    FuzzSummary alg = fuzz_algebra(9, 500, "");
    CHECK(alg.failures == 0);
}
