#include "doctest.h"
#include "qnpk/direct.hpp"
#include "qnpk/io.hpp"
#include "support/generators.hpp"

using namespace qnpk;
using namespace qnpk::testing;

TEST_CASE("parse/emit identity on the QNP fixtures") {
    for (const char* name :
         {"clear.qnp", "nest.qnp", "loopbug.qnp", "on.qnp", "gripper.qnp"}) {
        CAPTURE(name);
        Qnp q = load_qnp_fixture(name);
        std::string once = emit_qnp(q);
        Qnp q2 = parse_qnp(once, name);
        CHECK(q == q2);
        CHECK(emit_qnp(q2) == once);
    }
}

TEST_CASE("parse/emit identity on the FOND fixture") {
    TaggedFond p = load_fond_fixture("coin.fond");
    std::string once = emit_fond(p);
    CHECK(parse_fond(once) == p);
    CHECK(emit_fond(parse_fond(once)) == once);
}

TEST_CASE("parse/emit identity on policy fixtures") {
    for (const char* model :
         {"clear", "nest", "loopbug", "on", "gripper"}) {
        CAPTURE(model);
        Qnp q = load_qnp_fixture(std::string(model) + ".qnp");
        AtomUniverse u = universe_of(q);
        std::string text = read_fixture(std::string(model) + ".pol");
        Policy pi = parse_policy(text, u, q.name);
        CHECK(emit_policy(pi, u, q.name) == text);
    }
}

TEST_CASE("random models round-trip byte-identically") {
    SplitMix64 rng(424242);
    for (int i = 0; i < 250; ++i) {
        CAPTURE(i);
        Qnp q = random_qnp(rng);
        std::string once = emit_qnp(q);
        CHECK(emit_qnp(parse_qnp(once)) == once);

        TaggedFond p = random_fond(rng);
        std::string fonce = emit_fond(p);
        CHECK(emit_fond(parse_fond(fonce)) == fonce);
    }
}

TEST_CASE("syntax errors report their position") {
    try {
        parse_qnp("qnp X\nbools p\nwhat now\n", "f.qnp");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.span().line == 3);
        CHECK(std::string(e.what()).find("unknown directive") !=
              std::string::npos);
    }
}

TEST_CASE("validation failures carry the violation list") {
    // decrement without guard
    std::string bad =
        "qnp B\nbools\nnums X\naction d\npre\neff X--\ninit X>0\ngoal X=0\n";
    try {
        parse_qnp(bad, "bad.qnp");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        REQUIRE(!e.report.empty());
        CHECK(e.report[0].code == "missing-dec-guard");
    }
}

TEST_CASE("policy parser rejects duplicates and wrong models") {
    Qnp q = load_qnp_fixture("clear.qnp");
    AtomUniverse u = universe_of(q);
    CHECK_THROWS_AS(
        parse_policy("policy CLEAR\n=> Pick\n=> Putaway\n", u, "CLEAR"),
        ParseError);
    CHECK_THROWS_AS(parse_policy("policy OTHER\n=> Pick\n", u, "CLEAR"),
                    ParseError);
    CHECK_THROWS_AS(parse_policy("policy CLEAR\nunknown => Pick\n", u,
                                 "CLEAR"),
                    ParseError);
}

TEST_CASE("empty-state policy rules survive the round trip") {
    Qnp q = load_qnp_fixture("clear.qnp");
    AtomUniverse u = universe_of(q);
    Policy pi;
    pi.rules.emplace(AbstractState(u.size()), "Pick");
    std::string text = emit_policy(pi, u, q.name);
    CHECK(text == "policy CLEAR\n=> Pick\n");
    CHECK(parse_policy(text, u, q.name) == pi);
}

TEST_CASE("PDDL export covers atoms, oneofs and sanitized names") {
    Qnp q = load_qnp_fixture("gripper.qnp");
    PddlExport px = emit_pddl(t_direct(q));
    CHECK(px.domain.find("(:action Move-half-loaded") != std::string::npos);
    CHECK(px.domain.find("oneof") != std::string::npos);
    CHECK(px.domain.find("b_0") != std::string::npos);  // "b=0" sanitized
    CHECK(px.problem.find("(:goal") != std::string::npos);
    // '=' must not leak into identifiers
    CHECK(px.domain.find('=') == std::string::npos);
}

TEST_CASE("PDDL name sanitization stays collision free") {
    TaggedFond p;
    p.name = "N";
    p.atoms = {"a=0", "a>0"};  // both sanitize to the same stem
    p.goal.push_back({LitKind::BoolPos, "a=0"});
    FondAction a;
    a.name = "act";
    a.det.push_back({LitKind::BoolPos, "a>0"});
    p.actions.push_back(a);
    PddlExport px = emit_pddl(p);
    CHECK(px.domain.find("(a_0)") != std::string::npos);
    CHECK(px.domain.find("(a_0_2)") != std::string::npos);
}
