#include "doctest.h"
#include "qnpk/direct.hpp"
#include "qnpk/io.hpp"
#include "qnpk/qnp2fond.hpp"
#include "qnpk/solver.hpp"
#include "support/generators.hpp"

using namespace qnpk;
using namespace qnpk::testing;

TEST_CASE("variable analysis: never-incremented variables stay direct") {
    Qnp gripper = load_qnp_fixture("gripper.qnp");
    VariableLayout lay = analyze_variables(gripper);
    CHECK(lay.direct_vars == std::vector<std::string>{"b"});
    CHECK(lay.stacked_vars == std::vector<std::string>{"c", "g"});

    Qnp on = load_qnp_fixture("on.qnp");
    VariableLayout lon = analyze_variables(on);
    CHECK(lon.direct_vars == std::vector<std::string>{"n"});
    CHECK(lon.stacked_vars == std::vector<std::string>{"m"});

    Qnp clear = load_qnp_fixture("clear.qnp");
    CHECK(analyze_variables(clear).stacked_vars.empty());
}

TEST_CASE("without increments the full translation is the direct one") {
    for (const char* name : {"clear.qnp"}) {
        Qnp q = load_qnp_fixture(name);
        FullTranslation t = t_full(q);
        CHECK(t.layout.degenerate());
        CHECK(t.fond == t_direct(q));
    }
}

TEST_CASE("golden sizes of the full translations") {
    FullTranslation on = t_full(load_qnp_fixture("on.qnp"));
    CHECK(on.fond.atoms.size() == 27);
    CHECK(on.fond.actions.size() == 20);

    FullTranslation gr = t_full(load_qnp_fixture("gripper.qnp"));
    CHECK(gr.fond.atoms.size() == 33);
    CHECK(gr.fond.actions.size() == 36);
}

TEST_CASE("counter bound defaults to one increment per abstract state") {
    FullTranslation gr = t_full(load_qnp_fixture("gripper.qnp"));
    // n = |F| + |V| = 4 variables
    CHECK(gr.layout.max_value == 16);
    CHECK(gr.layout.bit_width == 5);
    TranslateOptions o;
    o.max_override = 3;  // rounded up to the next power of two
    FullTranslation small = t_full(load_qnp_fixture("gripper.qnp"), o);
    CHECK(small.layout.max_value == 4);
}

TEST_CASE("full translation output re-parses and validates") {
    for (const char* name : {"gripper.qnp", "on.qnp", "nest.qnp"}) {
        CAPTURE(name);
        FullTranslation t = t_full(load_qnp_fixture(name));
        std::string text = emit_fond(t.fond);
        CHECK(parse_fond(text) == t.fond);
    }
}

TEST_CASE("solutions of the full translation project to fixture policies") {
    for (const char* model : {"gripper", "on", "nest", "clear"}) {
        CAPTURE(model);
        Qnp q = load_qnp_fixture(std::string(model) + ".qnp");
        FullTranslation t = t_full(q);
        auto pi_full = solve_strong_cyclic(t.fond);
        REQUIRE(pi_full.has_value());
        ProjectionResult proj = project_full_policy(q, t, *pi_full);
        REQUIRE(proj.memoryless_ok);
        Policy fixture = load_policy_fixture(std::string(model) + ".pol",
                                            universe_of(q), q.name);
        CHECK(proj.memoryless == fixture);
        CHECK(verify_qnp_policy(q, proj.memoryless).ok);
    }
}

TEST_CASE("LOOPBUG's full translation is unsolvable") {
    FullTranslation t = t_full(load_qnp_fixture("loopbug.qnp"));
    CHECK(!solve_strong_cyclic(t.fond).has_value());
}

TEST_CASE("fixture policies lift onto the full translation") {
    for (const char* model : {"gripper", "on", "nest"}) {
        CAPTURE(model);
        Qnp q = load_qnp_fixture(std::string(model) + ".qnp");
        FullTranslation t = t_full(q);
        Policy fixture = load_policy_fixture(std::string(model) + ".pol",
                                            universe_of(q), q.name);
        LiftResult lifted = lift_policy_star(q, t, fixture);
        REQUIRE_MESSAGE(lifted.ok, lifted.reason);
        CHECK(verify_strong_cyclic(t.fond, lifted.policy).ok);
        // projecting back recovers the source policy
        ProjectionResult proj = project_full_policy(q, t, lifted.policy);
        REQUIRE(proj.memoryless_ok);
        CHECK(proj.memoryless == fixture);
    }
}

TEST_CASE("lifting refuses non-solutions") {
    Qnp q = load_qnp_fixture("loopbug.qnp");
    FullTranslation t = t_full(q);
    Policy pi = load_policy_fixture("loopbug.pol", universe_of(q), q.name);
    LiftResult lifted = lift_policy_star(q, t, pi);
    CHECK(!lifted.ok);
}

TEST_CASE("pipeline solvability matches the oracle on random QNPs") {
    SplitMix64 rng(171717);
    int agree = 0;
    for (int i = 0; i < 60; ++i) {
        Qnp q = random_qnp(rng);
        CAPTURE(i);
        auto oracle = oracle_solve_qnp(q);
        TranslateOptions o;
        o.max_override = 4;
        FullTranslation t = t_full(q, o);
        auto pipeline = solve_strong_cyclic(t.fond);
        if (oracle.has_value()) {
            // completeness may need a bigger counter bound
            if (!pipeline) {
                o.max_override = 16;
                pipeline = solve_strong_cyclic(t_full(q, o).fond);
            }
            CHECK(pipeline.has_value());
        } else {
            CHECK(!pipeline.has_value());  // soundness has no bound caveat
        }
        ++agree;
    }
    CHECK(agree == 60);
}

TEST_CASE("scaling family: quadratic atoms, cubic actions") {
    // k numeric variables, each incremented and decremented once
    auto family = [](int k) {
        Qnp q;
        q.name = "FAM" + std::to_string(k);
        for (int i = 0; i < k; ++i)
            q.nums.push_back("x" + std::to_string(i));
        for (int i = 0; i < k; ++i) {
            QnpAction a;
            a.name = "dec" + std::to_string(i);
            a.pre.push_back({LitKind::NumPos, q.nums[i]});
            a.num.push_back({NumEffKind::Dec, q.nums[i]});
            if (i + 1 < k) a.num.push_back({NumEffKind::Inc, q.nums[i + 1]});
            q.actions.push_back(a);
        }
        for (const auto& v : q.nums)
            q.init.push_back({LitKind::NumPos, v});
        q.goal.push_back({LitKind::NumZero, q.nums[0]});
        return q;
    };
    for (int k = 2; k <= 8; ++k) {
        Qnp q = family(k);
        FullTranslation t = t_full(q);
        double n = k;
        CAPTURE(k);
        // generous envelope around the asymptotic shape
        CHECK(static_cast<double>(t.fond.atoms.size()) <= 16 * n * n + 64);
        CHECK(static_cast<double>(t.fond.actions.size()) <=
              16 * (q.actions.size() * n * n + n * n * n) + 64);
    }
}
