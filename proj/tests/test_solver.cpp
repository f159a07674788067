#include "doctest.h"
#include "qnpk/direct.hpp"
#include "qnpk/io.hpp"
#include "qnpk/solver.hpp"
#include "support/generators.hpp"

using namespace qnpk;
using namespace qnpk::testing;

TEST_CASE("COIN is strong-cyclic solvable but not strong solvable") {
    TaggedFond p = load_fond_fixture("coin.fond");
    auto sc = solve_strong_cyclic(p);
    REQUIRE(sc.has_value());
    CHECK(verify_strong_cyclic(p, *sc).ok);
    CHECK(!solve_strong(p).has_value());
}

TEST_CASE("solver reproduces the CLEAR fixture policy") {
    Qnp q = load_qnp_fixture("clear.qnp");
    auto pi = solve_strong_cyclic(t_direct(q));
    REQUIRE(pi.has_value());
    Policy fixture =
        load_policy_fixture("clear.pol", universe_of(q), q.name);
    CHECK(*pi == fixture);
}

TEST_CASE("verifier rejects open and disconnected policies") {
    Qnp q = load_qnp_fixture("clear.qnp");
    TaggedFond p = t_direct(q);
    AtomUniverse u = universe_of(p);

    Policy open;  // missing the H-state rule
    open.rules.emplace(AbstractState(u.size()), "Pick");
    VerifyResult r1 = verify_strong_cyclic(p, open);
    CHECK(!r1.ok);
    CHECK(r1.reason == "open-state");

    Policy stuck;  // Putaway/Pick swapped: Pick inapplicable under H
    AbstractState h(u.size());
    h.set(0, true);
    stuck.rules.emplace(AbstractState(u.size()), "Putaway");
    stuck.rules.emplace(h, "Pick");
    CHECK(!verify_strong_cyclic(p, stuck).ok);
}

TEST_CASE("goal-disconnected policies are rejected") {
    // one action that toggles nothing: the goal stays unreachable
    TaggedFond p;
    p.name = "STALL";
    p.atoms = {"g"};
    FondAction a;
    a.name = "noop";
    p.actions.push_back(a);
    p.goal.push_back({LitKind::BoolPos, "g"});
    Policy pi;
    pi.rules.emplace(AbstractState(1), "noop");
    VerifyResult r = verify_strong_cyclic(p, pi);
    CHECK(!r.ok);
    CHECK(r.reason == "goal-unreachable");
    CHECK(!solve_strong_cyclic(p).has_value());
}

TEST_CASE("every solver output passes the independent verifier") {
    SplitMix64 rng(8080);
    int solved = 0;
    for (int i = 0; i < 150; ++i) {
        TaggedFond p = random_fond(rng);
        CAPTURE(i);
        if (auto pi = solve_strong_cyclic(p)) {
            ++solved;
            CHECK(verify_strong_cyclic(p, *pi).ok);
        }
        if (auto pi = solve_strong(p)) {
            VerifyResult r = verify_strong_cyclic(p, *pi);
            CHECK(r.ok);
            // strong solutions induce an acyclic policy graph
            bool acyclic = true;
            for (const auto& comp :
                 strongly_connected_components(r.graph.succ)) {
                if (comp.size() > 1) acyclic = false;
                for (int w : r.graph.succ[comp[0]])
                    if (w == comp[0]) acyclic = false;
            }
            CHECK(acyclic);
        }
    }
    CHECK(solved > 30);
}

TEST_CASE("verify_qnp_policy splits the two failure modes") {
    Qnp loopbug = load_qnp_fixture("loopbug.qnp");
    Policy pi = load_policy_fixture("loopbug.pol", universe_of(loopbug),
                                    loopbug.name);
    QnpVerifyResult r = verify_qnp_policy(loopbug, pi);
    CHECK(!r.ok);
    CHECK(r.reason == "non-terminating");

    Qnp nest = load_qnp_fixture("nest.qnp");
    Policy npi =
        load_policy_fixture("nest.pol", universe_of(nest), nest.name);
    CHECK(verify_qnp_policy(nest, npi).ok);
}

TEST_CASE("oracle matches the fixture policies and rejects LOOPBUG") {
    Qnp clear = load_qnp_fixture("clear.qnp");
    auto c = oracle_solve_qnp(clear);
    REQUIRE(c.has_value());
    CHECK(*c == load_policy_fixture("clear.pol", universe_of(clear),
                                    clear.name));

    Qnp nest = load_qnp_fixture("nest.qnp");
    auto n = oracle_solve_qnp(nest);
    REQUIRE(n.has_value());
    CHECK(*n ==
          load_policy_fixture("nest.pol", universe_of(nest), nest.name));

    CHECK(!oracle_solve_qnp(load_qnp_fixture("loopbug.qnp")).has_value());
}

TEST_CASE("oracle refuses oversized inputs") {
    Qnp on = load_qnp_fixture("on.qnp");  // 3 + 2 variables: at the cap
    CHECK_THROWS_AS(oracle_solve_qnp(on, 4), std::invalid_argument);
    CHECK(oracle_solve_qnp(on, 5).has_value());
}

TEST_CASE("the node budget is enforced") {
    TaggedFond p = t_direct(load_qnp_fixture("on.qnp"));
    CHECK_THROWS_AS(solve_strong_cyclic(p, 3), BudgetExceeded);
    CHECK(solve_strong_cyclic(p, 100000).has_value());
}
