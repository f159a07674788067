#include <algorithm>

#include "doctest.h"
#include "qnpk/direct.hpp"
#include "qnpk/fond2qnp.hpp"
#include "qnpk/io.hpp"
#include "qnpk/qnp2fond.hpp"
#include "qnpk/solver.hpp"
#include "support/generators.hpp"

using namespace qnpk;
using namespace qnpk::testing;

namespace {

// strong-cyclic solve of the reduction via the full translation, trying
// growing counter bounds (the safe default bound is far too large to
// explore explicitly)
// The translation is sound for any counter bound, so a policy found at a
// small bound is a genuine solution; solvable reductions are expected to
// show up at small bounds because the gadget counters stay low.
std::optional<Policy> solve_reduction(const Qnp& q) {
    for (long long max : {2LL, 4LL}) {
        TranslateOptions o;
        o.max_override = max;
        if (auto pi = solve_strong_cyclic(t_full(q, o).fond)) return pi;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("normalization leaves single-oneof problems untouched") {
    TaggedFond coin = load_fond_fixture("coin.fond");
    CHECK(normalize_fond(coin) == coin);
}

TEST_CASE("normalization splits multi-oneof actions into chains") {
    TaggedFond p;
    p.name = "TWO";
    p.atoms = {"x", "y"};
    FondAction a;
    a.name = "both";
    a.ndets.push_back({{{{LitKind::BoolPos, "x"}}, {}}});
    a.ndets.push_back({{{{LitKind::BoolPos, "y"}}, {}}});
    p.actions.push_back(a);
    p.goal = {{LitKind::BoolPos, "x"}, {LitKind::BoolPos, "y"}};

    TaggedFond n = normalize_fond(p);
    CHECK(validate_fond(n).empty());
    REQUIRE(n.actions.size() == 2);
    for (const auto& act : n.actions) CHECK(act.ndets.size() == 1);
    // the chain must not count as done half-way
    CHECK(n.goal.size() > p.goal.size());
    // behaviour is preserved: both problems are strong-cyclic solvable
    CHECK(solve_strong_cyclic(p).has_value() ==
          solve_strong_cyclic(n).has_value());
}

TEST_CASE("reduction gadget for COIN has the expected shape") {
    TaggedFond coin = load_fond_fixture("coin.fond");
    Reduction r = reduce_r(coin);
    CHECK(r.K == 2);
    CHECK(r.nondet_actions == std::vector<std::string>{"flip"});
    CHECK(r.qnp.bools.size() == 7);  // g, normal, ex, cnt 0..3
    CHECK(r.qnp.nums.size() == 3);   // X and two fairness variables
    CHECK(validate_qnp(r.qnp).empty());
    // generated model round-trips through the text format
    std::string text = emit_qnp(r.qnp);
    CHECK(parse_qnp(text) == r.qnp);
}

TEST_CASE("reduction rejects reserved names and unnormalized input") {
    TaggedFond p;
    p.name = "BAD";
    p.atoms = {"__x"};
    p.goal.push_back({LitKind::BoolPos, "__x"});
    CHECK_THROWS_AS(reduce_r(p), std::invalid_argument);

    TaggedFond two;
    two.name = "TWO";
    two.atoms = {"x"};
    FondAction a;
    a.name = "a";
    a.ndets.push_back({{{{LitKind::BoolPos, "x"}}, {}}});
    a.ndets.push_back({{{}, {{LitKind::BoolNeg, "x"}}}});
    two.actions.push_back(a);
    two.goal.push_back({LitKind::BoolPos, "x"});
    CHECK_THROWS_AS(reduce_r(two), std::invalid_argument);
}

TEST_CASE("COIN: reduction solvable, strong variant unsolvable") {
    TaggedFond coin = load_fond_fixture("coin.fond");
    CHECK(solve_reduction(reduce_r(coin).qnp).has_value());
    CHECK(!solve_reduction(reduce_r_strong(coin).qnp).has_value());
}

TEST_CASE("dropping the fair outcome makes COIN's reduction unsolvable") {
    TaggedFond coin = load_fond_fixture("coin.fond");
    ReduceOptions o;
    o.unfair.emplace_back("flip", 1);  // outcome 1 sets g
    Reduction r = reduce_r(coin, o);
    CHECK(!solve_reduction(r.qnp).has_value());
}

TEST_CASE("policies transfer both ways on COIN") {
    TaggedFond coin = load_fond_fixture("coin.fond");
    Reduction r = reduce_r(coin);

    auto pi_p = solve_strong_cyclic(coin);
    REQUIRE(pi_p.has_value());
    TransferResult up = transfer_policy_p_to_q(coin, r, *pi_p);
    REQUIRE_MESSAGE(up.ok, up.reason);
    CHECK(verify_qnp_policy(r.qnp, up.policy).ok);

    Policy back = transfer_policy_q_to_p(coin, r, up.policy);
    CHECK(verify_strong_cyclic(coin, back).ok);
    CHECK(back == *pi_p);
}

TEST_CASE("reduction equivalence on random FOND problems") {
    SplitMix64 rng(55555);
    FondGenLimits small;
    small.max_atoms = 3;
    small.max_actions = 3;
    int checked = 0;
    int skipped = 0;
    for (int i = 0; i < 25; ++i) {
        TaggedFond p = normalize_fond(random_fond(rng, small));
        CAPTURE(i);
        bool solvable = solve_strong_cyclic(p).has_value();
        Reduction r = reduce_r(p);
        std::optional<Policy> got;
        try {
            got = solve_reduction(r.qnp);
        } catch (const BudgetExceeded&) {
            ++skipped;  // reachable space of the reduction too large
            continue;
        }
        CHECK(got.has_value() == solvable);
        if (solvable) {
            TransferResult up =
                transfer_policy_p_to_q(p, r, *solve_strong_cyclic(p));
            REQUIRE_MESSAGE(up.ok, up.reason);
            CHECK(verify_qnp_policy(r.qnp, up.policy).ok);
        }
        ++checked;
    }
    CHECK(checked >= 20);
    CHECK(skipped <= 5);
}

TEST_CASE("strong-reduction equivalence on random FOND problems") {
    SplitMix64 rng(77777);
    FondGenLimits small;
    small.max_atoms = 3;
    small.max_actions = 3;
    int skipped = 0;
    for (int i = 0; i < 15; ++i) {
        TaggedFond p = normalize_fond(random_fond(rng, small));
        CAPTURE(i);
        bool strong = solve_strong(p).has_value();
        Reduction r = reduce_r_strong(p);
        std::optional<Policy> got;
        try {
            got = solve_reduction(r.qnp);
        } catch (const BudgetExceeded&) {
            ++skipped;
            continue;
        }
        CHECK(got.has_value() == strong);
    }
    CHECK(skipped <= 3);
}
