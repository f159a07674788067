#include <algorithm>
#include <set>

#include "doctest.h"
#include "qnpk/direct.hpp"
#include "qnpk/io.hpp"
#include "support/generators.hpp"

using namespace qnpk;
using namespace qnpk::testing;

namespace {

bool applicable(const Qnp& q, const NumericState& s, const QnpAction& a) {
    for (const auto& l : a.pre) {
        if (l.kind == LitKind::BoolPos || l.kind == LitKind::BoolNeg) {
            auto it = std::find(q.bools.begin(), q.bools.end(), l.var);
            if (s.bools[it - q.bools.begin()] != (l.kind == LitKind::BoolPos))
                return false;
        } else {
            auto it = std::find(q.nums.begin(), q.nums.end(), l.var);
            double v = s.nums[it - q.nums.begin()];
            if ((l.kind == LitKind::NumZero) != (v == 0.0)) return false;
        }
    }
    return true;
}

// all concrete successors obtained by sending each decremented variable
// either to 0 or to half its value
std::vector<NumericState> concrete_successors(const Qnp& q,
                                              const NumericState& s,
                                              const QnpAction& a) {
    NumericState base = s;
    for (const auto& l : a.eff) {
        auto it = std::find(q.bools.begin(), q.bools.end(), l.var);
        base.bools[it - q.bools.begin()] = l.kind == LitKind::BoolPos;
    }
    std::vector<std::size_t> dec_idx;
    for (const auto& e : a.num) {
        auto it = std::find(q.nums.begin(), q.nums.end(), e.var);
        std::size_t i = static_cast<std::size_t>(it - q.nums.begin());
        if (e.kind == NumEffKind::Inc)
            base.nums[i] += 1.0;
        else
            dec_idx.push_back(i);
    }
    std::vector<NumericState> out;
    for (std::size_t mask = 0; mask < (1u << dec_idx.size()); ++mask) {
        NumericState t = base;
        for (std::size_t j = 0; j < dec_idx.size(); ++j)
            t.nums[dec_idx[j]] =
                (mask >> j) & 1 ? 0.0 : s.nums[dec_idx[j]] / 2.0;
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

TEST_CASE("direct translation of CLEAR has two atoms and two actions") {
    Qnp q = load_qnp_fixture("clear.qnp");
    TaggedFond p = t_direct(q);
    CHECK(p.atoms == std::vector<std::string>{"H", "n=0"});
    REQUIRE(p.actions.size() == 2);
    const FondAction& pick = *p.find_action("Pick");
    REQUIRE(pick.ndets.size() == 1);  // Dec n becomes a oneof
    CHECK(pick.ndets[0].outcomes.size() == 2);
    CHECK(pick.tag.decrements("n"));
    const FondAction& put = *p.find_action("Putaway");
    CHECK(put.ndets.empty());
    CHECK(put.tag.empty());
}

TEST_CASE("increments deterministically clear the zero flag") {
    Qnp q = load_qnp_fixture("nest.qnp");
    TaggedFond p = t_direct(q);
    const FondAction& a = *p.find_action("a");
    // a decrements X (oneof) and increments Y (deterministic -Y=0)
    CHECK(std::find(a.det.begin(), a.det.end(),
                    Literal{LitKind::BoolNeg, "Y=0"}) != a.det.end());
    REQUIRE(a.ndets.size() == 1);
    CHECK(a.tag.increments("Y"));
    CHECK(a.tag.decrements("X"));
}

TEST_CASE("direct translation re-parses as a valid FOND problem") {
    for (const char* name :
         {"clear.qnp", "nest.qnp", "loopbug.qnp", "on.qnp", "gripper.qnp"}) {
        CAPTURE(name);
        TaggedFond p = t_direct(load_qnp_fixture(name));
        std::string text = emit_fond(p);
        CHECK(parse_fond(text) == p);
    }
}

TEST_CASE("boolean successors match the concrete transition relation") {
    SplitMix64 rng(314159);
    int checked = 0;
    for (int i = 0; i < 150; ++i) {
        Qnp q = random_qnp(rng);
        TaggedFond p = t_direct(q);
        AtomUniverse u = universe_of(p);
        NumericState s = random_numeric_state(rng, q);
        AbstractState bs = abstract(q, s);
        for (const auto& a : q.actions) {
            const FondAction& fa = *p.find_action(a.name);
            bool app_abs = satisfies(bs, u, fa.pre);
            CHECK(app_abs == applicable(q, s, a));
            if (!app_abs) continue;
            ++checked;
            std::set<AbstractState> expected;
            for (const auto& t : concrete_successors(q, s, a))
                expected.insert(abstract(q, t));
            auto got_v = qnp_boolean_successors(p, bs, fa);
            std::set<AbstractState> got(got_v.begin(), got_v.end());
            CHECK(got == expected);
        }
    }
    CHECK(checked > 100);  // the property must actually fire
}
