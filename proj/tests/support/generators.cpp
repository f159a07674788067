#include "generators.hpp"

#include <algorithm>

#include "qnpk/io.hpp"

namespace qnpk::testing {

std::string fixture_path(const std::string& name) {
    return std::string(FIXTURE_DIR) + "/" + name;
}

std::string read_fixture(const std::string& name) {
    return read_file(fixture_path(name));
}

Qnp load_qnp_fixture(const std::string& name) {
    return parse_qnp(read_fixture(name), name);
}

TaggedFond load_fond_fixture(const std::string& name) {
    return parse_fond(read_fixture(name), name);
}

Policy load_policy_fixture(const std::string& name, const AtomUniverse& u,
                           const std::string& model_name) {
    return parse_policy(read_fixture(name), u, model_name, name);
}

namespace {

int pick(SplitMix64& rng, int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(rng.next() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
}

bool coin(SplitMix64& rng) { return rng.next() & 1; }

}  // namespace

Qnp random_qnp(SplitMix64& rng, const QnpGenLimits& lim) {
    Qnp q;
    q.name = "RAND";
    int nb = pick(rng, 0, lim.max_bools);
    int nn = pick(rng, nb == 0 ? 1 : 0, lim.max_nums);  // never empty
    for (int i = 0; i < nb; ++i) q.bools.push_back("p" + std::to_string(i));
    for (int i = 0; i < nn; ++i) q.nums.push_back("v" + std::to_string(i));

    int na = pick(rng, 1, lim.max_actions);
    for (int i = 0; i < na; ++i) {
        QnpAction a;
        a.name = "a" + std::to_string(i);
        for (const auto& p : q.bools) {
            int r = pick(rng, 0, 2);
            if (r == 0) a.pre.push_back({LitKind::BoolPos, p});
            if (r == 1) a.pre.push_back({LitKind::BoolNeg, p});
        }
        for (const auto& v : q.nums) {
            int r = pick(rng, 0, 2);
            if (r == 0) a.pre.push_back({LitKind::NumZero, v});
            if (r == 1) a.pre.push_back({LitKind::NumPos, v});
        }
        for (const auto& p : q.bools) {
            int r = pick(rng, 0, 3);
            if (r == 0) a.eff.push_back({LitKind::BoolPos, p});
            if (r == 1) a.eff.push_back({LitKind::BoolNeg, p});
        }
        for (const auto& v : q.nums) {
            int r = pick(rng, 0, 3);
            if (r == 0) {
                // decrements need the positive guard
                bool guarded = false;
                for (auto& l : a.pre)
                    if (l.var == v) {
                        l.kind = LitKind::NumPos;
                        guarded = true;
                    }
                if (!guarded) a.pre.push_back({LitKind::NumPos, v});
                a.num.push_back({NumEffKind::Dec, v});
            } else if (r == 1) {
                a.num.push_back({NumEffKind::Inc, v});
            }
        }
        q.actions.push_back(std::move(a));
    }

    for (const auto& p : q.bools)
        if (coin(rng)) q.init.push_back({LitKind::BoolPos, p});
    for (const auto& v : q.nums)
        q.init.push_back(
            {coin(rng) ? LitKind::NumZero : LitKind::NumPos, v});

    // a non-empty goal over a random subset, numeric goals biased to =0
    for (const auto& p : q.bools)
        if (pick(rng, 0, 2) == 0)
            q.goal.push_back(
                {coin(rng) ? LitKind::BoolPos : LitKind::BoolNeg, p});
    for (const auto& v : q.nums)
        if (pick(rng, 0, 2) == 0) q.goal.push_back({LitKind::NumZero, v});
    if (q.goal.empty()) q.goal.push_back({LitKind::NumZero, q.nums.empty()
                                              ? q.bools.front()
                                              : q.nums.front()});
    if (q.goal.back().kind == LitKind::NumZero && q.nums.empty())
        q.goal.back().kind = LitKind::BoolPos;

    AtomUniverse u = universe_of(q);
    for (auto& a : q.actions) {
        canonicalize(a.pre, u);
        canonicalize(a.eff, u);
    }
    canonicalize(q.init, u);
    canonicalize(q.goal, u);
    return q;
}

TaggedFond random_fond(SplitMix64& rng, const FondGenLimits& lim) {
    TaggedFond p;
    p.name = "RANDF";
    int na_atoms = pick(rng, 1, lim.max_atoms);
    for (int i = 0; i < na_atoms; ++i)
        p.atoms.push_back("q" + std::to_string(i));

    int na = pick(rng, 1, lim.max_actions);
    int nondet_left = lim.max_nondet_actions;
    for (int i = 0; i < na; ++i) {
        FondAction a;
        a.name = "a" + std::to_string(i);
        for (const auto& atom : p.atoms) {
            int r = pick(rng, 0, 2);
            if (r == 0) a.pre.push_back({LitKind::BoolPos, atom});
            if (r == 1) a.pre.push_back({LitKind::BoolNeg, atom});
        }
        bool nondet = nondet_left > 0 && coin(rng);
        if (nondet) {
            --nondet_left;
            FondEffect eff;
            int k = pick(rng, 2, lim.max_outcomes);
            for (int oc = 0; oc < k; ++oc) {
                std::vector<Literal> lits;
                for (const auto& atom : p.atoms)
                    if (pick(rng, 0, 2) == 0)
                        lits.push_back({coin(rng) ? LitKind::BoolPos
                                                  : LitKind::BoolNeg,
                                        atom});
                eff.outcomes.push_back(std::move(lits));
            }
            a.ndets.push_back(std::move(eff));
        } else {
            for (const auto& atom : p.atoms) {
                int r = pick(rng, 0, 3);
                if (r == 0) a.det.push_back({LitKind::BoolPos, atom});
                if (r == 1) a.det.push_back({LitKind::BoolNeg, atom});
            }
        }
        p.actions.push_back(std::move(a));
    }

    for (const auto& atom : p.atoms)
        if (coin(rng)) p.init.push_back(atom);
    for (const auto& atom : p.atoms)
        if (pick(rng, 0, 2) == 0)
            p.goal.push_back(
                {coin(rng) ? LitKind::BoolPos : LitKind::BoolNeg, atom});
    if (p.goal.empty()) p.goal.push_back({LitKind::BoolPos, p.atoms.front()});

    AtomUniverse u = universe_of(p);
    for (auto& a : p.actions) {
        canonicalize(a.pre, u);
        canonicalize(a.det, u);
        for (auto& nd : a.ndets)
            for (auto& oc : nd.outcomes) canonicalize(oc, u);
    }
    std::sort(p.init.begin(), p.init.end());
    canonicalize(p.goal, u);
    return p;
}

NumericState random_numeric_state(SplitMix64& rng, const Qnp& q,
                                  double high) {
    NumericState s;
    for (std::size_t i = 0; i < q.bools.size(); ++i)
        s.bools.push_back(coin(rng));
    for (std::size_t i = 0; i < q.nums.size(); ++i)
        s.nums.push_back(coin(rng) ? 0.0 : rng.uniform(0.01, high));
    return s;
}

}  // namespace qnpk::testing
