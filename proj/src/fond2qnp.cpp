#include "qnpk/fond2qnp.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

#include "qnpk/direct.hpp"

namespace qnpk {

namespace {

void reject_reserved(const TaggedFond& p) {
    auto bad = [](const std::string& s) { return s.rfind("__", 0) == 0; };
    for (const auto& a : p.atoms)
        if (bad(a))
            throw std::invalid_argument("reserved atom name: " + a);
    for (const auto& a : p.actions)
        if (bad(a.name))
            throw std::invalid_argument("reserved action name: " + a.name);
}

Literal pos(const std::string& atom) { return {LitKind::BoolPos, atom}; }
Literal neg(const std::string& atom) { return {LitKind::BoolNeg, atom}; }

std::string seq_atom(const std::string& a) { return "__seq_" + a; }
std::string next_atom(int j) { return "__next_" + std::to_string(j); }

std::string cnt_atom(int i) { return "__cnt_" + std::to_string(i); }
std::string ex_atom(const std::string& a) { return "__ex_" + a; }
std::string y_var(const std::string& a, int i) {
    return "__Y_" + a + "_" + std::to_string(i);
}

}  // namespace

TaggedFond normalize_fond(const TaggedFond& p) {
    reject_reserved(p);

    std::vector<const FondAction*> split;
    int max_chain = 0;
    for (const auto& a : p.actions)
        if (a.ndets.size() > 1) {
            split.push_back(&a);
            max_chain = std::max(max_chain, static_cast<int>(a.ndets.size()));
        }
    if (split.empty()) return p;

    TaggedFond out;
    out.name = p.name;
    out.atoms = p.atoms;
    for (const auto* a : split) out.atoms.push_back(seq_atom(a->name));
    for (int j = 2; j <= max_chain; ++j) out.atoms.push_back(next_atom(j));
    out.init = p.init;
    out.goal = p.goal;
    // mid-chain states must not count as goal states
    for (const auto* a : split) out.goal.push_back(neg(seq_atom(a->name)));

    std::vector<Literal> exclusion;
    for (const auto* a : split) exclusion.push_back(neg(seq_atom(a->name)));

    auto tag_for_fragment = [&](const FondAction& a, std::size_t frag) {
        // dec tags ride with the fragment carrying their oneof, inc tags
        // (and anything unmatched) with the first fragment
        NumTag tag;
        for (const auto& e : a.tag.entries) {
            std::size_t home = 0;
            if (e.kind == NumEffKind::Dec) {
                for (std::size_t k = 0; k < a.ndets.size(); ++k)
                    for (const auto& oc : a.ndets[k].outcomes)
                        for (const auto& l : oc)
                            if (l.var == zero_flag(e.var)) home = k;
            }
            if (home == frag) tag.entries.push_back(e);
        }
        return tag;
    };

    for (const auto& a : p.actions) {
        if (a.ndets.size() <= 1) {
            FondAction fa = a;
            for (const auto& l : exclusion) fa.pre.push_back(l);
            out.actions.push_back(std::move(fa));
            continue;
        }
        const int n = static_cast<int>(a.ndets.size());
        for (int j = 1; j <= n; ++j) {
            FondAction fa;
            fa.name = a.name + "(" + std::to_string(j) + ")";
            if (j == 1) {
                fa.pre = a.pre;
                for (const auto& l : exclusion) fa.pre.push_back(l);
                fa.det = a.det;
                fa.det.push_back(pos(seq_atom(a.name)));
                fa.det.push_back(n > 1 ? pos(next_atom(2))
                                       : neg(seq_atom(a.name)));
            } else {
                fa.pre = {pos(seq_atom(a.name)), pos(next_atom(j))};
                fa.det.push_back(neg(next_atom(j)));
                fa.det.push_back(j < n ? pos(next_atom(j + 1))
                                       : neg(seq_atom(a.name)));
            }
            fa.ndets.push_back(a.ndets[j - 1]);
            fa.tag = tag_for_fragment(a, static_cast<std::size_t>(j - 1));
            out.actions.push_back(std::move(fa));
        }
    }

    AtomUniverse u = universe_of(out);
    for (auto& a : out.actions) {
        canonicalize(a.pre, u);
        canonicalize(a.det, u);
    }
    canonicalize(out.goal, u);
    return out;
}

namespace {

// outcomes with the deterministic effects folded in
std::vector<std::vector<Literal>> aggregated_outcomes(const FondAction& a) {
    std::vector<std::vector<Literal>> out;
    for (const auto& oc : a.ndets[0].outcomes) {
        std::vector<Literal> e = a.det;
        e.insert(e.end(), oc.begin(), oc.end());
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

Reduction reduce_r(const TaggedFond& p, const ReduceOptions& opts) {
    reject_reserved(p);
    Reduction r;

    for (const auto& a : p.actions) {
        if (a.ndets.size() > 1)
            throw std::invalid_argument(
                "reduce_r needs a normalized problem, action " + a.name +
                " has several oneof clauses");
        if (a.ndets.size() == 1 && a.ndets[0].outcomes.size() > 1) {
            r.nondet_actions.push_back(a.name);
            int k = static_cast<int>(a.ndets[0].outcomes.size());
            r.arity.emplace(a.name, k);
            r.K = std::max(r.K, k);
        }
    }

    auto unfair = [&](const std::string& a, int i) {
        for (const auto& [ua, ui] : opts.unfair)
            if (ua == a && ui == i) return true;
        return false;
    };

    Qnp& q = r.qnp;
    q.name = p.name;
    q.bools = p.atoms;
    q.bools.push_back("__normal");
    for (const auto& a : r.nondet_actions) q.bools.push_back(ex_atom(a));
    const int cnt_top = r.nondet_actions.empty() ? 0 : r.K + 1;
    for (int i = 0; i <= cnt_top; ++i) q.bools.push_back(cnt_atom(i));

    q.nums.push_back("__X");
    for (const auto& a : r.nondet_actions)
        for (int i = 1; i <= r.arity.at(a); ++i)
            if (!unfair(a, i)) q.nums.push_back(y_var(a, i));

    for (const auto& atom : p.init) q.init.push_back(pos(atom));
    q.init.push_back(pos("__normal"));
    q.init.push_back(pos(cnt_atom(0)));
    q.init.push_back({LitKind::NumZero, "__X"});
    // the fairness variables start positive, which the closed world already says

    q.goal = p.goal;

    auto has_y = [&](const std::string& a, int i) {
        return !r.strong && !unfair(a, i);
    };

    for (const auto& a : p.actions) {
        bool nondet =
            std::find(r.nondet_actions.begin(), r.nondet_actions.end(),
                      a.name) != r.nondet_actions.end();
        QnpAction qa;
        qa.name = a.name;
        qa.pre = a.pre;
        qa.pre.push_back(pos("__normal"));
        qa.pre.push_back(pos(cnt_atom(0)));
        if (!nondet) {
            qa.eff = a.det;
            if (a.ndets.size() == 1)  // single-outcome oneof: deterministic
                for (const auto& l : a.ndets[0].outcomes[0])
                    qa.eff.push_back(l);
            q.actions.push_back(std::move(qa));
            continue;
        }

        // trigger: arm the gadget instead of applying the effects
        qa.eff = {neg("__normal"), pos(ex_atom(a.name))};
        qa.num.push_back({NumEffKind::Inc, "__X"});
        q.actions.push_back(std::move(qa));
    }

    if (!r.nondet_actions.empty()) {
        QnpAction start;
        start.name = "__start";
        start.pre = {neg("__normal"), pos(cnt_atom(0)),
                     {LitKind::NumPos, "__X"}};
        start.eff = {neg(cnt_atom(0)), pos(cnt_atom(1))};
        start.num.push_back({NumEffKind::Dec, "__X"});
        q.actions.push_back(std::move(start));
    }

    for (const auto& name : r.nondet_actions) {
        const FondAction& a = *p.find_action(name);
        const int k = r.arity.at(name);
        auto outcomes = aggregated_outcomes(a);

        for (int i = 1; i <= k; ++i) {
            QnpAction exit;
            exit.name = "__exit_" + name + "_" + std::to_string(i);
            exit.pre = {pos(ex_atom(name)), pos(cnt_atom(i)),
                        {LitKind::NumZero, "__X"}};
            if (has_y(name, i))
                exit.pre.push_back({LitKind::NumPos, y_var(name, i)});
            exit.eff = {neg(ex_atom(name)), neg(cnt_atom(i)), pos("__normal"),
                        pos(cnt_atom(0))};
            for (const auto& l : outcomes[i - 1]) exit.eff.push_back(l);
            if (has_y(name, i))
                exit.num.push_back({NumEffKind::Inc, y_var(name, i)});
            for (int j = 1; j <= k; ++j) {
                if (j == i || !has_y(name, j)) continue;
                exit.pre.push_back({LitKind::NumPos, y_var(name, j)});
                exit.num.push_back({NumEffKind::Dec, y_var(name, j)});
            }
            q.actions.push_back(std::move(exit));

            if (has_y(name, i)) {
                // goal shortcut once outcome i has been owed long enough
                QnpAction exitg;
                exitg.name = "__exitg_" + name + "_" + std::to_string(i);
                exitg.pre = {pos(ex_atom(name)), pos(cnt_atom(i)),
                             {LitKind::NumZero, "__X"},
                             {LitKind::NumZero, y_var(name, i)}};
                exitg.eff = {neg(ex_atom(name)), neg(cnt_atom(i)),
                             pos("__normal"), pos(cnt_atom(0))};
                for (const auto& l : p.goal) exitg.eff.push_back(l);
                q.actions.push_back(std::move(exitg));

                if (opts.exitg == ExitGMode::Repaired && !r.strong) {
                    // same shortcut from the other slots; one variant per
                    // slot because the effect must name the counter atom
                    for (int j = 1; j <= k; ++j) {
                        if (j == i) continue;
                        QnpAction fix;
                        fix.name = "__exitg_" + name + "_" +
                                   std::to_string(i) + "_" +
                                   std::to_string(j);
                        fix.pre = {pos(ex_atom(name)), pos(cnt_atom(j)),
                                   {LitKind::NumZero, "__X"},
                                   {LitKind::NumZero, y_var(name, i)}};
                        fix.eff = {neg(ex_atom(name)), neg(cnt_atom(j)),
                                   pos("__normal"), pos(cnt_atom(0))};
                        for (const auto& l : p.goal) fix.eff.push_back(l);
                        q.actions.push_back(std::move(fix));
                    }
                }
            }

            QnpAction cont;
            cont.name = "__cont_" + name + "_" + std::to_string(i);
            cont.pre = {pos(ex_atom(name)), pos(cnt_atom(i)),
                        {LitKind::NumPos, "__X"}};
            cont.eff = {neg(cnt_atom(i)), pos(cnt_atom(i + 1))};
            cont.num.push_back({NumEffKind::Dec, "__X"});
            q.actions.push_back(std::move(cont));
        }

        QnpAction loop;
        loop.name = "__loop_" + name;
        loop.pre = {pos(ex_atom(name)), pos(cnt_atom(k)),
                    {LitKind::NumPos, "__X"}};
        loop.eff = {neg(cnt_atom(k)), pos(cnt_atom(1))};
        q.actions.push_back(std::move(loop));
    }

    AtomUniverse u = universe_of(q);
    for (auto& a : q.actions) {
        canonicalize(a.pre, u);
        canonicalize(a.eff, u);
        std::sort(a.num.begin(), a.num.end(),
                  [&](const NumEffect& x, const NumEffect& y) {
                      return u.find(zero_flag(x.var)) < u.find(zero_flag(y.var));
                  });
    }
    canonicalize(q.init, u);
    canonicalize(q.goal, u);
    return r;
}

Reduction reduce_r_strong(const TaggedFond& p) {
    // same skeleton without fairness variables or goal shortcuts
    ReduceOptions opts;
    opts.exitg = ExitGMode::Faithful;
    for (const auto& a : p.actions)
        if (a.ndets.size() == 1 && a.ndets[0].outcomes.size() > 1)
            for (int i = 1;
                 i <= static_cast<int>(a.ndets[0].outcomes.size()); ++i)
                opts.unfair.emplace_back(a.name, i);
    Reduction r = reduce_r(p, opts);
    r.strong = true;
    return r;
}

namespace {

int gadget_rank(const std::string& name) {
    if (name.rfind("__exitg_", 0) == 0) return 0;
    if (name.rfind("__exit_", 0) == 0) return 1;
    if (name.rfind("__loop_", 0) == 0) return 2;
    if (name.rfind("__cont_", 0) == 0) return 3;
    if (name == "__start") return 4;
    return 5;
}

}  // namespace

TransferResult transfer_policy_p_to_q(const TaggedFond& p, const Reduction& r,
                                      const Policy& pi_p) {
    TransferResult out;
    const Qnp& q = r.qnp;
    TaggedFond pd = t_direct(q);
    AtomUniverse u = universe_of(pd);
    AtomUniverse pu = universe_of(p);
    int normal_idx = u.find("__normal");

    std::deque<AbstractState> queue{initial_abstract_states(pd)[0]};
    std::set<AbstractState> seen{queue.front()};
    while (!queue.empty()) {
        AbstractState s = queue.front();
        queue.pop_front();
        if (satisfies(s, u, pd.goal)) continue;

        std::string action;
        if (s.get(static_cast<std::size_t>(normal_idx))) {
            AbstractState proj(pu.size());
            for (std::size_t i = 0; i < pu.size(); ++i) proj.set(i, s.get(i));
            const std::string* a = pi_p.lookup(proj);
            if (!a) {
                out.reason = "source policy undefined on a reachable state";
                return out;
            }
            action = *a;
        } else {
            // forced gadget step; goal exits beat ordinary exits, the loop
            // restart beats continuing into the dead slot
            int best_rank = 6;
            for (const auto& a : pd.actions) {
                if (a.name.rfind("__", 0) != 0) continue;
                if (!satisfies(s, u, a.pre)) continue;
                int rank = gadget_rank(a.name);
                if (rank < best_rank) {
                    best_rank = rank;
                    action = a.name;
                }
            }
            if (action.empty()) {
                out.reason = "gadget deadlock";
                return out;
            }
        }

        const FondAction* fa = pd.find_action(action);
        if (!fa || !satisfies(s, u, fa->pre)) {
            out.reason = "transferred action inapplicable: " + action;
            return out;
        }
        out.policy.rules.emplace(s, action);
        for (const auto& t : qnp_boolean_successors(pd, s, *fa))
            if (seen.insert(t).second) queue.push_back(t);
    }
    out.ok = true;
    return out;
}

Policy transfer_policy_q_to_p(const TaggedFond& p, const Reduction& r,
                              const Policy& pi_q) {
    const Qnp& q = r.qnp;
    AtomUniverse u = universe_of(t_direct(q));
    AtomUniverse pu = universe_of(p);

    // canonical embedding: __normal and __cnt_0 hold, __X is zero, the
    // fairness variables are positive, every other gadget atom is false
    Policy out;
    for (const auto& [state, action] : pi_q.rules) {
        bool canonical = true;
        for (std::size_t i = pu.size(); i < u.size(); ++i) {
            const std::string& atom = u.atoms[i];
            bool expect = atom == "__normal" || atom == "__cnt_0" ||
                          atom == zero_flag("__X");
            if (state.get(i) != expect) canonical = false;
        }
        if (!canonical) continue;
        if (action.rfind("__", 0) == 0) continue;
        AbstractState proj(pu.size());
        for (std::size_t i = 0; i < pu.size(); ++i) proj.set(i, state.get(i));
        out.rules.emplace(proj, action);
    }
    return out;
}

}  // namespace qnpk
