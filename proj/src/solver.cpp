#include "qnpk/solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>
#include <set>
#include <unordered_map>

#include "qnpk/direct.hpp"

namespace qnpk {

std::size_t node_budget(std::size_t fallback) {
    if (const char* env = std::getenv("QNPK_NODE_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return fallback;
}

namespace {

struct CompiledAction {
    int id;
    std::vector<std::pair<int, bool>> pre, det;
    // per oneof, per outcome, atom assignments
    std::vector<std::vector<std::vector<std::pair<int, bool>>>> ndets;
};

struct CompiledFond {
    const TaggedFond* p;
    AtomUniverse u;
    std::vector<CompiledAction> actions;
    std::vector<std::pair<int, bool>> goal;
};

std::vector<std::pair<int, bool>> compile_lits(const std::vector<Literal>& ls,
                                               const AtomUniverse& u) {
    std::vector<std::pair<int, bool>> out;
    for (const auto& l : ls)
        out.emplace_back(u.find(l.var), l.kind == LitKind::BoolPos);
    return out;
}

CompiledFond compile(const TaggedFond& p) {
    CompiledFond c{&p, universe_of(p), {}, {}};
    for (std::size_t i = 0; i < p.actions.size(); ++i) {
        const auto& a = p.actions[i];
        CompiledAction ca;
        ca.id = static_cast<int>(i);
        ca.pre = compile_lits(a.pre, c.u);
        ca.det = compile_lits(a.det, c.u);
        for (const auto& nd : a.ndets) {
            ca.ndets.emplace_back();
            for (const auto& oc : nd.outcomes)
                ca.ndets.back().push_back(compile_lits(oc, c.u));
        }
        c.actions.push_back(std::move(ca));
    }
    c.goal = compile_lits(p.goal, c.u);
    return c;
}

bool holds(const AbstractState& s, const std::vector<std::pair<int, bool>>& ls) {
    for (const auto& [atom, val] : ls)
        if (s.get(static_cast<std::size_t>(atom)) != val) return false;
    return true;
}

void apply(AbstractState& s, const std::vector<std::pair<int, bool>>& ls) {
    for (const auto& [atom, val] : ls)
        s.set(static_cast<std::size_t>(atom), val);
}

std::vector<AbstractState> outcomes_of(const AbstractState& s,
                                       const CompiledAction& a) {
    AbstractState base = s;
    apply(base, a.det);
    std::vector<AbstractState> out{base};
    for (const auto& nd : a.ndets) {
        std::vector<AbstractState> next;
        for (const auto& st : out)
            for (const auto& oc : nd) {
                AbstractState t = st;
                apply(t, oc);
                next.push_back(std::move(t));
            }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct Expansion {
    std::vector<AbstractState> states;
    std::vector<bool> is_goal;
    // per state: (action id, outcome state ids)
    std::vector<std::vector<std::pair<int, std::vector<int>>>> pairs;
    int init = 0;
};

Expansion expand(const CompiledFond& c, std::size_t budget) {
    Expansion e;
    std::unordered_map<AbstractState, int, AbstractStateHash> index;

    auto intern = [&](const AbstractState& s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        if (e.states.size() >= budget)
            throw BudgetExceeded("state budget exceeded while expanding " +
                                 c.p->name);
        int id = static_cast<int>(e.states.size());
        e.states.push_back(s);
        index.emplace(s, id);
        e.is_goal.push_back(holds(s, c.goal));
        e.pairs.emplace_back();
        return id;
    };

    std::deque<int> queue{intern(initial_abstract_states(*c.p)[0])};
    std::vector<bool> expanded;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (expanded.size() < e.states.size())
            expanded.resize(e.states.size(), false);
        if (expanded[v]) continue;
        expanded[v] = true;
        if (e.is_goal[v]) continue;  // goals are absorbing
        const AbstractState s = e.states[v];
        for (const auto& a : c.actions) {
            if (!holds(s, a.pre)) continue;
            std::vector<int> outs;
            for (const auto& t : outcomes_of(s, a)) {
                bool fresh = index.find(t) == index.end();
                int w = intern(t);
                outs.push_back(w);
                if (fresh) queue.push_back(w);
            }
            e.pairs[v].emplace_back(a.id, std::move(outs));
        }
    }
    return e;
}

// Restrict to the states actually visited when following the policy.
Policy reachable_policy(const Expansion& e,
                        const std::vector<int>& chosen_pair,
                        const CompiledFond& c) {
    Policy pi;
    std::vector<bool> seen(e.states.size(), false);
    std::deque<int> queue{e.init};
    seen[e.init] = true;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (e.is_goal[v] || chosen_pair[v] < 0) continue;
        const auto& pr = e.pairs[v][chosen_pair[v]];
        pi.rules.emplace(e.states[v], c.p->actions[pr.first].name);
        for (int w : pr.second)
            if (!seen[w]) {
                seen[w] = true;
                queue.push_back(w);
            }
    }
    return pi;
}

}  // namespace

std::optional<Policy> solve_strong_cyclic(const TaggedFond& p,
                                          std::size_t budget) {
    CompiledFond c = compile(p);
    Expansion e = expand(c, budget);
    const int n = static_cast<int>(e.states.size());

    std::vector<std::vector<bool>> alive(n);
    std::vector<bool> has_pair(n, false);
    for (int v = 0; v < n; ++v) {
        alive[v].assign(e.pairs[v].size(), true);
        has_pair[v] = !e.pairs[v].empty();
    }

    auto ok_target = [&](int w) { return e.is_goal[w] || has_pair[w]; };

    for (bool outer_changed = true; outer_changed;) {
        outer_changed = false;

        // drop pairs with an outcome that can fall out of the surviving set
        for (bool changed = true; changed;) {
            changed = false;
            for (int v = 0; v < n; ++v) {
                bool any = false;
                for (std::size_t i = 0; i < e.pairs[v].size(); ++i) {
                    if (!alive[v][i]) continue;
                    for (int w : e.pairs[v][i].second)
                        if (!ok_target(w)) {
                            alive[v][i] = false;
                            changed = true;
                            break;
                        }
                    any = any || alive[v][i];
                }
                if (has_pair[v] && !any) {
                    has_pair[v] = false;
                    changed = true;
                }
            }
        }

        // drop states that lost best-case goal connectivity
        std::vector<bool> reaches(n, false);
        for (bool changed = true; changed;) {
            changed = false;
            for (int v = 0; v < n; ++v) {
                if (reaches[v]) continue;
                if (e.is_goal[v]) {
                    reaches[v] = true;
                    changed = true;
                    continue;
                }
                for (std::size_t i = 0; i < e.pairs[v].size() && !reaches[v];
                     ++i) {
                    if (!alive[v][i]) continue;
                    for (int w : e.pairs[v][i].second)
                        if (reaches[w]) {
                            reaches[v] = true;
                            changed = true;
                            break;
                        }
                }
            }
        }
        for (int v = 0; v < n; ++v) {
            if (reaches[v] || !has_pair[v]) continue;
            std::fill(alive[v].begin(), alive[v].end(), false);
            has_pair[v] = false;
            outer_changed = true;
        }
    }

    if (!e.is_goal[e.init] && !has_pair[e.init]) return std::nullopt;

    // best-case goal distance over alive pairs
    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> dist(n, kInf);
    std::deque<int> queue;
    for (int v = 0; v < n; ++v)
        if (e.is_goal[v]) {
            dist[v] = 0;
            queue.push_back(v);
        }
    // reverse adjacency: target -> states with an alive pair hitting it
    std::vector<std::vector<int>> rev(n);
    for (int v = 0; v < n; ++v)
        for (std::size_t i = 0; i < e.pairs[v].size(); ++i) {
            if (!alive[v][i]) continue;
            for (int w : e.pairs[v][i].second) rev[w].push_back(v);
        }
    while (!queue.empty()) {
        int w = queue.front();
        queue.pop_front();
        for (int v : rev[w])
            if (dist[v] == kInf) {
                dist[v] = dist[w] + 1;
                queue.push_back(v);
            }
    }

    std::vector<int> chosen(n, -1);
    for (int v = 0; v < n; ++v) {
        if (e.is_goal[v] || !has_pair[v] || dist[v] == kInf) continue;
        int best_pair = -1;
        for (std::size_t i = 0; i < e.pairs[v].size(); ++i) {
            if (!alive[v][i]) continue;
            int best = kInf;
            for (int w : e.pairs[v][i].second)
                if (dist[w] != kInf) best = std::min(best, dist[w]);
            if (best != kInf && best + 1 == dist[v]) {
                best_pair = static_cast<int>(i);
                break;  // pairs are in declaration order
            }
        }
        chosen[v] = best_pair;
    }

    return reachable_policy(e, chosen, c);
}

std::optional<Policy> solve_strong(const TaggedFond& p, std::size_t budget) {
    CompiledFond c = compile(p);
    Expansion e = expand(c, budget);
    const int n = static_cast<int>(e.states.size());

    std::vector<bool> won(n, false);
    std::vector<int> chosen(n, -1);
    for (int v = 0; v < n; ++v) won[v] = e.is_goal[v];

    for (bool changed = true; changed;) {
        changed = false;
        for (int v = 0; v < n; ++v) {
            if (won[v]) continue;
            for (std::size_t i = 0; i < e.pairs[v].size(); ++i) {
                bool all = !e.pairs[v][i].second.empty();
                for (int w : e.pairs[v][i].second) all = all && won[w];
                if (all) {
                    won[v] = true;
                    chosen[v] = static_cast<int>(i);
                    changed = true;
                    break;
                }
            }
        }
    }

    if (!won[e.init]) return std::nullopt;
    return reachable_policy(e, chosen, c);
}

VerifyResult verify_strong_cyclic(const TaggedFond& p, const Policy& pi) {
    VerifyResult r;
    r.graph = build_policy_graph(p, pi);
    const int n = static_cast<int>(r.graph.nodes.size());

    for (int v = 0; v < n; ++v)
        if (r.graph.open[v]) {
            r.reason = "open-state";
            return r;
        }

    // every node must reach a goal inside the policy graph
    std::vector<bool> reaches(n, false);
    for (bool changed = true; changed;) {
        changed = false;
        for (int v = 0; v < n; ++v) {
            if (reaches[v]) continue;
            bool now = r.graph.is_goal[v];
            for (int w : r.graph.succ[v]) now = now || reaches[w];
            if (now) {
                reaches[v] = true;
                changed = true;
            }
        }
    }
    for (int v = 0; v < n; ++v)
        if (!reaches[v]) {
            r.reason = "goal-unreachable";
            return r;
        }
    r.ok = true;
    return r;
}

QnpVerifyResult verify_qnp_policy(const Qnp& q, const Policy& pi) {
    QnpVerifyResult r;
    TaggedFond p = t_direct(q);
    VerifyResult sc = verify_strong_cyclic(p, pi);
    r.graph = std::move(sc.graph);
    if (!sc.ok) {
        r.reason = sc.reason;
        return r;
    }
    r.sieve = run_sieve(r.graph, SieveMode::Exhaustive);
    if (!r.sieve.terminating) {
        r.reason = "non-terminating";
        return r;
    }
    r.ok = true;
    return r;
}

namespace {

struct OracleSearch {
    const Qnp* q;
    const TaggedFond* p;
    CompiledFond c;
    Policy assignment;

    std::optional<Policy> run() {
        return step() ? std::optional<Policy>(assignment) : std::nullopt;
    }

    // reachable closure under the current partial assignment; returns the
    // canonically smallest reachable unassigned non-goal state, a flag for
    // dead ends, or neither when the assignment is closed
    bool step() {
        std::vector<AbstractState> frontier;
        std::set<AbstractState> seen;
        std::deque<AbstractState> queue{initial_abstract_states(*p)[0]};
        seen.insert(queue.front());
        while (!queue.empty()) {
            AbstractState s = queue.front();
            queue.pop_front();
            if (holds(s, c.goal)) continue;
            auto it = assignment.rules.find(s);
            if (it == assignment.rules.end()) {
                frontier.push_back(s);
                continue;
            }
            const CompiledAction& a = c.actions[action_id(it->second)];
            for (const auto& t : outcomes_of(s, a))
                if (seen.insert(t).second) queue.push_back(t);
        }
        if (frontier.empty())
            return verify_qnp_policy(*q, assignment).ok;

        AbstractState pick = *std::min_element(frontier.begin(), frontier.end());
        for (const auto& a : c.actions) {
            if (!holds(pick, a.pre)) continue;
            assignment.rules.emplace(pick, p->actions[a.id].name);
            if (step()) return true;
            assignment.rules.erase(pick);
        }
        return false;  // no applicable action closes this state
    }

    int action_id(const std::string& name) const {
        for (std::size_t i = 0; i < p->actions.size(); ++i)
            if (p->actions[i].name == name) return static_cast<int>(i);
        throw std::logic_error("unknown action in oracle assignment");
    }
};

}  // namespace

std::optional<Policy> oracle_solve_qnp(const Qnp& q, std::size_t var_cap) {
    if (q.bools.size() + q.nums.size() > var_cap)
        throw std::invalid_argument(
            "oracle_solve_qnp: variable count exceeds cap");
    TaggedFond p = t_direct(q);
    OracleSearch search{&q, &p, compile(p), {}};
    return search.run();
}

}  // namespace qnpk
