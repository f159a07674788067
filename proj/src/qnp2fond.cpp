#include "qnpk/qnp2fond.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include "qnpk/direct.hpp"
#include "qnpk/solver.hpp"

namespace qnpk {

std::string TranslationLayout::in_atom(const std::string& x) const {
    return "in(" + x + ")";
}
std::string TranslationLayout::depth_atom(int d) const {
    return "depth(" + std::to_string(d) + ")";
}
std::string TranslationLayout::index_atom(const std::string& x, int d) const {
    return "index(" + x + "." + std::to_string(d) + ")";
}
std::string TranslationLayout::cbit_atom(int d, int i) const {
    return "c(" + std::to_string(d) + ")." + std::to_string(i);
}
std::string TranslationLayout::tbit_atom(int i) const {
    return "ct." + std::to_string(i);
}

VariableLayout analyze_variables(const Qnp& q, const TranslateOptions& opts) {
    VariableLayout layout;
    if (opts.force_full) {
        layout.stacked_vars = q.nums;
        return layout;
    }

    std::set<std::string> direct;
    for (const auto& x : q.nums) {
        bool incremented = false;
        for (const auto& a : q.actions)
            for (const auto& e : a.num)
                if (e.kind == NumEffKind::Inc && e.var == x)
                    incremented = true;
        if (!incremented) direct.insert(x);
    }

    if (opts.well_ordered) {
        // X may also be direct when every action incrementing X decrements
        // a variable that is already direct: the nested decrements bound
        // the increments, so no loop through X can run forever
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& x : q.nums) {
                if (direct.count(x)) continue;
                bool ok = true;
                for (const auto& a : q.actions) {
                    bool incs_x = false, pays = false;
                    for (const auto& e : a.num) {
                        if (e.kind == NumEffKind::Inc && e.var == x)
                            incs_x = true;
                        if (e.kind == NumEffKind::Dec && direct.count(e.var))
                            pays = true;
                    }
                    if (incs_x && !pays) ok = false;
                }
                if (ok) {
                    direct.insert(x);
                    changed = true;
                }
            }
        }
    }

    for (const auto& x : q.nums)
        (direct.count(x) ? layout.direct_vars : layout.stacked_vars)
            .push_back(x);
    return layout;
}

namespace {

Literal flagged(const Literal& l) {
    switch (l.kind) {
        case LitKind::BoolPos:
        case LitKind::BoolNeg: return l;
        case LitKind::NumZero: return {LitKind::BoolPos, zero_flag(l.var)};
        case LitKind::NumPos: return {LitKind::BoolNeg, zero_flag(l.var)};
    }
    throw std::logic_error("bad literal kind");
}

Literal pos(const std::string& atom) { return {LitKind::BoolPos, atom}; }
Literal neg(const std::string& atom) { return {LitKind::BoolNeg, atom}; }

int ceil_log2(long long v) {
    int bits = 0;
    while ((1LL << bits) < v) ++bits;
    return bits;
}

}  // namespace

FullTranslation t_full(const Qnp& q, const TranslateOptions& opts) {
    FullTranslation t;
    t.layout.vars = analyze_variables(q, opts);

    if (t.layout.vars.stacked_vars.empty()) {
        t.fond = t_direct(q);
        for (const auto& a : t.fond.actions)
            t.layout.provenance.emplace(
                a.name, ActionProvenance{RoleKind::Source, a.name, "", 0, -1});
        return t;
    }

    const auto& stacked = t.layout.vars.stacked_vars;
    const int D = static_cast<int>(stacked.size());
    const int n = static_cast<int>(q.bools.size() + q.nums.size());
    t.layout.depth_bound = D;
    long long max_value = opts.max_override
                              ? (1LL << ceil_log2(std::max(1LL, *opts.max_override)))
                              : (n >= 62 ? (1LL << 62) : (1LL << n));
    t.layout.max_value = max_value;
    const int W = ceil_log2(max_value) + 1;
    t.layout.bit_width = W;
    const auto& L = t.layout;

    TaggedFond& p = t.fond;
    p.name = q.name;
    p.atoms = q.bools;
    for (const auto& x : q.nums) p.atoms.push_back(zero_flag(x));
    for (const auto& x : stacked) p.atoms.push_back(L.in_atom(x));
    for (int d = 0; d <= D; ++d) p.atoms.push_back(L.depth_atom(d));
    for (const auto& x : stacked)
        for (int d = 1; d <= D; ++d) p.atoms.push_back(L.index_atom(x, d));
    for (int d = 0; d <= D; ++d)
        for (int i = 0; i < W; ++i) p.atoms.push_back(L.cbit_atom(d, i));
    for (int i = 0; i < W; ++i) p.atoms.push_back(L.tbit_atom(i));

    AtomUniverse u = AtomUniverse::from(p.atoms);
    auto is_stacked = [&](const std::string& x) {
        return std::find(stacked.begin(), stacked.end(), x) != stacked.end();
    };

    // counter increment, split by the position of the lowest clear bit;
    // the top bit acts as the "no more increments" guard
    auto increment_pre = [&](auto bit_atom, int i) {
        std::vector<Literal> out;
        for (int j = 0; j < i; ++j) out.push_back(pos(bit_atom(j)));
        out.push_back(neg(bit_atom(i)));
        if (i != W - 1) out.push_back(neg(bit_atom(W - 1)));
        return out;
    };
    auto increment_eff = [&](auto bit_atom, int i) {
        std::vector<Literal> out{pos(bit_atom(i))};
        for (int j = 0; j < i; ++j) out.push_back(neg(bit_atom(j)));
        return out;
    };

    auto add_action = [&](FondAction fa, ActionProvenance prov) {
        canonicalize(fa.pre, u);
        canonicalize(fa.det, u);
        t.layout.provenance.emplace(fa.name, std::move(prov));
        p.actions.push_back(std::move(fa));
    };

    for (const auto& a : q.actions) {
        std::vector<std::string> stacked_decs, all_decs, incs;
        for (const auto& e : a.num) {
            if (e.kind == NumEffKind::Dec) {
                all_decs.push_back(e.var);
                if (is_stacked(e.var)) stacked_decs.push_back(e.var);
            } else {
                incs.push_back(e.var);
            }
        }
        bool decs_direct = all_decs.size() > stacked_decs.size();

        auto base_action = [&](const std::string& name) {
            FondAction fa;
            fa.name = name;
            for (const auto& l : a.pre) fa.pre.push_back(flagged(l));
            for (const auto& l : a.eff) fa.det.push_back(flagged(l));
            for (const auto& y : incs) {
                fa.det.push_back(neg(zero_flag(y)));
                if (is_stacked(y)) fa.pre.push_back(neg(L.in_atom(y)));
            }
            for (const auto& z : all_decs) {
                FondEffect eff;
                eff.outcomes.push_back({neg(zero_flag(z))});
                eff.outcomes.push_back({pos(zero_flag(z))});
                fa.ndets.push_back(std::move(eff));
            }
            fa.tag.entries = a.num;
            std::sort(fa.tag.entries.begin(), fa.tag.entries.end());
            return fa;
        };

        auto reset_counters = [&](FondAction& fa, int from) {
            for (int d = from; d <= D; ++d)
                for (int i = 0; i < W; ++i)
                    fa.det.push_back(neg(L.cbit_atom(d, i)));
        };

        if (stacked_decs.empty()) {
            FondAction fa = base_action(a.name);
            // decrements of direct variables bound every loop through this
            // action, so the level counters may restart
            if (decs_direct) reset_counters(fa, 0);
            add_action(std::move(fa),
                       {RoleKind::Source, a.name, "", 0, -1});
        } else {
            for (const auto& x : stacked) {
                if (std::find(stacked_decs.begin(), stacked_decs.end(), x) ==
                    stacked_decs.end())
                    continue;
                for (int d = 1; d <= D; ++d) {
                    FondAction fa = base_action(
                        a.name + "(" + x + "." + std::to_string(d) + ")");
                    fa.pre.push_back(pos(L.index_atom(x, d)));
                    reset_counters(fa, decs_direct ? 0 : d);
                    add_action(std::move(fa),
                               {RoleKind::SourceStacked, a.name, x, d, -1});
                }
            }
        }
    }

    for (const auto& x : stacked)
        for (int d = 0; d < D; ++d)
            for (int i = 0; i < W; ++i) {
                FondAction fa;
                fa.name = "Push(" + x + "." + std::to_string(d) + "." +
                          std::to_string(i) + ")";
                fa.pre = increment_pre(
                    [&](int j) { return L.cbit_atom(d, j); }, i);
                fa.pre.push_back(neg(L.in_atom(x)));
                fa.pre.push_back(pos(L.depth_atom(d)));
                fa.det = increment_eff(
                    [&](int j) { return L.cbit_atom(d, j); }, i);
                fa.det.push_back(pos(L.in_atom(x)));
                fa.det.push_back(pos(L.index_atom(x, d + 1)));
                fa.det.push_back(pos(L.depth_atom(d + 1)));
                fa.det.push_back(neg(L.depth_atom(d)));
                for (int j = 0; j < W; ++j)
                    fa.det.push_back(neg(L.cbit_atom(d + 1, j)));
                add_action(std::move(fa), {RoleKind::Push, "", x, d, i});
            }

    for (const auto& x : stacked)
        for (int d = 1; d <= D; ++d) {
            FondAction fa;
            fa.name = "Pop(" + x + "." + std::to_string(d) + ")";
            fa.pre = {pos(L.in_atom(x)), pos(L.index_atom(x, d)),
                      pos(L.depth_atom(d))};
            fa.det = {neg(L.in_atom(x)), neg(L.index_atom(x, d)),
                      neg(L.depth_atom(d)), pos(L.depth_atom(d - 1))};
            add_action(std::move(fa), {RoleKind::Pop, "", x, d, -1});
        }

    for (int i = 0; i < W; ++i) {
        FondAction fa;
        fa.name = "Move(" + std::to_string(i) + ")";
        fa.pre = increment_pre([&](int j) { return L.tbit_atom(j); }, i);
        fa.pre.push_back(pos(L.depth_atom(0)));
        fa.det = increment_eff([&](int j) { return L.tbit_atom(j); }, i);
        add_action(std::move(fa), {RoleKind::Move, "", "", 0, i});
    }

    AbstractState s0 = initial_abstract_states(q)[0];
    for (std::size_t i = 0; i < s0.size(); ++i)
        if (s0.get(i)) p.init.push_back(p.atoms[i]);
    p.init.push_back(L.depth_atom(0));

    for (const auto& l : q.goal) p.goal.push_back(flagged(l));
    canonicalize(p.goal, u);
    return t;
}

namespace {

// runtime view of the stack/counter memory encoded in a full-translation
// state
struct MemoryDecoder {
    const TranslationLayout* layout;
    AtomUniverse u;
    std::size_t source_atoms;  // |F| + |V| leading atoms

    int find(const std::string& atom) const {
        int i = u.find(atom);
        if (i < 0) throw std::logic_error("missing layout atom: " + atom);
        return i;
    }

    AbstractState project(const AbstractState& s) const {
        AbstractState out(source_atoms);
        for (std::size_t i = 0; i < source_atoms; ++i) out.set(i, s.get(i));
        return out;
    }

    int depth(const AbstractState& s) const {
        for (int d = 0; d <= layout->depth_bound; ++d)
            if (s.get(static_cast<std::size_t>(find(layout->depth_atom(d)))))
                return d;
        throw std::logic_error("state without depth atom");
    }

    std::vector<std::string> stack(const AbstractState& s) const {
        std::vector<std::string> out;
        for (int d = 1; d <= depth(s); ++d) {
            bool found = false;
            for (const auto& x : layout->vars.stacked_vars)
                if (s.get(static_cast<std::size_t>(
                        find(layout->index_atom(x, d))))) {
                    out.push_back(x);
                    found = true;
                    break;
                }
            if (!found) throw std::logic_error("stack level without index");
        }
        return out;
    }

    long long counter(const AbstractState& s, bool transfer, int d) const {
        long long v = 0;
        for (int i = 0; i < layout->bit_width; ++i) {
            const std::string atom =
                transfer ? layout->tbit_atom(i) : layout->cbit_atom(d, i);
            if (s.get(static_cast<std::size_t>(find(atom)))) v |= 1LL << i;
        }
        return v;
    }

    // position of the lowest clear bit, i.e. the applicable increment split
    int low_clear(long long v) const {
        for (int i = 0; i < layout->bit_width; ++i)
            if (!(v & (1LL << i))) return i;
        return -1;
    }
};

}  // namespace

LiftResult lift_policy_star(const Qnp& q, const FullTranslation& t,
                            const Policy& pi_direct) {
    LiftResult r;
    QnpVerifyResult check = verify_qnp_policy(q, pi_direct);
    if (!check.ok) {
        r.reason = "source policy rejected: " + check.reason;
        return r;
    }

    if (t.layout.degenerate()) {
        r.ok = true;
        r.policy = pi_direct;
        return r;
    }

    StackAnnotation ann = compute_annotations(check.graph, check.sieve);
    const TaggedFond& p = t.fond;
    MemoryDecoder mem{&t.layout, universe_of(p),
                      q.bools.size() + q.nums.size()};
    AtomUniverse u = mem.u;

    auto is_stacked = [&](const std::string& x) {
        const auto& sv = t.layout.vars.stacked_vars;
        return std::find(sv.begin(), sv.end(), x) != sv.end();
    };

    std::deque<AbstractState> queue{initial_abstract_states(p)[0]};
    std::set<AbstractState> seen{queue.front()};
    while (!queue.empty()) {
        AbstractState s = queue.front();
        queue.pop_front();
        if (satisfies(s, u, p.goal)) continue;

        AbstractState proj = mem.project(s);
        auto node_it = check.graph.index.find(proj);
        if (node_it == check.graph.index.end()) {
            r.reason = "reached a source state outside the policy graph";
            return r;
        }
        int node = node_it->second;

        std::vector<std::string> alpha = mem.stack(s);
        std::vector<std::string> target;
        for (const auto& x : ann.stack[node])
            if (is_stacked(x)) target.push_back(x);

        long long ct = mem.counter(s, true, 0);
        int depth = static_cast<int>(alpha.size());

        std::string action;
        bool prefix = alpha.size() <= target.size() &&
                      std::equal(alpha.begin(), alpha.end(), target.begin());
        if (ct < ann.scc_index[node]) {
            if (depth > 0) {
                action = "Pop(" + alpha.back() + "." + std::to_string(depth) +
                         ")";
            } else {
                if (ct >= t.layout.max_value) {
                    r.reason = "transfer counter exhausted";
                    return r;
                }
                action = "Move(" + std::to_string(mem.low_clear(ct)) + ")";
            }
        } else if (!prefix) {
            action = "Pop(" + alpha.back() + "." + std::to_string(depth) + ")";
        } else if (alpha.size() < target.size()) {
            long long level_count = mem.counter(s, false, depth);
            if (level_count >= t.layout.max_value) {
                r.reason = "push counter exhausted";
                return r;
            }
            action = "Push(" + target[alpha.size()] + "." +
                     std::to_string(depth) + "." +
                     std::to_string(mem.low_clear(level_count)) + ")";
        } else {
            const std::string& src = check.graph.action[node];
            const QnpAction* a = q.find_action(src);
            std::string var;
            int level = 0;
            for (const auto& e : a->num) {
                if (e.kind != NumEffKind::Dec || !is_stacked(e.var)) continue;
                auto it = std::find(alpha.begin(), alpha.end(), e.var);
                if (it == alpha.end()) {
                    r.reason = "decremented variable " + e.var +
                               " missing from the stack";
                    return r;
                }
                int lvl = static_cast<int>(it - alpha.begin()) + 1;
                if (var.empty() || lvl < level) {
                    var = e.var;
                    level = lvl;
                }
            }
            action = var.empty()
                         ? src
                         : src + "(" + var + "." + std::to_string(level) + ")";
        }

        const FondAction* fa = p.find_action(action);
        if (!fa || !satisfies(s, u, fa->pre)) {
            r.reason = "lifted action inapplicable: " + action;
            return r;
        }
        r.policy.rules.emplace(s, action);
        for (const auto& succ : qnp_boolean_successors(p, s, *fa))
            if (seen.insert(succ).second) queue.push_back(succ);
    }

    r.ok = true;
    return r;
}

ProjectionResult project_full_policy(const Qnp& q, const FullTranslation& t,
                                     const Policy& pi_full) {
    ProjectionResult r;
    r.controller = pi_full;
    std::size_t source_atoms = q.bools.size() + q.nums.size();

    std::map<AbstractState, std::set<std::string>> sources;
    for (const auto& [state, action] : pi_full.rules) {
        auto it = t.layout.provenance.find(action);
        if (it == t.layout.provenance.end())
            throw std::invalid_argument("policy action without provenance: " +
                                        action);
        AbstractState proj(source_atoms);
        for (std::size_t i = 0; i < source_atoms; ++i)
            proj.set(i, state.get(i));
        const auto& prov = it->second;
        if (prov.role == RoleKind::Source ||
            prov.role == RoleKind::SourceStacked)
            sources[proj].insert(prov.source);
    }

    AtomUniverse qu = universe_of(q);
    r.memoryless_ok = true;
    for (const auto& [proj, acts] : sources) {
        if (acts.size() > 1) {
            r.memoryless_ok = false;
            std::string atoms;
            for (std::size_t i = 0; i < qu.size(); ++i)
                if (proj.get(i)) atoms += (atoms.empty() ? "" : ",") +
                                          qu.atoms[i];
            std::string msg = "state {" + atoms + "} maps to";
            for (const auto& a : acts) msg += " " + a;
            r.conflicts.push_back(msg);
        } else {
            r.memoryless.rules.emplace(proj, *acts.begin());
        }
    }
    if (!r.memoryless_ok) r.memoryless.rules.clear();
    return r;
}

}  // namespace qnpk
