#include "qnpk/sieve.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "qnpk/direct.hpp"

namespace qnpk {

std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& succ) {
    const int n = static_cast<int>(succ.size());
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> comps;
    int counter = 0;

    // iterative Tarjan; frame.second is the position in succ[v]
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<std::pair<int, std::size_t>> frames{{root, 0}};
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos == 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (pos < succ[v].size()) {
                int w = succ[v][pos++];
                if (index[w] == -1) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
            int finished = v;
            frames.pop_back();
            if (!frames.empty())
                low[frames.back().first] =
                    std::min(low[frames.back().first], low[finished]);
        }
    }
    return comps;  // reverse topological order
}

PolicyGraph build_policy_graph(const TaggedFond& p, const Policy& pi) {
    AtomUniverse u = universe_of(p);
    PolicyGraph g;

    auto add_node = [&](const AbstractState& s) {
        auto it = g.index.find(s);
        if (it != g.index.end()) return it->second;
        int id = static_cast<int>(g.nodes.size());
        g.nodes.push_back(s);
        g.index.emplace(s, id);
        g.action.emplace_back();
        g.succ.emplace_back();
        g.is_goal.push_back(false);
        g.open.push_back(false);
        g.decs.emplace_back();
        g.incs.emplace_back();
        return id;
    };

    std::vector<int> frontier{add_node(initial_abstract_states(p)[0])};
    while (!frontier.empty()) {
        int v = frontier.back();
        frontier.pop_back();
        const AbstractState s = g.nodes[v];
        if (satisfies(s, u, p.goal)) {
            g.is_goal[v] = true;
            continue;  // maximal trajectories end at goal states
        }
        const std::string* act = pi.lookup(s);
        const FondAction* a = act ? p.find_action(*act) : nullptr;
        if (!a || !satisfies(s, u, a->pre)) {
            g.open[v] = true;
            continue;
        }
        g.action[v] = a->name;
        g.decs[v] = a->tag.dec_vars();
        g.incs[v] = a->tag.inc_vars();
        for (const auto& t : qnp_boolean_successors(p, s, *a)) {
            bool fresh = g.index.find(t) == g.index.end();
            int w = add_node(t);
            g.succ[v].push_back(w);
            if (fresh) frontier.push_back(w);
        }
    }
    return g;
}

namespace {

// deterministic 64-bit mix for seeded tie-break shuffles
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

SieveTrace run_sieve(const PolicyGraph& g, SieveMode mode,
                     std::optional<std::uint64_t> tiebreak_seed) {
    const int n = static_cast<int>(g.nodes.size());
    std::vector<std::vector<int>> succ = g.succ;
    std::vector<std::vector<std::string>> stack(n);

    // variable order: position of the zero-flag in the node universe
    std::set<std::string> var_set;
    for (int v = 0; v < n; ++v)
        for (const auto& lists : {g.decs[v], g.incs[v]})
            for (const auto& x : lists) var_set.insert(x);
    std::vector<std::string> var_order(var_set.begin(), var_set.end());
    // nodes all share one universe size; recover declaration order from the
    // flag atoms when states came from a QNP-shaped universe is not
    // possible here, so use stable name order

    SieveTrace trace;
    std::uint64_t rng = tiebreak_seed.value_or(0);

    for (;;) {
        auto comps = strongly_connected_components(succ);
        // topological order: Tarjan emits reverse topological
        std::reverse(comps.begin(), comps.end());

        auto has_internal_edge = [&](const std::vector<int>& comp) {
            std::set<int> members(comp.begin(), comp.end());
            for (int v : comp)
                for (int w : succ[v])
                    if (members.count(w)) return true;
            return false;
        };

        bool acyclic = true;
        for (const auto& c : comps)
            if (has_internal_edge(c)) acyclic = false;

        if (mode == SieveMode::StopWhenAcyclic && acyclic) {
            trace.terminating = true;
            break;
        }

        // collect eligible (component, variable) pairs
        struct Choice {
            const std::vector<int>* comp;
            std::string var;
        };
        std::vector<Choice> eligible;
        for (const auto& comp : comps) {
            if (mode == SieveMode::StopWhenAcyclic && !has_internal_edge(comp))
                continue;
            std::set<std::string> dec_here, inc_here;
            for (int v : comp) {
                dec_here.insert(g.decs[v].begin(), g.decs[v].end());
                inc_here.insert(g.incs[v].begin(), g.incs[v].end());
            }
            const auto& done = stack[comp[0]];
            for (const auto& x : var_order) {
                if (!dec_here.count(x) || inc_here.count(x)) continue;
                if (std::find(done.begin(), done.end(), x) != done.end())
                    continue;
                eligible.push_back({&comp, x});
            }
        }
        if (eligible.empty()) {
            trace.terminating = acyclic;
            break;
        }

        // default choice: the component closest to the initial state (by
        // smallest node id), then variable name order; this mirrors how a
        // trajectory first meets the loops. A seed randomizes the choice,
        // which must not change the verdict.
        std::size_t pick = 0;
        if (tiebreak_seed) {
            rng = mix64(rng);
            pick = static_cast<std::size_t>(rng % eligible.size());
        } else {
            for (std::size_t i = 1; i < eligible.size(); ++i) {
                const auto& a = eligible[i];
                const auto& b = eligible[pick];
                if (std::pair((*a.comp)[0], a.var) <
                    std::pair((*b.comp)[0], b.var))
                    pick = i;
            }
        }
        const auto& choice = eligible[pick];

        SieveStep step;
        step.component = *choice.comp;
        step.var = choice.var;
        std::set<int> members(choice.comp->begin(), choice.comp->end());
        for (int v : *choice.comp) {
            stack[v].push_back(choice.var);
            bool dec_x = std::find(g.decs[v].begin(), g.decs[v].end(),
                                   choice.var) != g.decs[v].end();
            if (!dec_x) continue;
            auto& edges = succ[v];
            for (auto it = edges.begin(); it != edges.end();) {
                if (members.count(*it)) {
                    step.removed_edges.emplace_back(v, *it);
                    it = edges.erase(it);
                } else {
                    ++it;
                }
            }
        }
        trace.steps.push_back(std::move(step));
    }

    trace.residual_succ = std::move(succ);
    return trace;
}

StackAnnotation compute_annotations(const PolicyGraph& g,
                                    const SieveTrace& exhaustive) {
    if (!exhaustive.terminating)
        throw std::invalid_argument(
            "annotations need a terminating exhaustive trace");
    const int n = static_cast<int>(g.nodes.size());
    StackAnnotation ann;
    ann.scc_index.assign(n, 0);
    ann.stack.assign(n, {});

    auto comps = strongly_connected_components(g.succ);
    std::reverse(comps.begin(), comps.end());  // topological order
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (int v : comps[i]) ann.scc_index[v] = static_cast<int>(i);

    for (const auto& step : exhaustive.steps)
        for (int v : step.component) ann.stack[v].push_back(step.var);
    return ann;
}

}  // namespace qnpk
