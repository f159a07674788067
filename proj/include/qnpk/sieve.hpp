#pragma once

// Termination analysis for policies over tagged FOND problems.
//
// A policy that is strong cyclic may still loop forever on the underlying
// numeric problem. Sieve decides this from the policy graph alone: it
// repeatedly picks a strongly connected component C and a variable X that
// is decremented by some policy action in C but incremented by none, and
// removes the edges inside C that originate from dec(X) actions. The
// policy terminates iff the graph eventually becomes acyclic; the verdict
// does not depend on the choice order.

#include <optional>

#include "qnpk/model.hpp"

namespace qnpk {

struct PolicyGraph {
    // node 0 is the initial state; nodes are policy-reachable states
    std::vector<AbstractState> nodes;
    std::map<AbstractState, int> index;
    std::vector<std::string> action;  // assigned action name, "" if none
    std::vector<std::vector<int>> succ;
    std::vector<bool> is_goal;
    // true for non-goal nodes with no applicable assigned action; such
    // nodes make the policy unusable and Sieve refuses to run
    std::vector<bool> open;
    std::vector<std::vector<std::string>> decs, incs;  // per node, from tags
};

PolicyGraph build_policy_graph(const TaggedFond& p, const Policy& pi);

enum class SieveMode {
    StopWhenAcyclic,
    // keep choosing (component, variable) pairs after the graph is acyclic
    // so that every node's stack records all variables chosen for the
    // nested components containing it
    Exhaustive,
};

struct SieveStep {
    std::vector<int> component;            // member nodes, ascending
    std::string var;                       // chosen variable X
    std::vector<std::pair<int, int>> removed_edges;
};

struct SieveTrace {
    std::vector<SieveStep> steps;
    bool terminating = false;
    // edges surviving all removals, per node
    std::vector<std::vector<int>> residual_succ;
};

// Optional seed permutes the (component, variable) choice order; used by
// tests to confirm the verdict is order independent.
SieveTrace run_sieve(const PolicyGraph& g, SieveMode mode,
                     std::optional<std::uint64_t> tiebreak_seed = {});

struct StackAnnotation {
    // topological index (from 0) of the node's top-level SCC
    std::vector<int> scc_index;
    // variables chosen by exhaustive Sieve for the nested components
    // containing the node, outermost first, no repetitions
    std::vector<std::vector<std::string>> stack;
};

// Requires a terminating exhaustive trace for g.
StackAnnotation compute_annotations(const PolicyGraph& g,
                                    const SieveTrace& exhaustive);

// Strongly connected components of the subgraph given by succ, in reverse
// topological order (Tarjan). Exposed for reuse by the solver and tests.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& succ);

}  // namespace qnpk
