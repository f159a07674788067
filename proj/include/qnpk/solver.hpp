#pragma once

// FOND solvers and policy verifiers.
//
// solve_strong_cyclic does an explicit forward expansion of the reachable
// state space followed by the usual iterated pruning: state-action pairs
// whose outcomes can leave the surviving set are dropped, then states that
// lost their goal connectivity, until a fixpoint. solve_strong is the
// backward fixpoint for solutions that may not revisit states. Both are
// deterministic: among the surviving actions of a state the one with the
// smallest best-case goal distance wins, ties broken by declaration order.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "qnpk/model.hpp"
#include "qnpk/sieve.hpp"

namespace qnpk {

inline constexpr std::size_t kDefaultNodeBudget = 1'000'000;

// Effective node budget: QNPK_NODE_BUDGET from the environment, otherwise
// the supplied fallback.
std::size_t node_budget(std::size_t fallback = kDefaultNodeBudget);

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what)
        : std::runtime_error(what) {}
};

// Returns a policy over the policy-reachable non-goal states, or nullopt
// if the problem has no strong-cyclic solution. Throws BudgetExceeded when
// the reachable state space outgrows the budget.
std::optional<Policy> solve_strong_cyclic(
    const TaggedFond& p, std::size_t budget = node_budget());

std::optional<Policy> solve_strong(const TaggedFond& p,
                                   std::size_t budget = node_budget());

struct VerifyResult {
    bool ok = false;
    std::string reason;  // "open-state", "goal-unreachable", "" when ok
    PolicyGraph graph;   // always populated
};

// Independent of the solvers: closure plus goal connectivity on the
// policy graph.
VerifyResult verify_strong_cyclic(const TaggedFond& p, const Policy& pi);

struct QnpVerifyResult {
    bool ok = false;
    std::string reason;  // "open-state", "goal-unreachable", "non-terminating"
    PolicyGraph graph;   // over t_direct(q)
    SieveTrace sieve;    // exhaustive trace when strong cyclic held
};

// pi solves the QNP iff it is strong cyclic for the direct translation and
// Sieve finds the policy graph terminating.
QnpVerifyResult verify_qnp_policy(const Qnp& q, const Policy& pi);

// Brute-force reference: depth-first enumeration over partial assignments
// of applicable actions to reachable abstract states of t_direct(q),
// returning the first closed assignment accepted by verify_qnp_policy.
// Guarded by a variable-count cap since the search is exponential.
std::optional<Policy> oracle_solve_qnp(const Qnp& q, std::size_t var_cap = 6);

}  // namespace qnpk
