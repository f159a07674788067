#pragma once

// FOND -> QNP reduction. Each non-deterministic action is replaced by a
// loop gadget: the action arms the gadget and increments a fresh variable
// X, which is then decremented while cycling through the action's outcome
// slots; fairness variables Y_{a,i} track how often each outcome has been
// owed. Strong-cyclic solvability of the FOND problem coincides with
// solvability of the reduction. Dropping the Y machinery altogether
// (reduce_r_strong) captures strong solutions instead, and dropping a
// single Y_{a,i} treats that one outcome as unfair.

#include <optional>

#include "qnpk/model.hpp"

namespace qnpk {

// Splits actions with several oneof clauses into chains with one clause
// each, using fresh __seq/__next bookkeeping atoms. Actions with at most
// one clause only pick up the chain-exclusion preconditions.
TaggedFond normalize_fond(const TaggedFond& p);

enum class ExitGMode {
    // only the exact gadget actions: the goal shortcut for outcome i is
    // available only in outcome slot i
    Faithful,
    // additionally allow the goal shortcut from any slot once some
    // fairness variable hit zero, which avoids gadget deadlocks
    Repaired,
};

struct ReduceOptions {
    ExitGMode exitg = ExitGMode::Repaired;
    // (action, outcome index, 1-based): drop the fairness variable of this
    // outcome, treating it as unfair
    std::vector<std::pair<std::string, int>> unfair;
};

struct Reduction {
    Qnp qnp;
    std::vector<std::string> nondet_actions;  // trigger action names
    std::map<std::string, int> arity;         // outcome count per trigger
    int K = 0;                                // max arity
    bool strong = false;
};

// Input must be normalized (at most one oneof per action) and must not use
// names starting with "__", which the reduction reserves.
Reduction reduce_r(const TaggedFond& p, const ReduceOptions& opts = {});
Reduction reduce_r_strong(const TaggedFond& p);

struct TransferResult {
    bool ok = false;
    std::string reason;
    Policy policy;
};

// Lifts a policy for the FOND problem to a policy over the abstract states
// of t_direct(r.qnp): normal states follow the source policy, gadget
// states take the forced gadget action (goal exits preferred over loop
// continuation). Fails when the gadget deadlocks, which can happen in
// faithful mode.
TransferResult transfer_policy_p_to_q(const TaggedFond& p, const Reduction& r,
                                      const Policy& pi_p);

// Restriction of a reduction policy to the source problem: rules at the
// canonical normal embeddings of source states, gadget bookkeeping
// dropped.
Policy transfer_policy_q_to_p(const TaggedFond& p, const Reduction& r,
                              const Policy& pi_q);

}  // namespace qnpk
