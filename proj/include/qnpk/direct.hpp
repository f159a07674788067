#pragma once

// Direct translation of a QNP into a tagged FOND problem: numeric literals
// become zero-flag atoms, Inc(X) deterministically clears the flag, Dec(X)
// becomes a oneof between clearing and setting it. The translation keeps
// inc/dec tags so termination can be checked separately; strong-cyclic
// solutions of the result solve the QNP iff they pass that check.

#include "qnpk/model.hpp"

namespace qnpk {

TaggedFond t_direct(const Qnp& q);

// All states reachable from s by applying action a: the deterministic
// effects plus every combination of one outcome per oneof. Sorted and
// de-duplicated. Empty when a is inapplicable in s.
std::vector<AbstractState> qnp_boolean_successors(const TaggedFond& p,
                                                  const AbstractState& s,
                                                  const FondAction& a);

}  // namespace qnpk
