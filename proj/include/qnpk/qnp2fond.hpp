#pragma once

// Full QNP -> FOND translation with forced termination.
//
// Variables that are never incremented keep the direct treatment; the
// remaining ("stacked") variables get a stack discipline plus bounded
// binary counters so that every strong-cyclic solution of the output is
// terminating on the source QNP. When no variable needs the stack the
// translation degenerates to t_direct exactly.

#include <optional>

#include "qnpk/model.hpp"
#include "qnpk/sieve.hpp"

namespace qnpk {

struct TranslateOptions {
    // also treat variables as direct when every action incrementing them
    // decrements an already-direct variable (off by default)
    bool well_ordered = false;
    // put every numeric variable on the stack regardless of analysis
    bool force_full = false;
    // counter bound override: allow at least this many increments per
    // counter (rounded up to a power of two). Defaults to 2^n for
    // n = |F| + |V|, the completeness bound.
    std::optional<long long> max_override;
};

struct VariableLayout {
    std::vector<std::string> direct_vars;   // declaration order
    std::vector<std::string> stacked_vars;  // declaration order
};

VariableLayout analyze_variables(const Qnp& q,
                                 const TranslateOptions& opts = {});

enum class RoleKind { Source, SourceStacked, Push, Pop, Move };

struct ActionProvenance {
    RoleKind role;
    std::string source;  // source action name, "" for stack bookkeeping
    std::string var;
    int depth = 0;
    int bit = -1;
};

struct TranslationLayout {
    VariableLayout vars;
    int depth_bound = 0;     // D = number of stacked variables
    int bit_width = 0;       // W = bits per counter
    long long max_value = 0; // increments allowed per counter (2^(W-1))
    std::map<std::string, ActionProvenance> provenance;  // by action name

    bool degenerate() const { return vars.stacked_vars.empty(); }

    std::string in_atom(const std::string& x) const;
    std::string depth_atom(int d) const;
    std::string index_atom(const std::string& x, int d) const;
    std::string cbit_atom(int d, int i) const;
    std::string tbit_atom(int i) const;
};

struct FullTranslation {
    TaggedFond fond;
    TranslationLayout layout;
};

FullTranslation t_full(const Qnp& q, const TranslateOptions& opts = {});

struct LiftResult {
    bool ok = false;
    std::string reason;
    Policy policy;  // over the t_full output when ok
};

// Transfers a policy that solves the QNP (strong cyclic on t_direct and
// terminating) onto the full translation: pops and a move reconcile the
// transfer counter when crossing top-level components, pushes rebuild the
// per-state variable stack, and source actions fire once the stack
// matches.
LiftResult lift_policy_star(const Qnp& q, const FullTranslation& t,
                            const Policy& pi_direct);

struct ProjectionResult {
    // full-translation policy split into (source state, memory) rules
    Policy controller;
    bool memoryless_ok = false;
    Policy memoryless;  // over the QNP's universe when memoryless_ok
    std::vector<std::string> conflicts;
};

// Projects a policy over t_full(q) onto the QNP's abstract states. The
// memoryless projection succeeds iff no source state is mapped to two
// distinct source actions across memory states.
ProjectionResult project_full_policy(const Qnp& q, const FullTranslation& t,
                                     const Policy& pi_full);

}  // namespace qnpk
