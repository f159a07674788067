#pragma once

// Core domain types for QNPs, FOND problems, abstract states and policies.
//
// All types are plain values; operations on them are free functions without
// shared mutable state, so everything here is safe to use concurrently.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qnpk {

enum class LitKind { BoolPos, BoolNeg, NumZero, NumPos };

// A literal over a boolean variable (p / -p) or a numeric variable
// (X=0 / X>0). The variable is referenced by name.
struct Literal {
    LitKind kind;
    std::string var;

    bool operator==(const Literal&) const = default;
    auto operator<=>(const Literal&) const = default;
};

Literal complement(const Literal& l);
bool is_bool_lit(const Literal& l);
bool is_num_lit(const Literal& l);
std::string to_string(const Literal& l);

enum class NumEffKind { Inc, Dec };

struct NumEffect {
    NumEffKind kind;
    std::string var;

    bool operator==(const NumEffect&) const = default;
    auto operator<=>(const NumEffect&) const = default;
};

struct QnpAction {
    std::string name;
    std::vector<Literal> pre;    // F-literals and V-literals
    std::vector<Literal> eff;    // F-literals only
    std::vector<NumEffect> num;  // Inc(X) / Dec(X)

    bool operator==(const QnpAction&) const = default;
};

struct Qnp {
    std::string name;
    std::vector<std::string> bools;  // F, declaration order
    std::vector<std::string> nums;   // V, declaration order
    std::vector<Literal> init;       // I, closed world
    std::vector<QnpAction> actions;  // O, declaration order
    std::vector<Literal> goal;       // G

    bool operator==(const Qnp&) const = default;

    const QnpAction* find_action(const std::string& name) const;
};

// One non-deterministic effect: a choice among outcome literal sets.
// A deterministic effect is the one-outcome special case.
struct FondEffect {
    std::vector<std::vector<Literal>> outcomes;

    bool operator==(const FondEffect&) const = default;
};

// Numeric provenance tag carried by FOND actions so Sieve can see which
// actions came from Inc(X)/Dec(X) effects. Empty = no tag.
struct NumTag {
    std::vector<NumEffect> entries;

    bool empty() const { return entries.empty(); }
    bool decrements(const std::string& var) const;
    bool increments(const std::string& var) const;
    std::vector<std::string> dec_vars() const;
    std::vector<std::string> inc_vars() const;

    bool operator==(const NumTag&) const = default;
};

struct FondAction {
    std::string name;
    std::vector<Literal> pre;      // boolean literals over atoms
    std::vector<Literal> det;      // deterministic effects
    std::vector<FondEffect> ndets; // non-deterministic effects
    NumTag tag;

    bool operator==(const FondAction&) const = default;
};

struct TaggedFond {
    std::string name;
    std::vector<std::string> atoms;  // F', declaration order
    std::vector<std::string> init;   // atoms true initially (closed world)
    std::vector<FondAction> actions;
    std::vector<Literal> goal;

    bool operator==(const TaggedFond&) const = default;

    const FondAction* find_action(const std::string& name) const;
};

// Fixed, ordered atom universe. For a QNP this is the booleans in
// declaration order followed by one zero-flag atom "X=0" per numeric
// variable; for a FOND problem it is the declared atom order. This fixes
// the bit layout of AbstractState and all canonical serializations.
struct AtomUniverse {
    std::vector<std::string> atoms;
    std::unordered_map<std::string, int> index;

    static AtomUniverse from(const std::vector<std::string>& atoms);
    int find(const std::string& atom) const;  // -1 if absent
    std::size_t size() const { return atoms.size(); }
};

std::string zero_flag(const std::string& num_var);  // "X=0"

AtomUniverse universe_of(const Qnp& q);
AtomUniverse universe_of(const TaggedFond& p);

// Total truth assignment over a fixed atom universe. Equality is bitwise,
// ordering is lexicographic over the fixed atom order.
class AbstractState {
public:
    AbstractState() = default;
    explicit AbstractState(std::size_t n) : bits_(n, false) {}

    bool get(std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, bool v) { bits_[i] = v; }
    std::size_t size() const { return bits_.size(); }

    bool operator==(const AbstractState&) const = default;
    auto operator<=>(const AbstractState&) const = default;

    const std::vector<bool>& bits() const { return bits_; }

private:
    std::vector<bool> bits_;
};

struct AbstractStateHash {
    std::size_t operator()(const AbstractState& s) const {
        return std::hash<std::vector<bool>>{}(s.bits());
    }
};

// Partial mapping from abstract states to action names.
struct Policy {
    std::map<AbstractState, std::string> rules;

    bool operator==(const Policy&) const = default;

    const std::string* lookup(const AbstractState& s) const;
};

// Full valuation used by the epsilon-trajectory simulator. Vectors are
// aligned with the declaration order of the QNP's variables.
struct NumericState {
    std::vector<bool> bools;
    std::vector<double> nums;
};

struct Violation {
    std::string code;   // e.g. "missing-dec-guard"
    std::string where;  // action/field that triggered it
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_qnp(const Qnp& q);
ValidationReport validate_fond(const TaggedFond& p);

// Boolean abstraction of a numeric state: booleans pass through, the
// zero-flag of X is true iff nums[X] == 0. Throws on size mismatch.
AbstractState abstract(const Qnp& q, const NumericState& s);

// Single closed-world initial abstract state, returned as a set for
// future generality.
std::vector<AbstractState> initial_abstract_states(const Qnp& q);
std::vector<AbstractState> initial_abstract_states(const TaggedFond& p);

bool satisfies(const AbstractState& s, const AtomUniverse& u,
               const std::vector<Literal>& lits);

// Literal normalization shared by parsers and translators: sorts by
// (universe position, kind) and drops exact duplicates.
void canonicalize(std::vector<Literal>& lits, const AtomUniverse& u);

}  // namespace qnpk
