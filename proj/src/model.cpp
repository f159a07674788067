#include "qnpk/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace qnpk {

Literal complement(const Literal& l) {
    switch (l.kind) {
        case LitKind::BoolPos: return {LitKind::BoolNeg, l.var};
        case LitKind::BoolNeg: return {LitKind::BoolPos, l.var};
        case LitKind::NumZero: return {LitKind::NumPos, l.var};
        case LitKind::NumPos: return {LitKind::NumZero, l.var};
    }
    throw std::logic_error("bad literal kind");
}

bool is_bool_lit(const Literal& l) {
    return l.kind == LitKind::BoolPos || l.kind == LitKind::BoolNeg;
}

bool is_num_lit(const Literal& l) { return !is_bool_lit(l); }

std::string to_string(const Literal& l) {
    switch (l.kind) {
        case LitKind::BoolPos: return l.var;
        case LitKind::BoolNeg: return "-" + l.var;
        case LitKind::NumZero: return l.var + "=0";
        case LitKind::NumPos: return l.var + ">0";
    }
    throw std::logic_error("bad literal kind");
}

bool NumTag::decrements(const std::string& var) const {
    for (const auto& e : entries)
        if (e.kind == NumEffKind::Dec && e.var == var) return true;
    return false;
}

bool NumTag::increments(const std::string& var) const {
    for (const auto& e : entries)
        if (e.kind == NumEffKind::Inc && e.var == var) return true;
    return false;
}

std::vector<std::string> NumTag::dec_vars() const {
    std::vector<std::string> out;
    for (const auto& e : entries)
        if (e.kind == NumEffKind::Dec) out.push_back(e.var);
    return out;
}

std::vector<std::string> NumTag::inc_vars() const {
    std::vector<std::string> out;
    for (const auto& e : entries)
        if (e.kind == NumEffKind::Inc) out.push_back(e.var);
    return out;
}

const QnpAction* Qnp::find_action(const std::string& n) const {
    for (const auto& a : actions)
        if (a.name == n) return &a;
    return nullptr;
}

const FondAction* TaggedFond::find_action(const std::string& n) const {
    for (const auto& a : actions)
        if (a.name == n) return &a;
    return nullptr;
}

AtomUniverse AtomUniverse::from(const std::vector<std::string>& atoms) {
    AtomUniverse u;
    u.atoms = atoms;
    for (int i = 0; i < static_cast<int>(atoms.size()); ++i)
        u.index.emplace(atoms[i], i);
    return u;
}

int AtomUniverse::find(const std::string& atom) const {
    auto it = index.find(atom);
    return it == index.end() ? -1 : it->second;
}

std::string zero_flag(const std::string& num_var) { return num_var + "=0"; }

AtomUniverse universe_of(const Qnp& q) {
    std::vector<std::string> atoms = q.bools;
    for (const auto& x : q.nums) atoms.push_back(zero_flag(x));
    return AtomUniverse::from(atoms);
}

AtomUniverse universe_of(const TaggedFond& p) {
    return AtomUniverse::from(p.atoms);
}

const std::string* Policy::lookup(const AbstractState& s) const {
    auto it = rules.find(s);
    return it == rules.end() ? nullptr : &it->second;
}

namespace {

// Atom index a literal talks about, or -1 if the variable is unknown.
int atom_of(const Literal& l, const AtomUniverse& u) {
    return u.find(is_bool_lit(l) ? l.var : zero_flag(l.var));
}

// true if the literal asserts the atom, false if it denies it
bool polarity_of(const Literal& l) {
    return l.kind == LitKind::BoolPos || l.kind == LitKind::NumZero;
}

void check_literals(const std::vector<Literal>& lits, const Qnp& q,
                    const std::string& where, bool allow_num,
                    ValidationReport& out) {
    std::set<std::string> bool_set(q.bools.begin(), q.bools.end());
    std::set<std::string> num_set(q.nums.begin(), q.nums.end());
    std::set<Literal> seen;
    for (const auto& l : lits) {
        bool declared = is_bool_lit(l) ? bool_set.count(l.var) > 0
                                       : num_set.count(l.var) > 0;
        if (!declared) {
            out.push_back({"undeclared-variable", where + ": " + to_string(l)});
            continue;
        }
        if (!allow_num && is_num_lit(l))
            out.push_back({"numeric-literal-not-allowed",
                           where + ": " + to_string(l)});
        if (seen.count(complement(l)))
            out.push_back({"complementary-literals",
                           where + ": " + to_string(l)});
        seen.insert(l);
    }
}

}  // namespace

ValidationReport validate_qnp(const Qnp& q) {
    ValidationReport out;

    std::set<std::string> names;
    for (const auto& b : q.bools)
        if (!names.insert(b).second)
            out.push_back({"duplicate-variable", b});
    for (const auto& x : q.nums)
        if (!names.insert(x).second)
            out.push_back({"duplicate-variable", x});

    std::set<std::string> action_names;
    for (const auto& a : q.actions) {
        if (!action_names.insert(a.name).second)
            out.push_back({"duplicate-action", a.name});
        check_literals(a.pre, q, "pre(" + a.name + ")", true, out);
        check_literals(a.eff, q, "eff(" + a.name + ")", false, out);

        std::set<std::string> num_set(q.nums.begin(), q.nums.end());
        std::set<std::string> num_seen;
        for (const auto& e : a.num) {
            if (!num_set.count(e.var)) {
                out.push_back({"undeclared-variable",
                               "num(" + a.name + "): " + e.var});
                continue;
            }
            if (!num_seen.insert(e.var).second)
                out.push_back({"complementary-numeric-effects",
                               "num(" + a.name + "): " + e.var});
            if (e.kind == NumEffKind::Dec) {
                // Dec(X) requires the precondition X>0
                bool guarded = false;
                for (const auto& l : a.pre)
                    if (l.kind == LitKind::NumPos && l.var == e.var)
                        guarded = true;
                if (!guarded)
                    out.push_back({"missing-dec-guard",
                                   a.name + ": Dec(" + e.var + ")"});
            }
        }
    }

    check_literals(q.init, q, "init", true, out);
    check_literals(q.goal, q, "goal", true, out);
    return out;
}

ValidationReport validate_fond(const TaggedFond& p) {
    ValidationReport out;
    AtomUniverse u = universe_of(p);

    std::set<std::string> atom_set;
    for (const auto& a : p.atoms)
        if (!atom_set.insert(a).second)
            out.push_back({"duplicate-atom", a});

    auto check = [&](const std::vector<Literal>& lits, const std::string& where) {
        std::set<Literal> seen;
        for (const auto& l : lits) {
            if (!is_bool_lit(l)) {
                out.push_back({"numeric-literal-not-allowed",
                               where + ": " + to_string(l)});
                continue;
            }
            if (!atom_set.count(l.var))
                out.push_back({"undeclared-atom", where + ": " + l.var});
            if (seen.count(complement(l)))
                out.push_back({"complementary-literals",
                               where + ": " + to_string(l)});
            seen.insert(l);
        }
    };

    std::set<std::string> action_names;
    for (const auto& a : p.actions) {
        if (!action_names.insert(a.name).second)
            out.push_back({"duplicate-action", a.name});
        check(a.pre, "pre(" + a.name + ")");
        check(a.det, "det(" + a.name + ")");
        for (std::size_t i = 0; i < a.ndets.size(); ++i) {
            const auto& nd = a.ndets[i];
            if (nd.outcomes.empty())
                out.push_back({"empty-oneof", a.name});
            for (const auto& oc : nd.outcomes) {
                check(oc, "oneof(" + a.name + ")");
                // outcome must be jointly consistent with the det effects
                for (const auto& l : oc)
                    for (const auto& d : a.det)
                        if (d == complement(l))
                            out.push_back({"outcome-conflicts-det",
                                           a.name + ": " + to_string(l)});
            }
            // any choice of one outcome per oneof must be consistent
            for (std::size_t j = i + 1; j < a.ndets.size(); ++j)
                for (const auto& oc1 : nd.outcomes)
                    for (const auto& oc2 : a.ndets[j].outcomes)
                        for (const auto& l1 : oc1)
                            for (const auto& l2 : oc2)
                                if (l1 == complement(l2))
                                    out.push_back(
                                        {"outcome-choice-conflict",
                                         a.name + ": " + to_string(l1)});
        }
        for (const auto& e : a.tag.entries) {
            if (u.find(zero_flag(e.var)) < 0) {
                out.push_back({"tag-without-flag-atom",
                               a.name + ": " + e.var});
                continue;
            }
            if (e.kind == NumEffKind::Dec) {
                bool guarded = false;
                for (const auto& l : a.pre)
                    if (l.kind == LitKind::BoolNeg && l.var == zero_flag(e.var))
                        guarded = true;
                if (!guarded)
                    out.push_back({"missing-dec-guard",
                                   a.name + ": dec:" + e.var});
            }
        }
    }

    {
        std::set<std::string> seen;
        for (const auto& a : p.init) {
            if (!atom_set.count(a))
                out.push_back({"undeclared-atom", "init: " + a});
            if (!seen.insert(a).second)
                out.push_back({"duplicate-init-atom", a});
        }
    }
    check(p.goal, "goal");
    return out;
}

AbstractState abstract(const Qnp& q, const NumericState& s) {
    if (s.bools.size() != q.bools.size() || s.nums.size() != q.nums.size())
        throw std::invalid_argument("numeric state shape mismatch");
    AbstractState a(q.bools.size() + q.nums.size());
    for (std::size_t i = 0; i < q.bools.size(); ++i) a.set(i, s.bools[i]);
    for (std::size_t i = 0; i < q.nums.size(); ++i) {
        if (s.nums[i] < 0)
            throw std::invalid_argument("negative numeric value");
        a.set(q.bools.size() + i, s.nums[i] == 0.0);
    }
    return a;
}

std::vector<AbstractState> initial_abstract_states(const Qnp& q) {
    AtomUniverse u = universe_of(q);
    AbstractState s(u.size());
    // closed world: unlisted booleans are false, unlisted X=0 flags are
    // false (i.e. X>0)
    for (const auto& l : q.init) {
        int i = u.find(is_bool_lit(l) ? l.var : zero_flag(l.var));
        if (i < 0) throw std::invalid_argument("init literal off-universe");
        s.set(static_cast<std::size_t>(i),
              l.kind == LitKind::BoolPos || l.kind == LitKind::NumZero);
    }
    return {s};
}

std::vector<AbstractState> initial_abstract_states(const TaggedFond& p) {
    AtomUniverse u = universe_of(p);
    AbstractState s(u.size());
    for (const auto& a : p.init) {
        int i = u.find(a);
        if (i < 0) throw std::invalid_argument("init atom off-universe");
        s.set(static_cast<std::size_t>(i), true);
    }
    return {s};
}

bool satisfies(const AbstractState& s, const AtomUniverse& u,
               const std::vector<Literal>& lits) {
    for (const auto& l : lits) {
        int i = atom_of(l, u);
        if (i < 0) return false;
        if (s.get(static_cast<std::size_t>(i)) != polarity_of(l)) return false;
    }
    return true;
}

void canonicalize(std::vector<Literal>& lits, const AtomUniverse& u) {
    std::sort(lits.begin(), lits.end(),
              [&](const Literal& a, const Literal& b) {
                  int ia = atom_of(a, u), ib = atom_of(b, u);
                  if (ia != ib) return ia < ib;
                  return a < b;
              });
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
}

}  // namespace qnpk
