#include "qnpk/direct.hpp"

#include <algorithm>
#include <stdexcept>

namespace qnpk {

namespace {

// Rewrite a QNP literal over the flag universe: X=0 becomes the flag atom,
// X>0 its negation. Boolean literals pass through.
Literal flagged(const Literal& l) {
    switch (l.kind) {
        case LitKind::BoolPos:
        case LitKind::BoolNeg: return l;
        case LitKind::NumZero: return {LitKind::BoolPos, zero_flag(l.var)};
        case LitKind::NumPos: return {LitKind::BoolNeg, zero_flag(l.var)};
    }
    throw std::logic_error("bad literal kind");
}

}  // namespace

TaggedFond t_direct(const Qnp& q) {
    TaggedFond p;
    p.name = q.name;
    AtomUniverse qu = universe_of(q);
    p.atoms = qu.atoms;

    for (const auto& a : q.actions) {
        FondAction fa;
        fa.name = a.name;
        for (const auto& l : a.pre) fa.pre.push_back(flagged(l));
        for (const auto& l : a.eff) fa.det.push_back(flagged(l));
        for (const auto& e : a.num) {
            if (e.kind == NumEffKind::Inc) {
                fa.det.push_back({LitKind::BoolNeg, zero_flag(e.var)});
            } else {
                FondEffect eff;
                eff.outcomes.push_back({{LitKind::BoolNeg, zero_flag(e.var)}});
                eff.outcomes.push_back({{LitKind::BoolPos, zero_flag(e.var)}});
                fa.ndets.push_back(std::move(eff));
            }
            fa.tag.entries.push_back(e);
        }
        AtomUniverse pu = AtomUniverse::from(p.atoms);
        canonicalize(fa.pre, pu);
        canonicalize(fa.det, pu);
        std::sort(fa.tag.entries.begin(), fa.tag.entries.end());
        p.actions.push_back(std::move(fa));
    }

    AbstractState s0 = initial_abstract_states(q)[0];
    for (std::size_t i = 0; i < p.atoms.size(); ++i)
        if (s0.get(i)) p.init.push_back(p.atoms[i]);

    for (const auto& l : q.goal) p.goal.push_back(flagged(l));
    AtomUniverse pu = AtomUniverse::from(p.atoms);
    canonicalize(p.goal, pu);
    return p;
}

std::vector<AbstractState> qnp_boolean_successors(const TaggedFond& p,
                                                  const AbstractState& s,
                                                  const FondAction& a) {
    AtomUniverse u = universe_of(p);
    if (!satisfies(s, u, a.pre)) return {};

    AbstractState base = s;
    auto apply = [&](AbstractState& st, const std::vector<Literal>& lits) {
        for (const auto& l : lits) {
            int i = u.find(l.var);
            if (i < 0) throw std::invalid_argument("effect atom off-universe");
            st.set(static_cast<std::size_t>(i), l.kind == LitKind::BoolPos);
        }
    };
    apply(base, a.det);

    std::vector<AbstractState> out{base};
    for (const auto& nd : a.ndets) {
        std::vector<AbstractState> next;
        for (const auto& st : out)
            for (const auto& oc : nd.outcomes) {
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

}  // namespace qnpk
