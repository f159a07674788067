#include "qnpk/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qnpk/direct.hpp"
#include "qnpk/sieve.hpp"

namespace qnpk {

std::string to_string(RolloutOutcome o) {
    switch (o) {
        case RolloutOutcome::Goal: return "goal";
        case RolloutOutcome::DeadEnd: return "dead-end";
        case RolloutOutcome::StepCap: return "step-cap";
    }
    return "?";
}

std::optional<Adversary> adversary_from_string(const std::string& s) {
    if (s == "random") return Adversary::Random;
    if (s == "min-step") return Adversary::MinStep;
    if (s == "zero-jump") return Adversary::ZeroJump;
    return std::nullopt;
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

FullPolicyController::FullPolicyController(const Qnp& q,
                                           const FullTranslation& t,
                                           const Policy& pi_full)
    : t_(&t), pi_(&pi_full) {
    full_universe_ = universe_of(t.fond);
    source_bits_ = universe_of(q).size();
    reset();
}

void FullPolicyController::reset() {
    memory_ = initial_abstract_states(t_->fond)[0];
}

const std::string* FullPolicyController::choose(const AbstractState& s) {
    // adopt the observed source bits, keep the memory bits
    for (std::size_t i = 0; i < source_bits_; ++i) memory_.set(i, s.get(i));

    // apply bookkeeping actions until a source action comes up; cap the
    // chain so a buggy policy cannot spin forever
    for (int guard = 0; guard < 1 << 20; ++guard) {
        const std::string* name = pi_->lookup(memory_);
        if (!name) return nullptr;
        auto prov = t_->layout.provenance.find(*name);
        if (prov == t_->layout.provenance.end())
            throw std::logic_error("unknown action in controller policy: " +
                                   *name);
        const FondAction* a = t_->fond.find_action(*name);
        if (!a || !satisfies(memory_, full_universe_, a->pre)) return nullptr;

        bool internal = prov->second.role != RoleKind::Source &&
                        prov->second.role != RoleKind::SourceStacked;
        // memory effects of a source action (counter resets) also apply;
        // its source-bit effects come back through the next observation
        for (const auto& l : a->det) {
            int i = full_universe_.find(l.var);
            if (i < 0 || static_cast<std::size_t>(i) < source_bits_) continue;
            memory_.set(static_cast<std::size_t>(i),
                        l.kind == LitKind::BoolPos);
        }
        if (!internal) {
            chosen_ = prov->second.source;
            return &chosen_;
        }
    }
    return nullptr;
}

namespace {

bool num_applicable(const Qnp& q, const NumericState& s, const QnpAction& a) {
    AtomUniverse bu;  // booleans by declaration position
    for (const auto& l : a.pre) {
        if (l.kind == LitKind::BoolPos || l.kind == LitKind::BoolNeg) {
            auto it = std::find(q.bools.begin(), q.bools.end(), l.var);
            bool v = s.bools[static_cast<std::size_t>(
                it - q.bools.begin())];
            if (v != (l.kind == LitKind::BoolPos)) return false;
        } else {
            auto it = std::find(q.nums.begin(), q.nums.end(), l.var);
            double v = s.nums[static_cast<std::size_t>(it - q.nums.begin())];
            if (l.kind == LitKind::NumZero ? v != 0.0 : !(v > 0.0))
                return false;
        }
    }
    return true;
}

bool num_goal(const Qnp& q, const NumericState& s) {
    for (const auto& l : q.goal) {
        if (l.kind == LitKind::BoolPos || l.kind == LitKind::BoolNeg) {
            auto it = std::find(q.bools.begin(), q.bools.end(), l.var);
            bool v = s.bools[static_cast<std::size_t>(
                it - q.bools.begin())];
            if (v != (l.kind == LitKind::BoolPos)) return false;
        } else {
            auto it = std::find(q.nums.begin(), q.nums.end(), l.var);
            double v = s.nums[static_cast<std::size_t>(it - q.nums.begin())];
            if (l.kind == LitKind::NumZero ? v != 0.0 : !(v > 0.0))
                return false;
        }
    }
    return true;
}

void apply_bools(const Qnp& q, const QnpAction& a, NumericState& s) {
    for (const auto& l : a.eff) {
        auto it = std::find(q.bools.begin(), q.bools.end(), l.var);
        s.bools[static_cast<std::size_t>(it - q.bools.begin())] =
            l.kind == LitKind::BoolPos;
    }
}

double dec_value(double x, Adversary mode, double eps, SplitMix64& rng) {
    if (x <= eps) return 0.0;  // below-epsilon drop straight to 0
    switch (mode) {
        case Adversary::Random: {
            double delta = rng.uniform(eps, x);
            return std::max(0.0, x - delta);
        }
        case Adversary::MinStep: return x - eps;
        case Adversary::ZeroJump: return 0.0;
    }
    return 0.0;
}

NumericState successor(const Qnp& q, const QnpAction& a,
                       const NumericState& s, Adversary mode,
                       const SimConfig& cfg, SplitMix64& rng) {
    NumericState t = s;
    apply_bools(q, a, t);
    for (const auto& e : a.num) {
        auto it = std::find(q.nums.begin(), q.nums.end(), e.var);
        double& x = t.nums[static_cast<std::size_t>(it - q.nums.begin())];
        if (e.kind == NumEffKind::Inc)
            x += rng.uniform(cfg.epsilon, cfg.init_high);
        else
            x = dec_value(x, mode, cfg.epsilon, rng);
    }
    return t;
}

RolloutResult rollout(const Qnp& q, const TaggedFond& pd,
                      const AtomUniverse& u, SimController& ctl,
                      const SimConfig& cfg, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ctl.reset();

    NumericState s;
    s.bools.assign(q.bools.size(), false);
    s.nums.assign(q.nums.size(), 0.0);
    AbstractState init = initial_abstract_states(q)[0];
    for (std::size_t i = 0; i < q.bools.size(); ++i) s.bools[i] = init.get(i);
    for (std::size_t i = 0; i < q.nums.size(); ++i)
        if (!init.get(q.bools.size() + i))  // zero flag clear: sample X > 0
            s.nums[i] = rng.uniform(cfg.epsilon, cfg.init_high);

    RolloutResult r;
    if (cfg.record_trace) r.trace.push_back({"", s});

    while (true) {
        if (num_goal(q, s)) {
            r.outcome = RolloutOutcome::Goal;
            break;
        }
        if (r.steps >= cfg.max_steps) {
            r.outcome = RolloutOutcome::StepCap;
            break;
        }
        AbstractState bs = abstract(q, s);
        const std::string* name = ctl.choose(bs);
        if (!name) {
            r.outcome = RolloutOutcome::DeadEnd;
            r.diagnostic = "policy undefined";
            break;
        }
        const QnpAction* a = q.find_action(*name);
        if (!a || !num_applicable(q, s, *a)) {
            r.outcome = RolloutOutcome::DeadEnd;
            r.diagnostic = "inapplicable action " + *name;
            break;
        }

        NumericState t;
        if (cfg.adversary == Adversary::ZeroJump) {
            // jump every decrement to 0 unless that would hand the policy
            // the goal; fall back to the smallest legal decrement then
            SplitMix64 probe = rng;
            t = successor(q, *a, s, Adversary::ZeroJump, cfg, probe);
            if (num_goal(q, t))
                t = successor(q, *a, s, Adversary::MinStep, cfg, rng);
            else
                rng = probe;
        } else {
            t = successor(q, *a, s, cfg.adversary, cfg, rng);
        }

        // the abstract move must be one the boolean abstraction predicts
        const FondAction* fa = pd.find_action(*name);
        AbstractState ta = abstract(q, t);
        auto preds = qnp_boolean_successors(pd, bs, *fa);
        if (std::find(preds.begin(), preds.end(), ta) == preds.end())
            throw std::logic_error("abstraction violated by action " + *name);

        s = std::move(t);
        ++r.steps;
        if (cfg.record_trace) r.trace.push_back({*name, s});
    }
    r.final_state = s;
    return r;
}

}  // namespace

std::vector<RolloutResult> simulate(const Qnp& q, SimController& ctl,
                                    const SimConfig& cfg) {
    if (!(cfg.epsilon > 0.0) || cfg.epsilon > cfg.init_high)
        throw std::invalid_argument("epsilon must be in (0, init_high]");
    if (cfg.max_steps < 1 || cfg.runs < 1)
        throw std::invalid_argument("max_steps and runs must be positive");

    TaggedFond pd = t_direct(q);
    AtomUniverse u = universe_of(pd);
    std::vector<RolloutResult> out;
    out.reserve(static_cast<std::size_t>(cfg.runs));
    SplitMix64 seeder(cfg.seed);
    for (int i = 0; i < cfg.runs; ++i)
        out.push_back(rollout(q, pd, u, ctl, cfg, seeder.next()));
    return out;
}

std::vector<RolloutResult> simulate(const Qnp& q, const Policy& pi,
                                    const SimConfig& cfg) {
    PolicyController ctl(pi);
    return simulate(q, ctl, cfg);
}

bool validate_trace(const Qnp& q, const std::vector<TraceStep>& trace,
                    double epsilon, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (trace.empty()) return fail("empty trace");
    if (!trace.front().action.empty()) return fail("missing initial state");

    for (std::size_t k = 1; k < trace.size(); ++k) {
        const NumericState& s = trace[k - 1].state;
        const NumericState& t = trace[k].state;
        std::string at = "step " + std::to_string(k);
        const QnpAction* a = q.find_action(trace[k].action);
        if (!a) return fail(at + ": unknown action");
        if (!num_applicable(q, s, *a)) return fail(at + ": inapplicable");

        for (std::size_t i = 0; i < q.bools.size(); ++i) {
            bool mentioned = false, want = s.bools[i];
            for (const auto& l : a->eff)
                if (l.var == q.bools[i]) {
                    mentioned = true;
                    want = l.kind == LitKind::BoolPos;
                }
            (void)mentioned;
            if (t.bools[i] != want)
                return fail(at + ": boolean " + q.bools[i] + " off-script");
        }
        for (std::size_t i = 0; i < q.nums.size(); ++i) {
            double x = s.nums[i], y = t.nums[i];
            const NumEffect* e = nullptr;
            for (const auto& ne : a->num)
                if (ne.var == q.nums[i]) e = &ne;
            if (!e) {
                if (y != x)
                    return fail(at + ": untouched " + q.nums[i] + " changed");
            } else if (e->kind == NumEffKind::Inc) {
                // one-ulp slack so x + epsilon passes its own check
                if (!(y - x >= epsilon - 1e-9))
                    return fail(at + ": increment below epsilon");
            } else {
                bool ok = y >= 0.0 && y < x &&
                          (x - y >= epsilon - 1e-9 || y == 0.0);
                if (!ok) return fail(at + ": invalid decrement");
            }
        }
    }
    return true;
}

namespace {

// bound on node visits inside the induced subgraph, or -1 when some cycle
// cannot be attributed to a decremented variable
long long visits_bound(const PolicyGraph& g, std::vector<std::vector<int>> succ,
                       const std::vector<int>& members, long long loops) {
    // restrict to members
    std::set<int> in(members.begin(), members.end());
    for (int v : members) {
        auto& row = succ[static_cast<std::size_t>(v)];
        row.erase(std::remove_if(row.begin(), row.end(),
                                 [&](int w) { return !in.count(w); }),
                  row.end());
    }
    long long total = 0;
    for (const auto& comp : strongly_connected_components(succ)) {
        if (!in.count(comp[0])) continue;
        bool cyclic = comp.size() > 1;
        if (!cyclic)
            for (int w : succ[static_cast<std::size_t>(comp[0])])
                if (w == comp[0]) cyclic = true;
        if (!cyclic) {
            total += 1;
            continue;
        }
        // pick a variable decremented inside, incremented nowhere inside
        std::string var;
        for (int v : comp)
            for (const auto& x : g.decs[static_cast<std::size_t>(v)]) {
                bool inc = false;
                for (int w : comp)
                    for (const auto& y :
                         g.incs[static_cast<std::size_t>(w)])
                        if (y == x) inc = true;
                if (!inc && (var.empty() || x < var)) var = x;
            }
        if (var.empty()) return -1;
        auto sub = succ;
        for (int v : comp) {
            bool dec = false;
            for (const auto& x : g.decs[static_cast<std::size_t>(v)])
                if (x == var) dec = true;
            if (dec) sub[static_cast<std::size_t>(v)].clear();
        }
        long long inner = visits_bound(g, sub, comp, loops);
        if (inner < 0) return -1;
        total += loops * inner;
    }
    return total;
}

}  // namespace

std::optional<long long> derive_step_cap(const Qnp& q, const Policy& pi,
                                         const SimConfig& cfg) {
    TaggedFond pd = t_direct(q);
    PolicyGraph g = build_policy_graph(pd, pi);
    for (bool open : g.open)
        if (open) return std::nullopt;
    SieveTrace trace = run_sieve(g, SieveMode::Exhaustive);
    if (!trace.terminating) return std::nullopt;

    // increments must start from 0 so every value stays below init_high
    for (const auto& a : q.actions)
        for (const auto& e : a.num) {
            if (e.kind != NumEffKind::Inc) continue;
            bool from_zero = false;
            for (const auto& l : a.pre)
                if (l.kind == LitKind::NumZero && l.var == e.var)
                    from_zero = true;
            if (!from_zero) return std::nullopt;
        }

    long long loops =
        static_cast<long long>(std::ceil(cfg.init_high / cfg.epsilon)) + 1;
    std::vector<int> all(g.nodes.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = static_cast<int>(i);
    long long visits = visits_bound(g, g.succ, all, loops);
    if (visits < 1) return std::nullopt;
    return std::max(1LL, visits - 1);  // steps = node visits - 1
}

}  // namespace qnpk
