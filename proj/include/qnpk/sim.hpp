#pragma once

// Rollout simulator for the real-valued semantics: numeric variables hold
// non-negative reals, every increment and decrement changes the value by
// at least epsilon (a drop from below epsilon to exactly 0 is also
// allowed), and the adversary picks the magnitudes. Policies judged
// terminating must reach the goal under every adversary; the zero-jump
// adversary is the falsifier for non-terminating ones.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qnpk/model.hpp"
#include "qnpk/qnp2fond.hpp"

namespace qnpk {

enum class Adversary { Random, MinStep, ZeroJump };

struct SimConfig {
    double epsilon = 0.05;
    Adversary adversary = Adversary::Random;
    std::uint64_t seed = 0;
    int max_steps = 100000;
    double init_high = 10.0;  // bound for initial values and increments
    int runs = 1;
    bool record_trace = false;
};

enum class RolloutOutcome { Goal, DeadEnd, StepCap };

std::string to_string(RolloutOutcome o);
std::optional<Adversary> adversary_from_string(const std::string& s);

// state after applying action; the first entry has action "" and holds
// the initial state
struct TraceStep {
    std::string action;
    NumericState state;
};

struct RolloutResult {
    RolloutOutcome outcome = RolloutOutcome::DeadEnd;
    int steps = 0;
    std::string diagnostic;  // dead-end reason, "" otherwise
    NumericState final_state;
    std::vector<TraceStep> trace;  // only when record_trace
};

// splitmix64: tiny, portable, seeded 64-bit generator
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform();  // [0, 1)
    double uniform(double lo, double hi);

private:
    std::uint64_t state_;
};

// Action selection interface; reset() is called at the start of every
// rollout so stateful controllers can clear their memory.
class SimController {
public:
    virtual ~SimController() = default;
    virtual void reset() {}
    // nullptr when undefined on s; s ranges over the QNP's abstract states
    virtual const std::string* choose(const AbstractState& s) = 0;
};

class PolicyController : public SimController {
public:
    explicit PolicyController(const Policy& pi) : pi_(&pi) {}
    const std::string* choose(const AbstractState& s) override {
        return pi_->lookup(s);
    }

private:
    const Policy* pi_;
};

// Runs a policy over the stack-and-counter translation against the source
// QNP: the extra atoms act as controller memory, bookkeeping actions are
// applied internally, and only source actions are handed to the
// environment.
class FullPolicyController : public SimController {
public:
    FullPolicyController(const Qnp& q, const FullTranslation& t,
                         const Policy& pi_full);
    void reset() override;
    const std::string* choose(const AbstractState& s) override;

private:
    const FullTranslation* t_;
    const Policy* pi_;
    AtomUniverse full_universe_;
    std::size_t source_bits_;  // leading atoms shared with the QNP
    AbstractState memory_;     // current extended state
    std::string chosen_;
};

std::vector<RolloutResult> simulate(const Qnp& q, SimController& ctl,
                                    const SimConfig& cfg);
std::vector<RolloutResult> simulate(const Qnp& q, const Policy& pi,
                                    const SimConfig& cfg);

// Post-hoc check that a recorded trace follows the QNP's transition rules
// and respects the epsilon bound on every numeric change.
bool validate_trace(const Qnp& q, const std::vector<TraceStep>& trace,
                    double epsilon, std::string* why = nullptr);

// Conservative bound on rollout length for a terminating policy, from the
// nesting structure of its policy graph: a component whose cycles all
// decrement X can loop at most ceil(init_high/epsilon) + 1 times per
// entry. Requires every incremented variable to be incremented only from
// value 0, so increments are capped by init_high; returns nullopt
// otherwise or when the policy is not terminating.
std::optional<long long> derive_step_cap(const Qnp& q, const Policy& pi,
                                         const SimConfig& cfg);

}  // namespace qnpk
