#pragma once

// Random model generators and fixture helpers shared by the unit and
// acceptance suites. All generators are deterministic functions of the
// supplied RNG and always produce models that pass validation.

#include <string>

#include "qnpk/model.hpp"
#include "qnpk/sim.hpp"

namespace qnpk::testing {

std::string fixture_path(const std::string& name);
std::string read_fixture(const std::string& name);

Qnp load_qnp_fixture(const std::string& name);
TaggedFond load_fond_fixture(const std::string& name);
Policy load_policy_fixture(const std::string& name, const AtomUniverse& u,
                           const std::string& model_name);

struct QnpGenLimits {
    int max_bools = 2;
    int max_nums = 2;
    int max_actions = 4;
};

Qnp random_qnp(SplitMix64& rng, const QnpGenLimits& lim = {});

struct FondGenLimits {
    int max_atoms = 4;
    int max_actions = 4;
    // at most this many actions get a oneof clause (each with 2 to
    // max_outcomes outcomes); the rest stay deterministic
    int max_nondet_actions = 1;
    int max_outcomes = 3;
};

TaggedFond random_fond(SplitMix64& rng, const FondGenLimits& lim = {});

NumericState random_numeric_state(SplitMix64& rng, const Qnp& q,
                                  double high = 10.0);

}  // namespace qnpk::testing
