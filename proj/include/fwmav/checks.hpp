#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fwmav/oracle.hpp"

namespace fwmav::checks {

struct CheckResult {
    std::string name;
    double measured;
    double tolerance;
    bool pass;
};

/// Well-conditioned reference parameters used by the property suites and the
/// shipped example configs.
InertialParams default_params();

Rotation random_rotation(std::mt19937_64& rng, double max_angle = 3.0);
ReducedState random_state(std::mt19937_64& rng);

// Individual property suites. Tolerances are fixed here.
CheckResult lagrangian_equality(const InertialParams& p, uint64_t seed);
CheckResult gradient_certification(const InertialParams& p, uint64_t seed);
std::vector<CheckResult> oracle_equivalence(const InertialParams& p,
                                            uint64_t seed);
CheckResult energy_conservation(const InertialParams& p);
CheckResult so2_momentum(const InertialParams& p);
std::vector<CheckResult> full_symmetry_g0(const InertialParams& p);
std::vector<CheckResult> gamma_fidelity(const InertialParams& p);
CheckResult integrator_order(const InertialParams& p);
CheckResult free_fall(const InertialParams& p);
CheckResult determinism(const InertialParams& p);

/// Runs every suite whose name contains `only` (all when empty). Tolerances
/// are multiplied by tolerance_scale (pass/fail re-evaluated accordingly).
std::vector<CheckResult> run_all(const InertialParams& p, uint64_t seed,
                                 const std::string& only = "",
                                 double tolerance_scale = 1.0);

}  // namespace fwmav::checks
