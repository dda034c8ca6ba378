#pragma once

#include <vector>

#include "fwmav/dynamics.hpp"

namespace fwmav {

struct NonFiniteError : std::runtime_error {
    NonFiniteError(const std::string& what, long step)
        : std::runtime_error(what), step_index(step) {}
    long step_index;
};

enum class Method {
    MK4,         // Runge-Kutta-Munthe-Kaas, order 4
    RK4Project,  // classical RK4 on matrix entries + polar projection
};

struct IntegratorConfig {
    double dt = 1e-3;  // s, must be in (0, 0.1]
    Method method = Method::MK4;
    int record_every = 1;
};

struct Diagnostics {
    double energy = 0.0;     // J
    double pi_z = 0.0;       // kg m^2 / s, e_z spatial momentum
    double gamma_err = 0.0;  // ||Gamma - R_BI^T e_z||
};

struct Sample {
    double t;
    ReducedState state;
    ForceInputs forces;
    Diagnostics diag;
};

struct Trajectory {
    std::vector<Sample> samples;
};

/// One fixed step of the chosen method. Both methods keep the rotation
/// invariants: MK4 by construction, RK4Project by projection.
ReducedState step(const InertialParams& p, const ReducedState& st,
                  const ForceProvider& provider, const GaitSpec& gait,
                  const IntegratorConfig& cfg);

/// Fixed-step integration for `duration` seconds, recording every
/// cfg.record_every steps (first and last samples always recorded).
/// Deterministic: identical inputs give bit-identical trajectories.
/// Throws NonFiniteError if the state leaves the finite range.
Trajectory simulate(const InertialParams& p, const ReducedState& st0,
                    const ForceProvider& provider, const GaitSpec& gait,
                    const IntegratorConfig& cfg, double duration);

/// Energy (kinetic + potential via inertial heights), the e_z component of
/// spatial momentum, and the advected-vector consistency error.
Diagnostics diagnostics(const InertialParams& p, const ReducedState& st);

}  // namespace fwmav
