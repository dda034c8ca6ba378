#pragma once

#include <functional>
#include <utility>

#include "fwmav/model.hpp"

namespace fwmav {

struct SingularMassError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full simulation state: reduced pose and velocities plus the reconstructed
/// torso attitude and inertial position.
struct ReducedState {
    ReducedPose pose;
    VelocityZ z;
    Rotation R_BI;             // torso attitude, reconstructed
    Vec3 r_I = Vec3::Zero();   // inertial position, m
    double t = 0.0;            // s
};

/// Aerodynamic and control inputs. F_a and T_aB are in the body frame;
/// the wing torques are in the respective wing frames.
struct ForceInputs {
    Vec3 F_a = Vec3::Zero();    // N
    Vec3 T_aB = Vec3::Zero();   // N m
    Vec3 T_aL = Vec3::Zero();
    Vec3 T_aR = Vec3::Zero();
    Vec3 T_cL = Vec3::Zero();   // control torques at wing joints
    Vec3 T_cR = Vec3::Zero();
};

/// Must be deterministic given state (including time).
using ForceProvider = std::function<ForceInputs(const ReducedState&)>;

/// Sinusoidal control-torque pattern at the wing joints.
struct GaitSpec {
    double amplitude = 0.0;       // N m
    double frequency = 1.0;       // Hz
    double phase_L = 0.0;         // rad
    double phase_R = 0.0;
    Vec3 axis_L = Vec3(0, 1, 0);  // unit, wing frame
    Vec3 axis_R = Vec3(0, 1, 0);
};

/// Time derivative of the integration state. Rotations evolve by right
/// multiplication with their algebra rates: R_dot = R * hat(omega).
struct StateDerivative {
    Vec12 momenta_dot = Vec12::Zero();  // d/dt of M(s) z, stacked
    Vec3 r_dot = Vec3::Zero();          // body-frame transport of r
    Vec3 Gamma_dot = Vec3::Zero();
    Vec3 r_I_dot = Vec3::Zero();
    Vec3 w_B = Vec3::Zero();            // algebra rate of R_BI
    Vec3 w_L = Vec3::Zero();            // algebra rate of R_WLB
    Vec3 w_R = Vec3::Zero();            // algebra rate of R_WRB
};

/// Forced reduced equations of motion in momentum form, with the advected,
/// shape and reconstruction kinematics.
StateDerivative reduced_rhs(const InertialParams& p, const ReducedState& st,
                            const ForceInputs& f);

/// Solves M(s) z = momenta4 with an LDLT factorization.
/// Throws SingularMassError on factorization failure.
VelocityZ solve_velocities(const InertialParams& p, const ShapeConfig& s,
                           const Vec12& momenta4);

/// Gamma_dot = -w_B x Gamma.
Vec3 gamma_rhs(const Vec3& w_B, const Vec3& Gamma);

/// R_BI_dot = R_BI * hat(w_B).
Mat3 reconstruction_rhs(const Rotation& R_BI, const Vec3& w_B);

/// (T_cL, T_cR) = amplitude * sin(2 pi f t + phase) * axis, per wing.
std::pair<Vec3, Vec3> gait_torque(const GaitSpec& gait, double t);

ForceProvider zero_force_provider();
ForceProvider linear_damping_provider(double c_lin, double c_rot);

}  // namespace fwmav
