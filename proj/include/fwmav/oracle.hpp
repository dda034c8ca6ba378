#pragma once

#include <functional>
#include <vector>

#include "fwmav/integrator.hpp"

namespace fwmav {

struct ChartOverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exponential chart around reference rotations. Local coordinates
/// q = (theta_B, r_I, theta_L, theta_R) with R = R0 * exp_so3(theta);
/// valid while every ||theta|| < pi/2.
struct Chart {
    Rotation R_B0, R_WL0, R_WR0;
};

struct OracleState {
    Chart chart;
    Vec12 q = Vec12::Zero();
    Vec12 qdot = Vec12::Zero();
    double t = 0.0;
};

/// Unreduced Lagrangian L = T - V from the frame kinematics, computed in
/// inertial coordinates. gravity_dir generalizes e_z so the left-invariance
/// of the extended Lagrangian can be tested directly.
/// Throws ChartOverflowError if any ||theta|| >= pi/2.
double full_lagrangian(const InertialParams& p, const Chart& chart,
                       const Vec12& q, const Vec12& qdot,
                       const Vec3& gravity_dir = Vec3(0, 0, 1));

/// Generalized forces on the chart coordinates: J^T (F_a, T_aB,
/// T_aL + T_cL, T_aR + T_cR) with J the finite-differenced Jacobian of the
/// stacked body velocities with respect to qdot.
Vec12 chart_generalized_forces(const InertialParams& p, const Chart& chart,
                               const Vec12& q, const Vec12& qdot,
                               const ForceInputs& f);

/// Solves A(q) qddot = dL/dq - (d^2L/dq dqdot) qdot + Q, every derivative
/// obtained by central finite differences of full_lagrangian.
Vec12 oracle_accel(const InertialParams& p, const Chart& chart,
                   const Vec12& q, const Vec12& qdot,
                   const Vec12& generalized_forces);

OracleState oracle_init(const ReducedState& st);

ReducedState oracle_to_reduced(const OracleState& os);

/// Re-centers any rotation block with ||theta|| > 1.0:
/// R0 <- R0 exp(theta), theta <- 0, with qdot remapped so the physical
/// velocity is unchanged.
void oracle_recenter(OracleState& os);

/// RK4 on (q, qdot) with per-step re-centering. Returns one state per step
/// including the initial one.
std::vector<ReducedState> oracle_simulate(const InertialParams& p,
                                          const ReducedState& st0,
                                          const ForceProvider& provider,
                                          const GaitSpec& gait, double dt,
                                          double duration);

/// Max relative error between an analytic gradient and central finite
/// differences of f at x, denominator max(1, ||analytic||).
double fd_relative_error(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, const Eigen::VectorXd& analytic_grad,
    double h = 1e-6);

}  // namespace fwmav
