#include "fwmav/dynamics.hpp"

#include <cmath>
#include <numbers>

namespace fwmav {

StateDerivative reduced_rhs(const InertialParams& p, const ReducedState& st,
                            const ForceInputs& f) {
    const VelocityZ& z = st.z;
    const ReducedPose& pose = st.pose;
    const Momenta mom = momenta(p, pose.shape, z);

    const Vec3 dldr = dl_dr(p, pose);
    const Vec3 dldG = dl_dGamma(p, pose);

    StateDerivative d;
    // Translational and rotational Euler-Poincare equations.
    const Vec3 p_lin_dot = mom.p_lin.cross(z.w_B) + dldr + f.F_a;
    // The torso-weight parts of the two gravity terms cancel; what remains is
    // the wing-offset torque -sum_W m_W g (R_WB hbar) x Gamma about the hinge.
    const Vec3 pi_B_dot = mom.pi_B.cross(z.w_B) + mom.p_lin.cross(z.v) +
                          dldr.cross(pose.r) + dldG.cross(pose.Gamma) + f.T_aB;
    // Left-trivialized Euler-Lagrange equations on the wing rotations.
    const Vec3 mu_L_dot = mom.mu_L.cross(z.w_L) +
                          shape_gradient(p, pose, z, Wing::Left) + f.T_cL +
                          f.T_aL;
    const Vec3 mu_R_dot = mom.mu_R.cross(z.w_R) +
                          shape_gradient(p, pose, z, Wing::Right) + f.T_cR +
                          f.T_aR;
    d.momenta_dot << p_lin_dot, pi_B_dot, mu_L_dot, mu_R_dot;

    d.r_dot = -z.w_B.cross(pose.r) + z.v;
    d.Gamma_dot = gamma_rhs(z.w_B, pose.Gamma);
    d.r_I_dot = st.R_BI * z.v;
    d.w_B = z.w_B;
    d.w_L = z.w_L;
    d.w_R = z.w_R;
    return d;
}

VelocityZ solve_velocities(const InertialParams& p, const ShapeConfig& s,
                           const Vec12& momenta4) {
    const Mat12 M = assemble_mass_matrix(p, s);
    Eigen::LDLT<Mat12> ldlt(M);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularMassError("mass matrix factorization failed");
    }
    const Vec12 z = ldlt.solve(momenta4);
    if (!z.allFinite() && momenta4.allFinite()) {
        throw SingularMassError("mass matrix solve produced non-finite z");
    }
    // Non-finite input propagates; the integrator reports it with the step.
    return VelocityZ::from_stacked(z);
}

Vec3 gamma_rhs(const Vec3& w_B, const Vec3& Gamma) {
    return -w_B.cross(Gamma);
}

Mat3 reconstruction_rhs(const Rotation& R_BI, const Vec3& w_B) {
    return R_BI.matrix() * hat(w_B);
}

std::pair<Vec3, Vec3> gait_torque(const GaitSpec& gait, double t) {
    const double w = 2.0 * std::numbers::pi * gait.frequency;
    return {gait.amplitude * std::sin(w * t + gait.phase_L) * gait.axis_L,
            gait.amplitude * std::sin(w * t + gait.phase_R) * gait.axis_R};
}

ForceProvider zero_force_provider() {
    return [](const ReducedState&) { return ForceInputs{}; };
}

ForceProvider linear_damping_provider(double c_lin, double c_rot) {
    return [c_lin, c_rot](const ReducedState& st) {
        ForceInputs f;
        f.F_a = -c_lin * st.z.v;
        f.T_aB = -c_rot * st.z.w_B;
        f.T_aL = -c_rot * st.z.w_L;
        f.T_aR = -c_rot * st.z.w_R;
        return f;
    };
}

}  // namespace fwmav
