#include "fwmav/model.hpp"

#include <Eigen/Eigenvalues>

namespace fwmav {

namespace {

void check_inertia(const Mat3& I, const char* name) {
    if ((I - I.transpose()).norm() > 1e-12) {
        throw InvalidParamsError(std::string(name) + " not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(I);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw InvalidParamsError(std::string(name) +
                                 " not positive-definite");
    }
}

}  // namespace

const InertialParams& InertialParams::validated() const {
    if (m_B <= 0.0) throw InvalidParamsError("m_B must be positive");
    if (m_WL <= 0.0) throw InvalidParamsError("m_WL must be positive");
    if (m_WR <= 0.0) throw InvalidParamsError("m_WR must be positive");
    if (g < 0.0) throw InvalidParamsError("g must be nonnegative");
    check_inertia(I_B, "I_B");
    check_inertia(I_WL, "I_WL");
    check_inertia(I_WR, "I_WR");
    return *this;
}

Mat12 assemble_mass_matrix(const InertialParams& p, const ShapeConfig& s) {
    const Mat3& RL = s.R_WLB.matrix();
    const Mat3& RR = s.R_WRB.matrix();

    Mat12 M = Mat12::Zero();
    M.block<3, 3>(0, 0) = p.total_mass() * Mat3::Identity();
    M.block<3, 3>(3, 3) = p.I_B + RL * p.I_WL * RL.transpose() +
                          RR * p.I_WR * RR.transpose();
    M.block<3, 3>(6, 6) = p.I_WL;
    M.block<3, 3>(9, 9) = p.I_WR;

    // Coupling between the body rate (body frame) and the wing rates (wing
    // frames): the cross term of the wing kinetic energy is w_B^T (R I_W) w_W.
    const Mat3 m23 = RL * p.I_WL;
    const Mat3 m24 = RR * p.I_WR;
    M.block<3, 3>(3, 6) = m23;
    M.block<3, 3>(6, 3) = m23.transpose();
    M.block<3, 3>(3, 9) = m24;
    M.block<3, 3>(9, 3) = m24.transpose();
    return M;
}

double kinetic_energy(const InertialParams& p, const ShapeConfig& s,
                      const VelocityZ& z) {
    const Vec12 zs = z.stacked();
    return 0.5 * zs.dot(assemble_mass_matrix(p, s) * zs);
}

double potential_energy(const InertialParams& p, const ReducedPose& pose) {
    return p.g * (p.total_mass() * pose.r.dot(pose.Gamma) +
                  p.m_WL * (pose.shape.R_WLB * p.hbar_L).dot(pose.Gamma) +
                  p.m_WR * (pose.shape.R_WRB * p.hbar_R).dot(pose.Gamma));
}

double reduced_lagrangian(const InertialParams& p, const ReducedPose& pose,
                          const VelocityZ& z) {
    return kinetic_energy(p, pose.shape, z) - potential_energy(p, pose);
}

Momenta momenta(const InertialParams& p, const ShapeConfig& s,
                const VelocityZ& z) {
    return Momenta::from_stacked(assemble_mass_matrix(p, s) * z.stacked());
}

Vec3 dl_dr(const InertialParams& p, const ReducedPose& pose) {
    return -p.total_mass() * p.g * pose.Gamma;
}

Vec3 dl_dGamma(const InertialParams& p, const ReducedPose& pose) {
    return -p.g * (p.total_mass() * pose.r +
                   p.m_WL * (pose.shape.R_WLB * p.hbar_L) +
                   p.m_WR * (pose.shape.R_WRB * p.hbar_R));
}

Vec3 shape_gradient(const InertialParams& p, const ReducedPose& pose,
                    const VelocityZ& z, Wing wing) {
    const bool left = (wing == Wing::Left);
    const Rotation& R = left ? pose.shape.R_WLB : pose.shape.R_WRB;
    const Mat3& I_W = left ? p.I_WL : p.I_WR;
    const Vec3& hbar = left ? p.hbar_L : p.hbar_R;
    const Vec3& w_W = left ? z.w_L : z.w_R;
    const double m_W = left ? p.m_WL : p.m_WR;

    // Kinetic part: with a = R^T w_B the R-dependent terms are
    // 0.5 a^T I a + a^T I w_W, whose trivialized gradient is (I(a + w_W)) x a.
    const Vec3 a = R.transposed() * z.w_B;
    const Vec3 tau_kin = (I_W * (a + w_W)).cross(a);

    // Potential enters l with a minus sign: -m g <R hbar, Gamma>.
    const Vec3 tau_pot = -m_W * p.g * hbar.cross(R.transposed() * pose.Gamma);
    return tau_kin + tau_pot;
}

}  // namespace fwmav
