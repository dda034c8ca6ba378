#pragma once

#include "fwmav/so3.hpp"

namespace fwmav {

struct InvalidParamsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Masses, inertias and wing center-of-mass offsets. Wing frames sit at the
/// hinge (torso center of mass); wing inertias are about the hinge, and
/// hbar_L / hbar_R are the wing COM offsets expressed in the wing frames.
struct InertialParams {
    double m_B = 1.0, m_WL = 0.1, m_WR = 0.1;     // kg
    Mat3 I_B = Mat3::Identity();                   // kg m^2, about body COM
    Mat3 I_WL = Mat3::Identity();                  // kg m^2, about hinge
    Mat3 I_WR = Mat3::Identity();
    Vec3 hbar_L = Vec3::Zero();                    // m, wing frame
    Vec3 hbar_R = Vec3::Zero();
    double g = 9.81;                               // m/s^2
    double rho = 1000.0;                           // kg/m^3, informational

    double total_mass() const { return m_B + m_WL + m_WR; }

    /// Throws InvalidParamsError on nonpositive mass, asymmetric or
    /// non-positive-definite inertia, or negative g. Returns *this.
    const InertialParams& validated() const;
};

struct ShapeConfig {
    Rotation R_WLB;  // left wing attitude relative to body
    Rotation R_WRB;
};

/// Stacked body-frame velocities: (v, w_B, w_L, w_R).
/// v is the body-frame representation of the inertial translational velocity;
/// w_L / w_R are the wing angular velocities relative to the body, expressed
/// in the wing frames.
struct VelocityZ {
    Vec3 v = Vec3::Zero();    // m/s
    Vec3 w_B = Vec3::Zero();  // rad/s
    Vec3 w_L = Vec3::Zero();
    Vec3 w_R = Vec3::Zero();

    Vec12 stacked() const {
        Vec12 z;
        z << v, w_B, w_L, w_R;
        return z;
    }
    static VelocityZ from_stacked(const Vec12& z) {
        return {z.segment<3>(0), z.segment<3>(3), z.segment<3>(6),
                z.segment<3>(9)};
    }
};

/// Reduced configuration: body-frame position, advected gravity direction
/// Gamma = R_BI^T e_z, and the two wing shapes.
struct ReducedPose {
    Vec3 r = Vec3::Zero();          // m, body frame
    Vec3 Gamma = Vec3(0, 0, 1);     // unit vector
    ShapeConfig shape;
};

enum class Wing { Left, Right };

/// Configuration-dependent 12x12 mass matrix, block order (v, w_B, w_L, w_R).
Mat12 assemble_mass_matrix(const InertialParams& p, const ShapeConfig& s);

/// 0.5 * z^T M(s) z.
double kinetic_energy(const InertialParams& p, const ShapeConfig& s,
                      const VelocityZ& z);

/// m_T g <r, Gamma> + m_WL g <R_WLB hbar_L, Gamma> + m_WR g <R_WRB hbar_R, Gamma>.
double potential_energy(const InertialParams& p, const ReducedPose& pose);

double reduced_lagrangian(const InertialParams& p, const ReducedPose& pose,
                          const VelocityZ& z);

struct Momenta {
    Vec3 p_lin, pi_B, mu_L, mu_R;

    Vec12 stacked() const {
        Vec12 m;
        m << p_lin, pi_B, mu_L, mu_R;
        return m;
    }
    static Momenta from_stacked(const Vec12& m) {
        return {m.segment<3>(0), m.segment<3>(3), m.segment<3>(6),
                m.segment<3>(9)};
    }
};

/// The four 3-blocks of M(s) * z.
Momenta momenta(const InertialParams& p, const ShapeConfig& s,
                const VelocityZ& z);

/// dl/dr = -m_T g Gamma.
Vec3 dl_dr(const InertialParams& p, const ReducedPose& pose);

/// dl/dGamma = -g (m_T r + m_WL R_WLB hbar_L + m_WR R_WRB hbar_R).
Vec3 dl_dGamma(const InertialParams& p, const ReducedPose& pose);

/// Left-trivialized gradient of the reduced Lagrangian in the wing rotation:
/// <tau, eta> = d/de|0 l(R_W exp(e hat(eta))) at fixed velocities.
Vec3 shape_gradient(const InertialParams& p, const ReducedPose& pose,
                    const VelocityZ& z, Wing wing);

}  // namespace fwmav
