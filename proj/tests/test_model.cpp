#include <doctest.h>

#include <random>

#include "fwmav/checks.hpp"
#include "fwmav/model.hpp"
#include "fwmav/oracle.hpp"

using namespace fwmav;

namespace {

std::mt19937_64 rng(777);

// Six-point discretization with the given mass and inertia about the frame
// origin and zero first moment. Independent route for kinetic energy: the
// inertia integral I = sum m_i hat(X_i)^T hat(X_i) is reproduced exactly by
// point masses placed pairwise along the eigenvectors of the second-moment
// matrix S = tr(I)/2 * Id - I.
struct PointCloud {
    std::vector<double> mass;
    std::vector<Vec3> X;
};

PointCloud discretize(double m, const Mat3& I) {
    const Mat3 S = 0.5 * I.trace() * Mat3::Identity() - I;
    Eigen::SelfAdjointEigenSolver<Mat3> es(S);
    PointCloud pc;
    for (int k = 0; k < 3; ++k) {
        const double s = std::max(0.0, es.eigenvalues()[k]);
        const double a = std::sqrt(3.0 * s / m);
        const Vec3 dir = es.eigenvectors().col(k);
        pc.mass.push_back(m / 6.0);
        pc.X.push_back(a * dir);
        pc.mass.push_back(m / 6.0);
        pc.X.push_back(-a * dir);
    }
    return pc;
}

// Kinetic energy summed over point masses using the body-frame kinematics:
// torso points move with v + w_B x X, wing points with
// v + (hat(w_B) R_WB + R_WB hat(w_W)) X.
double pointmass_kinetic(const InertialParams& p, const ShapeConfig& s,
                         const VelocityZ& z) {
    double T = 0.0;
    const PointCloud body = discretize(p.m_B, p.I_B);
    for (size_t i = 0; i < body.X.size(); ++i) {
        T += 0.5 * body.mass[i] * (z.v + z.w_B.cross(body.X[i])).squaredNorm();
    }
    const auto wing = [&](double m, const Mat3& I, const Rotation& R,
                          const Vec3& w_W) {
        const PointCloud pc = discretize(m, I);
        const Mat3 vel_map = hat(z.w_B) * R.matrix() + R.matrix() * hat(w_W);
        double Tw = 0.0;
        for (size_t i = 0; i < pc.X.size(); ++i) {
            Tw += 0.5 * pc.mass[i] * (z.v + vel_map * pc.X[i]).squaredNorm();
        }
        return Tw;
    };
    T += wing(p.m_WL, p.I_WL, s.R_WLB, z.w_L);
    T += wing(p.m_WR, p.I_WR, s.R_WRB, z.w_R);
    return T;
}

// Any R_BI with R_BI^T e_z = Gamma (Gamma unit).
Rotation attitude_from_gamma(const Vec3& Gamma) {
    const Vec3 e_z(0, 0, 1);
    const Vec3 axis = Gamma.cross(e_z);
    const double s = axis.norm();
    const double c = Gamma.dot(e_z);
    if (s < 1e-12) {
        return c > 0 ? Rotation::identity() : exp_so3(Vec3(std::numbers::pi, 0, 0));
    }
    return exp_so3(std::atan2(s, c) * axis / s);
}

}  // namespace

TEST_CASE("mass matrix blocks at identity shape") {
    const InertialParams p = checks::default_params();
    const ShapeConfig s;  // both wings at identity
    const Mat12 M = assemble_mass_matrix(p, s);

    CHECK((M.block<3, 3>(0, 0) - p.total_mass() * Mat3::Identity()).norm() <
          1e-14);
    CHECK((M.block<3, 3>(3, 3) - (p.I_B + p.I_WL + p.I_WR)).norm() < 1e-14);
    CHECK((M.block<3, 3>(6, 6) - p.I_WL).norm() == 0.0);
    CHECK((M.block<3, 3>(9, 9) - p.I_WR).norm() == 0.0);
    CHECK((M.block<3, 3>(3, 6) - p.I_WL).norm() < 1e-14);
    CHECK((M.block<3, 3>(3, 9) - p.I_WR).norm() < 1e-14);
    CHECK(M.block<3, 3>(0, 3).isZero(0.0));
}

TEST_CASE("isotropic wing inertia gives isotropic coupling") {
    InertialParams p = checks::default_params();
    p.I_WL = 0.03 * Mat3::Identity();
    const Mat12 M = assemble_mass_matrix(p, ShapeConfig{});
    CHECK((M.block<3, 3>(3, 6) - 0.03 * Mat3::Identity()).norm() < 1e-15);
}

TEST_CASE("mass matrix symmetric positive-definite over random shapes") {
    const InertialParams p = checks::default_params();
    for (int i = 0; i < 1000; ++i) {
        const ShapeConfig s{checks::random_rotation(rng),
                            checks::random_rotation(rng)};
        const Mat12 M = assemble_mass_matrix(p, s);
        CHECK((M - M.transpose()).norm() < 1e-10);
        Eigen::SelfAdjointEigenSolver<Mat12> es(M);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("kinetic energy matches the point-mass summation") {
    const InertialParams p = checks::default_params();
    for (int i = 0; i < 200; ++i) {
        const ReducedState st = checks::random_state(rng);
        const double T = kinetic_energy(p, st.pose.shape, st.z);
        const double T_pts = pointmass_kinetic(p, st.pose.shape, st.z);
        CHECK(T == doctest::Approx(T_pts).epsilon(1e-11));
    }
}

TEST_CASE("kinetic energy edge cases") {
    const InertialParams p = checks::default_params();
    CHECK(kinetic_energy(p, ShapeConfig{}, VelocityZ{}) == 0.0);

    VelocityZ z;
    z.v = Vec3(1.5, -0.5, 2.0);
    CHECK(kinetic_energy(p, ShapeConfig{}, z) ==
          doctest::Approx(0.5 * p.total_mass() * z.v.squaredNorm())
              .epsilon(1e-14));

    for (int i = 0; i < 50; ++i) {
        const ReducedState st = checks::random_state(rng);
        if (st.z.stacked().norm() > 1e-9) {
            CHECK(kinetic_energy(p, st.pose.shape, st.z) > 0.0);
        }
    }
}

TEST_CASE("potential energy vs inertial-height summation") {
    InertialParams p = checks::default_params();

    ReducedPose pose;
    pose.r = Vec3::Zero();
    InertialParams pz = p;
    pz.hbar_L.setZero();
    pz.hbar_R.setZero();
    CHECK(potential_energy(pz, pose) == 0.0);

    pose.r = Vec3(0, 0, 2.5);
    CHECK(potential_energy(pz, pose) ==
          doctest::Approx(pz.total_mass() * pz.g * 2.5).epsilon(1e-14));

    for (int i = 0; i < 100; ++i) {
        const ReducedState st = checks::random_state(rng);
        const Rotation R_BI = attitude_from_gamma(st.pose.Gamma);
        const Vec3 e_z(0, 0, 1);
        const Vec3 r_I = R_BI * st.pose.r;
        const double V_heights =
            p.g * (p.total_mass() * r_I.dot(e_z) +
                   p.m_WL *
                       (R_BI * (st.pose.shape.R_WLB * p.hbar_L)).dot(e_z) +
                   p.m_WR *
                       (R_BI * (st.pose.shape.R_WRB * p.hbar_R)).dot(e_z));
        CHECK(potential_energy(p, st.pose) ==
              doctest::Approx(V_heights).epsilon(1e-11));
    }
}

TEST_CASE("reduced lagrangian recomposition") {
    const InertialParams p = checks::default_params();
    for (int i = 0; i < 100; ++i) {
        const ReducedState st = checks::random_state(rng);
        const double l = reduced_lagrangian(p, st.pose, st.z);
        const double T = kinetic_energy(p, st.pose.shape, st.z);
        const double V = potential_energy(p, st.pose);
        CHECK(l + V == doctest::Approx(T).epsilon(1e-12));
    }
}

TEST_CASE("momenta block rows at identity shape") {
    const InertialParams p = checks::default_params();
    CHECK(momenta(p, ShapeConfig{}, VelocityZ{}).stacked().norm() == 0.0);

    VelocityZ z;
    z.w_B = Vec3(0.3, -0.7, 1.1);
    const Momenta m = momenta(p, ShapeConfig{}, z);
    CHECK((m.pi_B - (p.I_B + p.I_WL + p.I_WR) * z.w_B).norm() < 1e-13);
    CHECK((m.mu_L - p.I_WL * z.w_B).norm() < 1e-14);
    CHECK((m.mu_R - p.I_WR * z.w_B).norm() < 1e-14);
    CHECK(m.p_lin.norm() == 0.0);
}

TEST_CASE("analytic partials match finite differences") {
    const InertialParams p = checks::default_params();
    const auto res = checks::gradient_certification(p, 2024);
    CHECK(res.pass);
    CHECK(res.measured <= 1e-6);
}

TEST_CASE("shape gradient special cases") {
    InertialParams p = checks::default_params();

    // z = 0, g = 0
    InertialParams p0 = p;
    p0.g = 0.0;
    ReducedPose pose;
    CHECK(shape_gradient(p0, pose, VelocityZ{}, Wing::Left).norm() == 0.0);

    // z = 0, identity shape: only the potential term remains
    p.hbar_L = Vec3(0, 0.2, 0);
    pose.Gamma = Vec3(0, 0, 1);
    const Vec3 tau = shape_gradient(p, pose, VelocityZ{}, Wing::Left);
    const Vec3 expected = -p.m_WL * p.g * p.hbar_L.cross(pose.Gamma);
    CHECK((tau - expected).norm() < 1e-14);
    // direction: hbar along +y, Gamma along +z -> torque about -x
    CHECK(tau.x() < 0.0);
    CHECK(std::abs(tau.y()) < 1e-15);
    CHECK(std::abs(tau.z()) < 1e-15);
}

TEST_CASE("parameter validation") {
    InertialParams p = checks::default_params();
    p.m_B = -1.0;
    CHECK_THROWS_AS(p.validated(), InvalidParamsError);

    p = checks::default_params();
    p.I_WL(0, 1) += 1e-3;  // asymmetric
    CHECK_THROWS_AS(p.validated(), InvalidParamsError);

    p = checks::default_params();
    p.I_B = -Mat3::Identity();
    CHECK_THROWS_AS(p.validated(), InvalidParamsError);

    p = checks::default_params();
    p.g = -9.81;
    CHECK_THROWS_AS(p.validated(), InvalidParamsError);
}
