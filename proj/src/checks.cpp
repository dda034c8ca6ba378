#include "fwmav/checks.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fwmav/config.hpp"

namespace fwmav::checks {

namespace {

using Eigen::VectorXd;

Vec3 random_vec3(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return Vec3(u(rng), u(rng), u(rng));
}

// Stacks everything comparable between the reduced and oracle paths.
VectorXd state_stack(const ReducedState& st) {
    VectorXd s(3 + 9 + 3 + 12 + 9 + 9);
    Eigen::Index k = 0;
    s.segment<3>(k) = st.r_I; k += 3;
    s.segment<9>(k) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(
        st.R_BI.matrix().data()); k += 9;
    s.segment<3>(k) = st.pose.Gamma; k += 3;
    s.segment<12>(k) = st.z.stacked(); k += 12;
    s.segment<9>(k) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(
        st.pose.shape.R_WLB.matrix().data()); k += 9;
    s.segment<9>(k) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(
        st.pose.shape.R_WRB.matrix().data());
    return s;
}

Vec3 spatial_linear_momentum(const InertialParams& p, const ReducedState& st) {
    const Momenta m = momenta(p, st.pose.shape, st.z);
    return st.R_BI * m.p_lin;
}

Vec3 spatial_angular_momentum(const InertialParams& p, const ReducedState& st) {
    const Momenta m = momenta(p, st.pose.shape, st.z);
    return st.R_BI * m.pi_B + st.r_I.cross(st.R_BI * m.p_lin);
}

ReducedState conservative_initial_state() {
    ReducedState st;
    st.R_BI = exp_so3(Vec3(0.3, 0.2, 0.1));
    st.r_I = Vec3(0.1, -0.2, 0.3);
    st.pose.r = st.R_BI.transposed() * st.r_I;
    st.pose.Gamma = st.R_BI.transposed() * Vec3(0, 0, 1);
    st.pose.shape = ShapeConfig{exp_so3(Vec3(0.4, 0.1, -0.2)),
                                exp_so3(Vec3(-0.4, 0.2, 0.1))};
    st.z = VelocityZ{Vec3(0.4, -0.2, 0.6), Vec3(0.8, -0.6, 1.0),
                     Vec3(2.0, 1.0, -0.8), Vec3(-1.6, 1.2, 0.6)};
    return st;
}

GaitSpec test_gait() {
    GaitSpec g;
    g.amplitude = 0.05;
    g.frequency = 4.0;
    g.phase_L = 0.0;
    g.phase_R = std::numbers::pi;
    g.axis_L = Vec3(0, 1, 0);
    g.axis_R = Vec3(0, 1, 0);
    return g;
}

}  // namespace

InertialParams default_params() {
    InertialParams p;
    p.m_B = 1.2;
    p.m_WL = 0.18;
    p.m_WR = 0.22;
    p.I_B << 0.09, 0.005, 0.002,
             0.005, 0.11, 0.004,
             0.002, 0.004, 0.13;
    p.I_WL << 0.020, 0.001, 0.000,
              0.001, 0.015, 0.002,
              0.000, 0.002, 0.025;
    p.I_WR << 0.022, 0.000, 0.001,
              0.000, 0.017, 0.002,
              0.001, 0.002, 0.024;
    p.hbar_L = Vec3(0.02, 0.15, 0.01);
    p.hbar_R = Vec3(0.02, -0.16, 0.012);
    p.g = 9.81;
    p.rho = 1200.0;
    return p.validated();
}

Rotation random_rotation(std::mt19937_64& rng, double max_angle) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 axis(n(rng), n(rng), n(rng));
    while (axis.norm() < 1e-6) axis = Vec3(n(rng), n(rng), n(rng));
    axis.normalize();
    std::uniform_real_distribution<double> u(0.0, max_angle);
    return exp_so3(u(rng) * axis);
}

ReducedState random_state(std::mt19937_64& rng) {
    ReducedState st;
    st.R_BI = random_rotation(rng);
    st.r_I = random_vec3(rng, 1.0);
    st.pose.r = st.R_BI.transposed() * st.r_I;
    st.pose.Gamma = st.R_BI.transposed() * Vec3(0, 0, 1);
    st.pose.shape = ShapeConfig{random_rotation(rng, 1.0),
                                random_rotation(rng, 1.0)};
    st.z = VelocityZ{random_vec3(rng, 1.0), random_vec3(rng, 1.0),
                     random_vec3(rng, 1.0), random_vec3(rng, 1.0)};
    return st;
}

CheckResult lagrangian_equality(const InertialParams& p, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
        OracleState os;
        os.chart = Chart{random_rotation(rng), random_rotation(rng),
                         random_rotation(rng)};
        os.q.segment<3>(0) = random_vec3(rng, 0.7);
        os.q.segment<3>(3) = random_vec3(rng, 1.0);
        os.q.segment<3>(6) = random_vec3(rng, 0.7);
        os.q.segment<3>(9) = random_vec3(rng, 0.7);
        for (int i = 0; i < 12; ++i) os.qdot[i] = u(rng);

        const double L_full = full_lagrangian(p, os.chart, os.q, os.qdot);
        const ReducedState st = oracle_to_reduced(os);
        const double l_red = reduced_lagrangian(p, st.pose, st.z);
        worst = std::max(worst,
                         std::abs(L_full - l_red) / std::max(1.0, std::abs(L_full)));
    }
    return {"lagrangian_equality", worst, 1e-10, worst <= 1e-10};
}

CheckResult gradient_certification(const InertialParams& p, uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        const ReducedState st = random_state(rng);
        const ReducedPose& pose = st.pose;
        const VelocityZ& z = st.z;

        // momenta vs d(kinetic)/dz.
        worst = std::max(
            worst,
            fd_relative_error(
                [&](const VectorXd& x) {
                    return kinetic_energy(p, pose.shape,
                                          VelocityZ::from_stacked(x));
                },
                z.stacked(), momenta(p, pose.shape, z).stacked()));

        // dl_dr.
        worst = std::max(
            worst, fd_relative_error(
                       [&](const VectorXd& x) {
                           ReducedPose q = pose;
                           q.r = x;
                           return reduced_lagrangian(p, q, z);
                       },
                       pose.r, dl_dr(p, pose)));

        // dl_dGamma.
        worst = std::max(
            worst, fd_relative_error(
                       [&](const VectorXd& x) {
                           ReducedPose q = pose;
                           q.Gamma = x;
                           return reduced_lagrangian(p, q, z);
                       },
                       pose.Gamma, dl_dGamma(p, pose)));

        // shape_gradient along exponential directions, both wings.
        for (Wing w : {Wing::Left, Wing::Right}) {
            worst = std::max(
                worst,
                fd_relative_error(
                    [&](const VectorXd& eta) {
                        ReducedPose q = pose;
                        const Rotation pert = exp_so3(Vec3(eta));
                        if (w == Wing::Left)
                            q.shape.R_WLB = q.shape.R_WLB * pert;
                        else
                            q.shape.R_WRB = q.shape.R_WRB * pert;
                        return reduced_lagrangian(p, q, z);
                    },
                    Vec3::Zero(), shape_gradient(p, pose, z, w)));
        }
    }
    return {"gradcheck", worst, 1e-6, worst <= 1e-6};
}

std::vector<CheckResult> oracle_equivalence(const InertialParams& p,
                                            uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double dt = 1e-4;
    const double horizon = 0.5;
    const int compare_every = 100;

    auto run_case = [&](bool forced) {
        double worst = 0.0;
        const GaitSpec gait = forced ? test_gait() : GaitSpec{};
        const ForceProvider provider = zero_force_provider();
        for (int ic = 0; ic < 10; ++ic) {
            const ReducedState st0 = random_state(rng);
            IntegratorConfig cfg{dt, Method::MK4, compare_every};
            const Trajectory red =
                simulate(p, st0, provider, gait, cfg, horizon);
            const auto orc =
                oracle_simulate(p, st0, provider, gait, dt, horizon);
            for (size_t i = 0; i < red.samples.size(); ++i) {
                const size_t oi = std::min(
                    orc.size() - 1,
                    static_cast<size_t>(i) * compare_every);
                const VectorXd a = state_stack(red.samples[i].state);
                const VectorXd b = state_stack(orc[oi]);
                worst = std::max(worst,
                                 (a - b).norm() / std::max(1.0, b.norm()));
            }
        }
        return worst;
    };

    const double w_un = run_case(false);
    const double w_fo = run_case(true);
    return {{"oracle_unforced", w_un, 1e-4, w_un <= 1e-4},
            {"oracle_forced", w_fo, 1e-4, w_fo <= 1e-4}};
}

CheckResult energy_conservation(const InertialParams& p) {
    const ReducedState st0 = conservative_initial_state();
    IntegratorConfig cfg{1e-4, Method::MK4, 100};
    const Trajectory traj =
        simulate(p, st0, zero_force_provider(), GaitSpec{}, cfg, 10.0);
    const double E0 = traj.samples.front().diag.energy;
    double drift = 0.0;
    for (const Sample& s : traj.samples) {
        drift = std::max(drift, std::abs(s.diag.energy - E0));
    }
    const double rel = drift / std::max(1.0, std::abs(E0));
    return {"energy_conservation", rel, 1e-6, rel <= 1e-6};
}

CheckResult so2_momentum(const InertialParams& p) {
    const ReducedState st0 = conservative_initial_state();
    IntegratorConfig cfg{1e-4, Method::MK4, 100};
    const Trajectory traj =
        simulate(p, st0, zero_force_provider(), test_gait(), cfg, 5.0);
    const double pz0 = traj.samples.front().diag.pi_z;
    double drift = 0.0;
    for (const Sample& s : traj.samples) {
        drift = std::max(drift, std::abs(s.diag.pi_z - pz0));
    }
    const double rel = drift / std::max(1.0, std::abs(pz0));
    return {"so2_momentum", rel, 1e-6, rel <= 1e-6};
}

std::vector<CheckResult> full_symmetry_g0(const InertialParams& p_in) {
    InertialParams p = p_in;
    p.g = 0.0;
    const ReducedState st0 = conservative_initial_state();
    IntegratorConfig cfg{1e-4, Method::MK4, 100};
    const Trajectory traj =
        simulate(p, st0, zero_force_provider(), test_gait(), cfg, 5.0);
    const Vec3 pi0 = spatial_angular_momentum(p, traj.samples.front().state);
    const Vec3 P0 = spatial_linear_momentum(p, traj.samples.front().state);
    double da = 0.0, dl = 0.0;
    for (const Sample& s : traj.samples) {
        da = std::max(da,
                      (spatial_angular_momentum(p, s.state) - pi0).norm());
        dl = std::max(dl, (spatial_linear_momentum(p, s.state) - P0).norm());
    }
    const double ra = da / std::max(1.0, pi0.norm());
    const double rl = dl / std::max(1.0, P0.norm());
    return {{"symmetry_g0_angular", ra, 1e-6, ra <= 1e-6},
            {"symmetry_g0_linear", rl, 1e-6, rl <= 1e-6}};
}

std::vector<CheckResult> gamma_fidelity(const InertialParams& p) {
    const ReducedState st0 = conservative_initial_state();
    IntegratorConfig cfg{1e-4, Method::MK4, 10};
    const Trajectory traj =
        simulate(p, st0, zero_force_provider(), GaitSpec{}, cfg, 10.0);
    double norm_err = 0.0, cons_err = 0.0;
    for (const Sample& s : traj.samples) {
        norm_err =
            std::max(norm_err, std::abs(s.state.pose.Gamma.norm() - 1.0));
        cons_err = std::max(cons_err, s.diag.gamma_err);
    }
    return {{"gamma_norm", norm_err, 1e-9, norm_err <= 1e-9},
            {"gamma_consistency", cons_err, 1e-6, cons_err <= 1e-6}};
}

CheckResult integrator_order(const InertialParams& p) {
    const ReducedState st0 = conservative_initial_state();
    const double horizon = 0.1;
    auto endpoint = [&](double dt) {
        IntegratorConfig cfg{dt, Method::MK4, 1 << 20};
        const Trajectory t =
            simulate(p, st0, zero_force_provider(), GaitSpec{}, cfg, horizon);
        return state_stack(t.samples.back().state);
    };
    const VectorXd ref = endpoint(1e-5);
    const double e1 = (endpoint(4e-3) - ref).norm();
    const double e2 = (endpoint(2e-3) - ref).norm();
    const double ratio = e1 / e2;
    // ratio in [12, 20] (nominal 16) encoded as |ratio - 16| <= 4.
    const double measured = std::abs(ratio - 16.0);
    return {"integrator_order", measured, 4.0, measured <= 4.0};
}

CheckResult free_fall(const InertialParams& p_in) {
    // Wing COM offsets zeroed so no body swings during the fall; translation
    // is then exactly polynomial in time.
    InertialParams p = p_in;
    p.hbar_L.setZero();
    p.hbar_R.setZero();
    ReducedState st0;  // rest, identity attitude
    IntegratorConfig cfg{1e-3, Method::MK4, 1 << 20};
    const Trajectory traj =
        simulate(p, st0, zero_force_provider(), GaitSpec{}, cfg, 1.0);
    const double z_final = traj.samples.back().state.r_I.z();
    const double expected = -0.5 * p.g;
    const double rel = std::abs(z_final - expected) / std::abs(expected);
    return {"free_fall", rel, 1e-10, rel <= 1e-10};
}

CheckResult determinism(const InertialParams& p) {
    const ReducedState st0 = conservative_initial_state();
    IntegratorConfig cfg{1e-3, Method::MK4, 10};
    auto run_csv = [&]() {
        const Trajectory t = simulate(p, st0, linear_damping_provider(0.1, 0.01),
                                      test_gait(), cfg, 0.2);
        std::ostringstream os;
        write_trajectory_csv(os, t);
        return os.str();
    };
    const bool same = run_csv() == run_csv();
    return {"determinism", same ? 0.0 : 1.0, 0.5, same};
}

std::vector<CheckResult> run_all(const InertialParams& p, uint64_t seed,
                                 const std::string& only,
                                 double tolerance_scale) {
    std::vector<CheckResult> all;
    auto want = [&](const char* name) {
        return only.empty() || std::string(name).find(only) != std::string::npos;
    };

    if (want("lagrangian_equality")) all.push_back(lagrangian_equality(p, seed));
    if (want("gradcheck")) all.push_back(gradient_certification(p, seed));
    if (want("oracle")) {
        for (auto& r : oracle_equivalence(p, seed)) all.push_back(r);
    }
    if (want("energy_conservation")) all.push_back(energy_conservation(p));
    if (want("so2_momentum")) all.push_back(so2_momentum(p));
    if (want("symmetry_g0")) {
        for (auto& r : full_symmetry_g0(p)) all.push_back(r);
    }
    if (want("gamma")) {
        for (auto& r : gamma_fidelity(p)) all.push_back(r);
    }
    if (want("integrator_order")) all.push_back(integrator_order(p));
    if (want("free_fall")) all.push_back(free_fall(p));
    if (want("determinism")) all.push_back(determinism(p));

    for (auto& r : all) {
        r.tolerance *= tolerance_scale;
        r.pass = r.measured <= r.tolerance;
    }
    return all;
}

}  // namespace fwmav::checks
