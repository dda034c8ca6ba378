#include "fwmav/integrator.hpp"

#include <cmath>

namespace fwmav {

namespace {

using Vec21 = Eigen::Matrix<double, 21, 1>;

// Integration variables: momenta are integrated instead of velocities so no
// d/dt M(s) term is needed; z is recovered by solve_velocities at every
// evaluation.
struct Flow {
    Vec21 y;  // (momenta 12, r 3, Gamma 3, r_I 3)
    Rotation R_WLB, R_WRB, R_BI;
    double t;
};

struct Rates {
    Vec21 ydot;
    Vec3 w_L, w_R, w_B;  // algebra rates of the three rotations
};

Flow to_flow(const InertialParams& p, const ReducedState& st) {
    Flow f;
    f.y << momenta(p, st.pose.shape, st.z).stacked(), st.pose.r,
        st.pose.Gamma, st.r_I;
    f.R_WLB = st.pose.shape.R_WLB;
    f.R_WRB = st.pose.shape.R_WRB;
    f.R_BI = st.R_BI;
    f.t = st.t;
    return f;
}

ReducedState to_state(const InertialParams& p, const Flow& f) {
    ReducedState st;
    st.pose.shape = ShapeConfig{f.R_WLB, f.R_WRB};
    st.pose.r = f.y.segment<3>(12);
    st.pose.Gamma = f.y.segment<3>(15);
    st.z = solve_velocities(p, st.pose.shape, f.y.head<12>());
    st.R_BI = f.R_BI;
    st.r_I = f.y.segment<3>(18);
    st.t = f.t;
    return st;
}

ForceInputs total_forces(const ForceProvider& provider, const GaitSpec& gait,
                         const ReducedState& st) {
    ForceInputs f = provider(st);
    auto [tL, tR] = gait_torque(gait, st.t);
    f.T_cL += tL;
    f.T_cR += tR;
    return f;
}

Rates eval(const InertialParams& p, const Flow& fl,
           const ForceProvider& provider, const GaitSpec& gait) {
    const ReducedState st = to_state(p, fl);
    const StateDerivative d = reduced_rhs(p, st, total_forces(provider, gait, st));
    Rates r;
    r.ydot << d.momenta_dot, d.r_dot, d.Gamma_dot, d.r_I_dot;
    r.w_L = d.w_L;
    r.w_R = d.w_R;
    r.w_B = d.w_B;
    return r;
}

Flow step_mk4(const InertialParams& p, const Flow& f0,
              const ForceProvider& provider, const GaitSpec& gait, double h) {
    // Classical 4-stage tableau; rotation increments live in the algebra and
    // are corrected by the inverse right Jacobian (Munthe-Kaas).
    constexpr double c[4] = {0.0, 0.5, 0.5, 1.0};
    constexpr double a[4] = {0.0, 0.5, 0.5, 1.0};  // a_{i,i-1}
    constexpr double b[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};

    Rates k[4];
    Vec3 kt_L[4], kt_R[4], kt_B[4];  // dexpinv-corrected algebra rates
    for (int i = 0; i < 4; ++i) {
        Flow fi = f0;
        fi.t = f0.t + c[i] * h;
        Vec3 om_L = Vec3::Zero(), om_R = Vec3::Zero(), om_B = Vec3::Zero();
        if (i > 0) {
            fi.y = f0.y + h * a[i] * k[i - 1].ydot;
            om_L = h * a[i] * kt_L[i - 1];
            om_R = h * a[i] * kt_R[i - 1];
            om_B = h * a[i] * kt_B[i - 1];
            fi.R_WLB = f0.R_WLB * exp_so3(om_L);
            fi.R_WRB = f0.R_WRB * exp_so3(om_R);
            fi.R_BI = f0.R_BI * exp_so3(om_B);
        }
        k[i] = eval(p, fi, provider, gait);
        kt_L[i] = dexpinv_right(om_L) * k[i].w_L;
        kt_R[i] = dexpinv_right(om_R) * k[i].w_R;
        kt_B[i] = dexpinv_right(om_B) * k[i].w_B;
    }

    Flow f1 = f0;
    f1.t = f0.t + h;
    Vec3 om_L = Vec3::Zero(), om_R = Vec3::Zero(), om_B = Vec3::Zero();
    Vec21 dy = Vec21::Zero();
    for (int i = 0; i < 4; ++i) {
        dy += b[i] * k[i].ydot;
        om_L += b[i] * kt_L[i];
        om_R += b[i] * kt_R[i];
        om_B += b[i] * kt_B[i];
    }
    f1.y = f0.y + h * dy;
    f1.R_WLB = f0.R_WLB * exp_so3(h * om_L);
    f1.R_WRB = f0.R_WRB * exp_so3(h * om_R);
    f1.R_BI = f0.R_BI * exp_so3(h * om_B);
    return f1;
}

Flow step_rk4_project(const InertialParams& p, const Flow& f0,
                      const ForceProvider& provider, const GaitSpec& gait,
                      double h) {
    constexpr double c[4] = {0.0, 0.5, 0.5, 1.0};
    constexpr double a[4] = {0.0, 0.5, 0.5, 1.0};
    constexpr double b[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};

    const Mat3 RL0 = f0.R_WLB.matrix();
    const Mat3 RR0 = f0.R_WRB.matrix();
    const Mat3 RB0 = f0.R_BI.matrix();

    Rates k[4];
    Mat3 kRL[4], kRR[4], kRB[4];
    for (int i = 0; i < 4; ++i) {
        Flow fi = f0;
        fi.t = f0.t + c[i] * h;
        Mat3 RL = RL0, RR = RR0, RB = RB0;
        if (i > 0) {
            fi.y = f0.y + h * a[i] * k[i - 1].ydot;
            RL += h * a[i] * kRL[i - 1];
            RR += h * a[i] * kRR[i - 1];
            RB += h * a[i] * kRB[i - 1];
        }
        // Stage matrices are slightly non-orthogonal; that is inherent to
        // this variant and removed by the final projection.
        fi.R_WLB = Rotation::unsafe(RL);
        fi.R_WRB = Rotation::unsafe(RR);
        fi.R_BI = Rotation::unsafe(RB);
        k[i] = eval(p, fi, provider, gait);
        kRL[i] = RL * hat(k[i].w_L);
        kRR[i] = RR * hat(k[i].w_R);
        kRB[i] = RB * hat(k[i].w_B);
    }

    Flow f1 = f0;
    f1.t = f0.t + h;
    Vec21 dy = Vec21::Zero();
    Mat3 dRL = Mat3::Zero(), dRR = Mat3::Zero(), dRB = Mat3::Zero();
    for (int i = 0; i < 4; ++i) {
        dy += b[i] * k[i].ydot;
        dRL += b[i] * kRL[i];
        dRR += b[i] * kRR[i];
        dRB += b[i] * kRB[i];
    }
    f1.y = f0.y + h * dy;
    f1.R_WLB = project_so3(RL0 + h * dRL);
    f1.R_WRB = project_so3(RR0 + h * dRR);
    f1.R_BI = project_so3(RB0 + h * dRB);
    return f1;
}

Flow step_flow(const InertialParams& p, const Flow& f0,
               const ForceProvider& provider, const GaitSpec& gait,
               const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0 && cfg.dt <= 0.1)) {
        throw std::invalid_argument("dt must be in (0, 0.1]");
    }
    return cfg.method == Method::MK4
               ? step_mk4(p, f0, provider, gait, cfg.dt)
               : step_rk4_project(p, f0, provider, gait, cfg.dt);
}

}  // namespace

ReducedState step(const InertialParams& p, const ReducedState& st,
                  const ForceProvider& provider, const GaitSpec& gait,
                  const IntegratorConfig& cfg) {
    return to_state(p, step_flow(p, to_flow(p, st), provider, gait, cfg));
}

Diagnostics diagnostics(const InertialParams& p, const ReducedState& st) {
    const Vec3 e_z(0, 0, 1);
    const Mat3& RB = st.R_BI.matrix();

    // Potential through inertial heights, cross-checking the reduced form.
    const double V =
        p.g * (p.total_mass() * st.r_I.dot(e_z) +
               p.m_WL * (RB * (st.pose.shape.R_WLB * p.hbar_L)).dot(e_z) +
               p.m_WR * (RB * (st.pose.shape.R_WRB * p.hbar_R)).dot(e_z));

    const Momenta mom = momenta(p, st.pose.shape, st.z);
    Diagnostics d;
    d.energy = kinetic_energy(p, st.pose.shape, st.z) + V;
    d.pi_z = (RB * mom.pi_B + st.r_I.cross(RB * mom.p_lin)).dot(e_z);
    d.gamma_err = (st.pose.Gamma - RB.transpose() * e_z).norm();
    return d;
}

Trajectory simulate(const InertialParams& p, const ReducedState& st0,
                    const ForceProvider& provider, const GaitSpec& gait,
                    const IntegratorConfig& cfg, double duration) {
    if (duration <= 0.0) {
        throw std::invalid_argument("duration must be positive");
    }
    const long nsteps = std::max<long>(1, std::llround(duration / cfg.dt));
    const int every = std::max(1, cfg.record_every);

    Trajectory traj;
    traj.samples.reserve(static_cast<size_t>(nsteps / every) + 2);

    auto record = [&](const ReducedState& st) {
        traj.samples.push_back(Sample{st.t, st, total_forces(provider, gait, st),
                                      diagnostics(p, st)});
    };

    Flow fl = to_flow(p, st0);
    record(to_state(p, fl));
    for (long i = 0; i < nsteps; ++i) {
        fl = step_flow(p, fl, provider, gait, cfg);
        if (!fl.y.allFinite()) {
            throw NonFiniteError("state became non-finite", i);
        }
        if ((i + 1) % every == 0 || i + 1 == nsteps) {
            record(to_state(p, fl));
        }
    }
    return traj;
}

}  // namespace fwmav
