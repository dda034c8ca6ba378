#include "fwmav/oracle.hpp"

#include <cmath>
#include <numbers>

namespace fwmav {

namespace {

// First derivatives use a small step; second-difference formulas use larger
// steps to keep roundoff below the certification tolerances (the kinetic
// energy is exactly quadratic in qdot, so the wider stencils carry no
// truncation error there).
constexpr double kH1 = 1e-6;       // dL/dq
constexpr double kH2 = 1e-3;       // d^2L/dqdot^2 and dL/dqdot
constexpr double kHmix = 1e-5;     // directional derivative in q

struct Frames {
    Rotation R_BI, R_WLB, R_WRB;
    Vec3 w_B, w_L, w_R;  // body/wing-frame angular velocities
    Vec3 r_I, rdot_I;
};

Frames kinematics(const Chart& chart, const Vec12& q, const Vec12& qdot) {
    const Vec3 th_B = q.segment<3>(0);
    const Vec3 th_L = q.segment<3>(6);
    const Vec3 th_R = q.segment<3>(9);
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (th_B.norm() >= half_pi || th_L.norm() >= half_pi ||
        th_R.norm() >= half_pi) {
        throw ChartOverflowError("chart coordinate left the half-width pi/2");
    }
    Frames f;
    f.R_BI = chart.R_B0 * exp_so3(th_B);
    f.R_WLB = chart.R_WL0 * exp_so3(th_L);
    f.R_WRB = chart.R_WR0 * exp_so3(th_R);
    f.w_B = dexp_right(th_B) * qdot.segment<3>(0);
    f.w_L = dexp_right(th_L) * qdot.segment<3>(6);
    f.w_R = dexp_right(th_R) * qdot.segment<3>(9);
    f.r_I = q.segment<3>(3);
    f.rdot_I = qdot.segment<3>(3);
    return f;
}

// Rotations and right Jacobians depend on q only; hoisting them lets the
// many qdot-stencil evaluations in oracle_accel run on cached matrices.
struct KinQ {
    Mat3 R_WLB_T, R_WRB_T;  // transposes, the only forms needed below
    Mat3 Jr_B, Jr_L, Jr_R;
};

KinQ kin_of_q(const Chart& chart, const Vec12& q) {
    const Vec3 th_B = q.segment<3>(0);
    const Vec3 th_L = q.segment<3>(6);
    const Vec3 th_R = q.segment<3>(9);
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (th_B.norm() >= half_pi || th_L.norm() >= half_pi ||
        th_R.norm() >= half_pi) {
        throw ChartOverflowError("chart coordinate left the half-width pi/2");
    }
    KinQ k;
    k.R_WLB_T = (chart.R_WL0 * exp_so3(th_L)).matrix().transpose();
    k.R_WRB_T = (chart.R_WR0 * exp_so3(th_R)).matrix().transpose();
    k.Jr_B = dexp_right(th_B);
    k.Jr_L = dexp_right(th_L);
    k.Jr_R = dexp_right(th_R);
    return k;
}

// Kinetic energy at cached q; the potential is constant across the
// qdot stencils and cancels in every difference that uses this.
double kinetic_of(const InertialParams& p, const KinQ& k, const Vec12& qdot) {
    const Vec3 w_B = k.Jr_B * qdot.segment<3>(0);
    const Vec3 Om_L = k.R_WLB_T * w_B + k.Jr_L * qdot.segment<3>(6);
    const Vec3 Om_R = k.R_WRB_T * w_B + k.Jr_R * qdot.segment<3>(9);
    return 0.5 * p.total_mass() * qdot.segment<3>(3).squaredNorm() +
           0.5 * w_B.dot(p.I_B * w_B) + 0.5 * Om_L.dot(p.I_WL * Om_L) +
           0.5 * Om_R.dot(p.I_WR * Om_R);
}

}  // namespace

double full_lagrangian(const InertialParams& p, const Chart& chart,
                       const Vec12& q, const Vec12& qdot,
                       const Vec3& gravity_dir) {
    const Frames f = kinematics(chart, q, qdot);

    // Wings are hinged at the torso COM: each wing translates with the hinge
    // and rotates with total angular velocity R_WB^T w_B + w_W (wing frame).
    const Vec3 Om_L = f.R_WLB.transposed() * f.w_B + f.w_L;
    const Vec3 Om_R = f.R_WRB.transposed() * f.w_B + f.w_R;

    const double T = 0.5 * p.total_mass() * f.rdot_I.squaredNorm() +
                     0.5 * f.w_B.dot(p.I_B * f.w_B) +
                     0.5 * Om_L.dot(p.I_WL * Om_L) +
                     0.5 * Om_R.dot(p.I_WR * Om_R);

    const double V =
        p.g * (p.total_mass() * f.r_I.dot(gravity_dir) +
               p.m_WL * (f.R_BI * (f.R_WLB * p.hbar_L)).dot(gravity_dir) +
               p.m_WR * (f.R_BI * (f.R_WRB * p.hbar_R)).dot(gravity_dir));
    return T - V;
}

Vec12 chart_generalized_forces(const InertialParams& p, const Chart& chart,
                               const Vec12& q, const Vec12& qdot,
                               const ForceInputs& f) {
    (void)p;
    // Stacked body velocities (v, w_B, w_L, w_R) paired with the inputs.
    auto velocities = [&](const Vec12& qd) -> Vec12 {
        const Frames fr = kinematics(chart, q, qd);
        Vec12 Z;
        Z << fr.R_BI.transposed() * fr.rdot_I, fr.w_B, fr.w_L, fr.w_R;
        return Z;
    };
    Vec12 F;
    F << f.F_a, f.T_aB, f.T_aL + f.T_cL, f.T_aR + f.T_cR;

    Vec12 Q = Vec12::Zero();
    for (int i = 0; i < 12; ++i) {
        Vec12 e = Vec12::Zero();
        e[i] = kH1;
        const Vec12 col = (velocities(qdot + e) - velocities(qdot - e)) /
                          (2.0 * kH1);
        Q[i] = col.dot(F);
    }
    return Q;
}

Vec12 oracle_accel(const InertialParams& p, const Chart& chart,
                   const Vec12& q, const Vec12& qdot,
                   const Vec12& generalized_forces) {
    // A = d^2L/dqdot^2, symmetric four-point stencil on cached kinematics.
    const KinQ kq = kin_of_q(chart, q);
    Mat12 A;
    for (int i = 0; i < 12; ++i) {
        for (int j = i; j < 12; ++j) {
            Vec12 ei = Vec12::Zero(), ej = Vec12::Zero();
            ei[i] = kH2;
            ej[j] = kH2;
            const double v =
                (kinetic_of(p, kq, qdot + ei + ej) -
                 kinetic_of(p, kq, qdot + ei - ej) -
                 kinetic_of(p, kq, qdot - ei + ej) +
                 kinetic_of(p, kq, qdot - ei - ej)) /
                (4.0 * kH2 * kH2);
            A(i, j) = v;
            A(j, i) = v;
        }
    }

    // dL/dq.
    Vec12 dLdq;
    for (int i = 0; i < 12; ++i) {
        Vec12 e = Vec12::Zero();
        e[i] = kH1;
        dLdq[i] = (full_lagrangian(p, chart, q + e, qdot) -
                   full_lagrangian(p, chart, q - e, qdot)) /
                  (2.0 * kH1);
    }

    // (d^2L/dq dqdot) qdot as a directional derivative of dL/dqdot along qdot.
    auto dLdqdot = [&](const Vec12& qq) {
        const KinQ kk = kin_of_q(chart, qq);
        Vec12 g;
        for (int i = 0; i < 12; ++i) {
            Vec12 e = Vec12::Zero();
            e[i] = kH2;
            g[i] = (kinetic_of(p, kk, qdot + e) -
                    kinetic_of(p, kk, qdot - e)) /
                   (2.0 * kH2);
        }
        return g;
    };
    Vec12 mixed = Vec12::Zero();
    const double qdn = qdot.norm();
    if (qdn > 0.0) {
        const Vec12 u = qdot / qdn;
        mixed = qdn * (dLdqdot(q + kHmix * u) - dLdqdot(q - kHmix * u)) /
                (2.0 * kHmix);
    }

    const Vec12 b = dLdq - mixed + generalized_forces;
    Eigen::LDLT<Mat12> ldlt(A);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularMassError("finite-difference mass matrix not SPD");
    }
    return ldlt.solve(b);
}

OracleState oracle_init(const ReducedState& st) {
    OracleState os;
    os.chart = Chart{st.R_BI, st.pose.shape.R_WLB, st.pose.shape.R_WRB};
    os.q.segment<3>(3) = st.r_I;
    os.qdot << st.z.w_B, st.R_BI * st.z.v, st.z.w_L, st.z.w_R;
    os.t = st.t;
    return os;
}

ReducedState oracle_to_reduced(const OracleState& os) {
    const Frames f = kinematics(os.chart, os.q, os.qdot);
    ReducedState st;
    st.R_BI = f.R_BI;
    st.r_I = f.r_I;
    st.pose.r = f.R_BI.transposed() * f.r_I;
    st.pose.Gamma = f.R_BI.transposed() * Vec3(0, 0, 1);
    st.pose.shape = ShapeConfig{f.R_WLB, f.R_WRB};
    st.z = VelocityZ{f.R_BI.transposed() * f.rdot_I, f.w_B, f.w_L, f.w_R};
    st.t = os.t;
    return st;
}

void oracle_recenter(OracleState& os) {
    const int blocks[3] = {0, 6, 9};
    Rotation* refs[3] = {&os.chart.R_B0, &os.chart.R_WL0, &os.chart.R_WR0};
    for (int k = 0; k < 3; ++k) {
        const Vec3 th = os.q.segment<3>(blocks[k]);
        if (th.norm() > 1.0) {
            *refs[k] = *refs[k] * exp_so3(th);
            os.qdot.segment<3>(blocks[k]) =
                dexp_right(th) * os.qdot.segment<3>(blocks[k]);
            os.q.segment<3>(blocks[k]).setZero();
        }
    }
}

std::vector<ReducedState> oracle_simulate(const InertialParams& p,
                                          const ReducedState& st0,
                                          const ForceProvider& provider,
                                          const GaitSpec& gait, double dt,
                                          double duration) {
    using Vec24 = Eigen::Matrix<double, 24, 1>;
    OracleState os = oracle_init(st0);

    auto rhs = [&](const Chart& chart, const Vec24& y, double t) -> Vec24 {
        OracleState s{chart, y.head<12>(), y.tail<12>(), t};
        ReducedState rs = oracle_to_reduced(s);
        ForceInputs f = provider(rs);
        auto [tL, tR] = gait_torque(gait, t);
        f.T_cL += tL;
        f.T_cR += tR;
        const Vec12 Q = chart_generalized_forces(p, chart, s.q, s.qdot, f);
        Vec24 dy;
        dy << s.qdot, oracle_accel(p, chart, s.q, s.qdot, Q);
        return dy;
    };

    const long nsteps = std::max<long>(1, std::llround(duration / dt));
    std::vector<ReducedState> out;
    out.reserve(nsteps + 1);
    out.push_back(oracle_to_reduced(os));

    for (long i = 0; i < nsteps; ++i) {
        Vec24 y;
        y << os.q, os.qdot;
        const Vec24 k1 = rhs(os.chart, y, os.t);
        const Vec24 k2 = rhs(os.chart, y + 0.5 * dt * k1, os.t + 0.5 * dt);
        const Vec24 k3 = rhs(os.chart, y + 0.5 * dt * k2, os.t + 0.5 * dt);
        const Vec24 k4 = rhs(os.chart, y + dt * k3, os.t + dt);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        os.q = y.head<12>();
        os.qdot = y.tail<12>();
        os.t += dt;
        oracle_recenter(os);
        out.push_back(oracle_to_reduced(os));
    }
    return out;
}

double fd_relative_error(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, const Eigen::VectorXd& analytic_grad,
    double h) {
    const double denom = std::max(1.0, analytic_grad.norm());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(x.size());
        e[i] = h;
        const double fd = (f(x + e) - f(x - e)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - analytic_grad[i]) / denom);
    }
    return worst;
}

}  // namespace fwmav
