#include "fwmav/config.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace fwmav {

namespace {

using nlohmann::json;

Vec3 get_vec3(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ConfigError("missing field: " + field);
    const auto& a = j.at(field);
    if (!a.is_array() || a.size() != 3) {
        throw ConfigError("field " + field + " must be an array of 3 numbers");
    }
    return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

Mat3 get_mat3(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ConfigError("missing field: " + field);
    const auto& a = j.at(field);
    if (!a.is_array() || a.size() != 9) {
        throw ConfigError("field " + field +
                          " must be an array of 9 numbers (row-major)");
    }
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = a[3 * r + c].get<double>();
    return m;
}

double get_num(const json& j, const std::string& field, double dflt) {
    return j.contains(field) ? j.at(field).get<double>() : dflt;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json mat3_json(const Mat3& m) {
    json a = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
    return a;
}

Vec3 parse_attitude(const json& j, const std::string& ctx) {
    if (j.contains("axis_angle")) {
        return get_vec3(j, "axis_angle");
    }
    if (j.contains("matrix")) {
        const Mat3 m = get_mat3(j, "matrix");
        Rotation R = project_so3(m);
        const double dist = (R.matrix() - m).norm();
        if (dist > 1e-6) {
            std::cerr << "warning: " << ctx
                      << ".matrix projected onto SO(3), distance " << dist
                      << "\n";
        }
        return log_so3(R);
    }
    throw ConfigError(ctx + " must give axis_angle or matrix");
}

}  // namespace

ReducedState RunConfig::initial_state() const {
    ReducedState st;
    st.R_BI = exp_so3(initial.attitude_aa);
    st.r_I = initial.r_I;
    st.pose.r = st.R_BI.transposed() * initial.r_I;
    st.pose.Gamma = st.R_BI.transposed() * Vec3(0, 0, 1);
    st.pose.shape = ShapeConfig{exp_so3(initial.wing_left_aa),
                                exp_so3(initial.wing_right_aa)};
    st.z = VelocityZ{initial.v, initial.w_B, initial.w_L, initial.w_R};
    st.t = 0.0;
    return st;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    auto veq = [](const Vec3& x, const Vec3& y) { return x == y; };
    return a.params.m_B == b.params.m_B && a.params.m_WL == b.params.m_WL &&
           a.params.m_WR == b.params.m_WR && a.params.I_B == b.params.I_B &&
           a.params.I_WL == b.params.I_WL && a.params.I_WR == b.params.I_WR &&
           veq(a.params.hbar_L, b.params.hbar_L) &&
           veq(a.params.hbar_R, b.params.hbar_R) && a.params.g == b.params.g &&
           a.params.rho == b.params.rho && veq(a.initial.r_I, b.initial.r_I) &&
           veq(a.initial.attitude_aa, b.initial.attitude_aa) &&
           veq(a.initial.wing_left_aa, b.initial.wing_left_aa) &&
           veq(a.initial.wing_right_aa, b.initial.wing_right_aa) &&
           veq(a.initial.v, b.initial.v) && veq(a.initial.w_B, b.initial.w_B) &&
           veq(a.initial.w_L, b.initial.w_L) &&
           veq(a.initial.w_R, b.initial.w_R) &&
           a.gait.amplitude == b.gait.amplitude &&
           a.gait.frequency == b.gait.frequency &&
           a.gait.phase_L == b.gait.phase_L &&
           a.gait.phase_R == b.gait.phase_R &&
           veq(a.gait.axis_L, b.gait.axis_L) &&
           veq(a.gait.axis_R, b.gait.axis_R) && a.forces == b.forces &&
           a.integrator.dt == b.integrator.dt &&
           a.integrator.method == b.integrator.method &&
           a.integrator.record_every == b.integrator.record_every &&
           a.duration == b.duration && a.output == b.output;
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }

    RunConfig cfg;
    if (!j.contains("params")) throw ConfigError("missing section: params");
    const json& jp = j.at("params");
    cfg.params.m_B = get_num(jp, "m_B", -1.0);
    cfg.params.m_WL = get_num(jp, "m_WL", -1.0);
    cfg.params.m_WR = get_num(jp, "m_WR", -1.0);
    cfg.params.I_B = get_mat3(jp, "I_B");
    cfg.params.I_WL = get_mat3(jp, "I_WL");
    cfg.params.I_WR = get_mat3(jp, "I_WR");
    cfg.params.hbar_L = get_vec3(jp, "hbar_L");
    cfg.params.hbar_R = get_vec3(jp, "hbar_R");
    cfg.params.g = get_num(jp, "g", 9.81);
    cfg.params.rho = get_num(jp, "rho", 1000.0);
    try {
        cfg.params.validated();
    } catch (const InvalidParamsError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }

    if (!j.contains("initial")) throw ConfigError("missing section: initial");
    const json& ji = j.at("initial");
    cfg.initial.r_I = get_vec3(ji, "r_I");
    if (!ji.contains("attitude"))
        throw ConfigError("missing field: initial.attitude");
    cfg.initial.attitude_aa = parse_attitude(ji.at("attitude"),
                                             "initial.attitude");
    if (ji.contains("wing_left"))
        cfg.initial.wing_left_aa =
            parse_attitude(ji.at("wing_left"), "initial.wing_left");
    if (ji.contains("wing_right"))
        cfg.initial.wing_right_aa =
            parse_attitude(ji.at("wing_right"), "initial.wing_right");
    cfg.initial.v = get_vec3(ji, "v");
    cfg.initial.w_B = get_vec3(ji, "w_B");
    cfg.initial.w_L = get_vec3(ji, "w_L");
    cfg.initial.w_R = get_vec3(ji, "w_R");

    if (j.contains("gait")) {
        const json& jg = j.at("gait");
        cfg.gait.amplitude = get_num(jg, "amplitude", 0.0);
        cfg.gait.frequency = get_num(jg, "frequency", 1.0);
        cfg.gait.phase_L = get_num(jg, "phase_left", 0.0);
        cfg.gait.phase_R = get_num(jg, "phase_right", 0.0);
        if (jg.contains("axis_left")) cfg.gait.axis_L = get_vec3(jg, "axis_left");
        if (jg.contains("axis_right"))
            cfg.gait.axis_R = get_vec3(jg, "axis_right");
        if (cfg.gait.frequency <= 0.0)
            throw ConfigError("gait.frequency must be positive");
        if (std::abs(cfg.gait.axis_L.norm() - 1.0) > 1e-9 ||
            std::abs(cfg.gait.axis_R.norm() - 1.0) > 1e-9)
            throw ConfigError("gait axes must be unit vectors");
    }

    if (j.contains("forces")) {
        const json& jf = j.at("forces");
        cfg.forces.provider = jf.value("provider", std::string("zero"));
        cfg.forces.c_lin = get_num(jf, "c_lin", 0.0);
        cfg.forces.c_rot = get_num(jf, "c_rot", 0.0);
        if (cfg.forces.provider != "zero" &&
            cfg.forces.provider != "linear_damping")
            throw ConfigError("forces.provider must be zero or linear_damping");
        if (cfg.forces.c_lin < 0.0 || cfg.forces.c_rot < 0.0)
            throw ConfigError("damping coefficients must be nonnegative");
    }

    if (j.contains("integrator")) {
        const json& jt = j.at("integrator");
        cfg.integrator.dt = get_num(jt, "dt", 1e-3);
        const std::string m = jt.value("method", std::string("mk4"));
        if (m == "mk4")
            cfg.integrator.method = Method::MK4;
        else if (m == "rk4project")
            cfg.integrator.method = Method::RK4Project;
        else
            throw ConfigError("integrator.method must be mk4 or rk4project");
        cfg.integrator.record_every =
            static_cast<int>(get_num(jt, "record_every", 1));
        if (!(cfg.integrator.dt > 0.0 && cfg.integrator.dt <= 0.1))
            throw ConfigError("integrator.dt must be in (0, 0.1]");
        if (cfg.integrator.record_every < 1)
            throw ConfigError("integrator.record_every must be >= 1");
    }

    cfg.duration = get_num(j, "duration", 1.0);
    if (cfg.duration <= 0.0) throw ConfigError("duration must be positive");

    if (j.contains("output")) {
        const json& jo = j.at("output");
        cfg.output.trajectory_csv =
            jo.value("trajectory_csv", std::string("trajectory.csv"));
        cfg.output.summary_json =
            jo.value("summary_json", std::string("summary.json"));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    json j;
    j["params"] = {
        {"m_B", cfg.params.m_B},     {"m_WL", cfg.params.m_WL},
        {"m_WR", cfg.params.m_WR},   {"I_B", mat3_json(cfg.params.I_B)},
        {"I_WL", mat3_json(cfg.params.I_WL)},
        {"I_WR", mat3_json(cfg.params.I_WR)},
        {"hbar_L", vec3_json(cfg.params.hbar_L)},
        {"hbar_R", vec3_json(cfg.params.hbar_R)},
        {"g", cfg.params.g},         {"rho", cfg.params.rho}};
    j["initial"] = {
        {"r_I", vec3_json(cfg.initial.r_I)},
        {"attitude", {{"axis_angle", vec3_json(cfg.initial.attitude_aa)}}},
        {"wing_left", {{"axis_angle", vec3_json(cfg.initial.wing_left_aa)}}},
        {"wing_right", {{"axis_angle", vec3_json(cfg.initial.wing_right_aa)}}},
        {"v", vec3_json(cfg.initial.v)},
        {"w_B", vec3_json(cfg.initial.w_B)},
        {"w_L", vec3_json(cfg.initial.w_L)},
        {"w_R", vec3_json(cfg.initial.w_R)}};
    j["gait"] = {{"amplitude", cfg.gait.amplitude},
                 {"frequency", cfg.gait.frequency},
                 {"phase_left", cfg.gait.phase_L},
                 {"phase_right", cfg.gait.phase_R},
                 {"axis_left", vec3_json(cfg.gait.axis_L)},
                 {"axis_right", vec3_json(cfg.gait.axis_R)}};
    j["forces"] = {{"provider", cfg.forces.provider},
                   {"c_lin", cfg.forces.c_lin},
                   {"c_rot", cfg.forces.c_rot}};
    j["integrator"] = {
        {"dt", cfg.integrator.dt},
        {"method",
         cfg.integrator.method == Method::MK4 ? "mk4" : "rk4project"},
        {"record_every", cfg.integrator.record_every}};
    j["duration"] = cfg.duration;
    j["output"] = {{"trajectory_csv", cfg.output.trajectory_csv},
                   {"summary_json", cfg.output.summary_json}};
    return j.dump(2) + "\n";
}

ForceProvider make_provider(const ForceSelection& sel) {
    if (sel.provider == "linear_damping") {
        return linear_damping_provider(sel.c_lin, sel.c_rot);
    }
    return zero_force_provider();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,rI_x,rI_y,rI_z,"
          "R11,R12,R13,R21,R22,R23,R31,R32,R33,"
          "Gamma_x,Gamma_y,Gamma_z,v_x,v_y,v_z,wB_x,wB_y,wB_z,"
          "aaL_x,aaL_y,aaL_z,wL_x,wL_y,wL_z,"
          "aaR_x,aaR_y,aaR_z,wR_x,wR_y,wR_z,E,pi_z\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << sep;
    };
    for (const Sample& s : traj.samples) {
        const ReducedState& st = s.state;
        put(s.t, ',');
        for (int i = 0; i < 3; ++i) put(st.r_I[i], ',');
        const Mat3& R = st.R_BI.matrix();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) put(R(r, c), ',');
        for (int i = 0; i < 3; ++i) put(st.pose.Gamma[i], ',');
        for (int i = 0; i < 3; ++i) put(st.z.v[i], ',');
        for (int i = 0; i < 3; ++i) put(st.z.w_B[i], ',');
        const Vec3 aaL = log_so3(st.pose.shape.R_WLB);
        for (int i = 0; i < 3; ++i) put(aaL[i], ',');
        for (int i = 0; i < 3; ++i) put(st.z.w_L[i], ',');
        const Vec3 aaR = log_so3(st.pose.shape.R_WRB);
        for (int i = 0; i < 3; ++i) put(aaR[i], ',');
        for (int i = 0; i < 3; ++i) put(st.z.w_R[i], ',');
        put(s.diag.energy, ',');
        put(s.diag.pi_z, '\n');
    }
}

RunSummary summarize(const Trajectory& traj, double wall_time_s, long steps) {
    RunSummary s;
    s.steps = steps;
    s.wall_time_s = wall_time_s;
    if (traj.samples.empty()) return s;
    const double E0 = traj.samples.front().diag.energy;
    const double pz0 = traj.samples.front().diag.pi_z;
    for (const Sample& smp : traj.samples) {
        s.energy_drift_rel =
            std::max(s.energy_drift_rel,
                     std::abs(smp.diag.energy - E0) / std::max(1.0, std::abs(E0)));
        s.pi_z_drift_rel =
            std::max(s.pi_z_drift_rel,
                     std::abs(smp.diag.pi_z - pz0) / std::max(1.0, std::abs(pz0)));
        s.gamma_norm_err_max =
            std::max(s.gamma_norm_err_max,
                     std::abs(smp.state.pose.Gamma.norm() - 1.0));
        s.gamma_consistency_max =
            std::max(s.gamma_consistency_max, smp.diag.gamma_err);
    }
    return s;
}

std::string serialize_summary(const RunSummary& s) {
    json j;
    j["energy_drift_rel"] = s.energy_drift_rel;
    j["pi_z_drift_rel"] = s.pi_z_drift_rel;
    j["gamma_norm_err_max"] = s.gamma_norm_err_max;
    j["gamma_consistency_max"] = s.gamma_consistency_max;
    j["steps"] = s.steps;
    j["wall_time_s"] = s.wall_time_s;
    return j.dump(2) + "\n";
}

}  // namespace fwmav
