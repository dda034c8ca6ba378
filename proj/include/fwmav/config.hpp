#pragma once

#include <iosfwd>
#include <string>

#include "fwmav/integrator.hpp"

namespace fwmav {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ForceSelection {
    std::string provider = "zero";  // "zero" | "linear_damping"
    double c_lin = 0.0;
    double c_rot = 0.0;

    bool operator==(const ForceSelection&) const = default;
};

struct OutputPaths {
    std::string trajectory_csv = "trajectory.csv";
    std::string summary_json = "summary.json";

    bool operator==(const OutputPaths&) const = default;
};

/// Initial conditions as given in the config file. Attitudes are kept in
/// axis-angle form so that parse -> serialize -> parse is bit-exact; a matrix
/// attitude input is projected and canonicalized to axis-angle on parse.
struct InitialSpec {
    Vec3 r_I = Vec3::Zero();
    Vec3 attitude_aa = Vec3::Zero();  // axis-angle of R_BI
    Vec3 wing_left_aa = Vec3::Zero();
    Vec3 wing_right_aa = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    Vec3 w_B = Vec3::Zero();
    Vec3 w_L = Vec3::Zero();
    Vec3 w_R = Vec3::Zero();
};

struct RunConfig {
    InertialParams params;
    InitialSpec initial;
    GaitSpec gait;
    ForceSelection forces;
    IntegratorConfig integrator;
    double duration = 1.0;
    OutputPaths output;

    ReducedState initial_state() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Parses and validates a JSON config. Errors name the offending field.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);
std::string serialize_config(const RunConfig& cfg);

ForceProvider make_provider(const ForceSelection& sel);

/// Column schema: t, r_I(3), R_BI(9 row-major), Gamma(3), v(3), w_B(3),
/// axis-angle(R_WLB)(3), w_L(3), axis-angle(R_WRB)(3), w_R(3), E, pi_z.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

struct RunSummary {
    double energy_drift_rel = 0.0;
    double pi_z_drift_rel = 0.0;
    double gamma_norm_err_max = 0.0;
    double gamma_consistency_max = 0.0;
    long steps = 0;
    double wall_time_s = 0.0;
};

RunSummary summarize(const Trajectory& traj, double wall_time_s, long steps);
std::string serialize_summary(const RunSummary& s);

}  // namespace fwmav
