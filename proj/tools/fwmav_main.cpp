#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fwmav/checks.hpp"
#include "fwmav/config.hpp"

namespace {

using namespace fwmav;

int cmd_simulate(const std::string& config_path, const std::string& out_csv,
                 double dt_override, double duration_override) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    }
    if (dt_override > 0.0) cfg.integrator.dt = dt_override;
    if (duration_override > 0.0) cfg.duration = duration_override;
    if (!out_csv.empty()) cfg.output.trajectory_csv = out_csv;

    try {
        const auto t0 = std::chrono::steady_clock::now();
        const Trajectory traj =
            simulate(cfg.params, cfg.initial_state(), make_provider(cfg.forces),
                     cfg.gait, cfg.integrator, cfg.duration);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        const long steps =
            std::max<long>(1, std::llround(cfg.duration / cfg.integrator.dt));

        std::ofstream csv(cfg.output.trajectory_csv);
        if (!csv) {
            std::cerr << "cannot write " << cfg.output.trajectory_csv << "\n";
            return 3;
        }
        write_trajectory_csv(csv, traj);

        std::ofstream js(cfg.output.summary_json);
        if (!js) {
            std::cerr << "cannot write " << cfg.output.summary_json << "\n";
            return 3;
        }
        js << serialize_summary(summarize(traj, wall, steps));

        std::cout << "wrote " << cfg.output.trajectory_csv << " ("
                  << traj.samples.size() << " samples) and "
                  << cfg.output.summary_json << "\n";
        return 0;
    } catch (const NonFiniteError& e) {
        std::cerr << "simulation diverged: " << e.what() << " at step "
                  << e.step_index << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

int cmd_check(const std::string& config_path, uint64_t seed,
              const std::string& only, double tolerance_scale) {
    InertialParams params;
    try {
        params = load_config(config_path).params;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    }

    const auto results = checks::run_all(params, seed, only, tolerance_scale);
    if (results.empty()) {
        std::cerr << "no check matches --only " << only << "\n";
        return 1;
    }
    bool all_pass = true;
    std::printf("%-24s %14s %12s  %s\n", "property", "measured", "tolerance",
                "status");
    for (const auto& r : results) {
        std::printf("%-24s %14.6e %12.2e  %s\n", r.name.c_str(), r.measured,
                    r.tolerance, r.pass ? "pass" : "FAIL");
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

int cmd_compare_oracle(const std::string& config_path, double horizon,
                       const std::string& out_csv) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    }

    const ReducedState st0 = cfg.initial_state();
    const ForceProvider provider = make_provider(cfg.forces);
    const double dt = cfg.integrator.dt;

    std::vector<double> times;
    std::vector<double> errors;
    double worst = 0.0, worst_t = 0.0;

    auto stack = [](const ReducedState& st) {
        Eigen::VectorXd s(45);
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
    };

    try {
        if (horizon <= 0.0) {
            times.push_back(0.0);
            errors.push_back(0.0);
        } else {
            const int every = std::max(1, (int)std::llround(0.01 / dt));
            IntegratorConfig icfg = cfg.integrator;
            icfg.record_every = every;
            const Trajectory red =
                simulate(cfg.params, st0, provider, cfg.gait, icfg, horizon);
            const auto orc = oracle_simulate(cfg.params, st0, provider,
                                             cfg.gait, dt, horizon);
            for (size_t i = 0; i < red.samples.size(); ++i) {
                const size_t oi =
                    std::min(orc.size() - 1, i * (size_t)every);
                const Eigen::VectorXd a = stack(red.samples[i].state);
                const Eigen::VectorXd b = stack(orc[oi]);
                const double err = (a - b).norm() / std::max(1.0, b.norm());
                times.push_back(red.samples[i].t);
                errors.push_back(err);
                if (err > worst) {
                    worst = err;
                    worst_t = red.samples[i].t;
                }
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    if (!out_csv.empty()) {
        std::ofstream os(out_csv);
        os << "t,rel_state_error\n";
        char buf[32];
        for (size_t i = 0; i < times.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", times[i]);
            os << buf << ",";
            std::snprintf(buf, sizeof(buf), "%.17g", errors[i]);
            os << buf << "\n";
        }
    }

    std::cout << "max relative state error " << worst << " at t=" << worst_t
              << " (tolerance 1e-4)\n";
    return worst <= 1e-4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced geometric dynamics of a two-winged flapping MAV"};
    app.require_subcommand(1);

    std::string config_path, out_path, only;
    double dt_override = 0.0, duration_override = 0.0, horizon = 0.5;
    double tolerance_scale = 1.0;
    uint64_t seed = 42;

    auto* sim = app.add_subcommand("simulate", "run a simulation");
    sim->add_option("--config", config_path, "config file")->required();
    sim->add_option("--out", out_path, "trajectory CSV path override");
    sim->add_option("--dt", dt_override, "time step override (s)");
    sim->add_option("--duration", duration_override, "duration override (s)");

    auto* chk = app.add_subcommand("check", "run the property suites");
    chk->add_option("--config", config_path, "config file")->required();
    chk->add_option("--seed", seed, "RNG seed for random-state suites");
    chk->add_option("--only", only, "run only suites whose name contains this");
    chk->add_option("--tolerance-scale", tolerance_scale,
                    "multiply all tolerances");

    auto* cmp = app.add_subcommand("compare-oracle",
                                   "reduced vs full-coordinate trajectories");
    cmp->add_option("--config", config_path, "config file")->required();
    cmp->add_option("--horizon", horizon, "comparison horizon (s)");
    cmp->add_option("--out", out_path, "error series CSV path");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed())
        return cmd_simulate(config_path, out_path, dt_override,
                            duration_override);
    if (chk->parsed()) return cmd_check(config_path, seed, only, tolerance_scale);
    return cmd_compare_oracle(config_path, horizon, out_path);
}
